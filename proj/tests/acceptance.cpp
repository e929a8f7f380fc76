// Acceptance gate: eight checks, one pass/fail line each. Oracles used here
// (four-corner DLT, the literal double-loop attention reference, central
// finite differences) share no code with the paths under test.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "panogeo/caa.hpp"
#include "panogeo/dlt.hpp"
#include "panogeo/estimator.hpp"
#include "panogeo/geometry.hpp"
#include "panogeo/hashing.hpp"
#include "panogeo/metrics.hpp"
#include "panogeo/pano.hpp"
#include "panogeo/raster.hpp"
#include "panogeo/rng.hpp"
#include "panogeo/synth.hpp"
#include "panogeo/verify.hpp"

using namespace panogeo;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double limit_seconds = 0.0;
};

int g_failures = 0;

void report(int index, const char* title, const Outcome& o) {
  std::printf("%s criterion %d (%s): %s [%.2f s, limit %.0f s]\n",
              o.pass ? "PASS" : "FAIL", index, title, o.detail.c_str(),
              o.seconds, o.limit_seconds);
  std::fflush(stdout);
  if (!o.pass) ++g_failures;
}

template <typename F>
Outcome timed(double limit_seconds, F&& body) {
  Outcome o;
  o.limit_seconds = limit_seconds;
  const auto t0 = std::chrono::steady_clock::now();
  body(o);
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            t0)
                  .count();
  if (o.seconds > limit_seconds) {
    o.pass = false;
    o.detail += " [over time budget]";
  }
  return o;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(f)), {});
}

// content hash of the generated data; the config echo is skipped because it
// records the differing --out path
std::uint64_t hash_tree(const fs::path& root) {
  std::vector<std::pair<std::string, std::uint64_t>> entries;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() &&
        !e.path().filename().string().ends_with("-config.json"))
      entries.emplace_back(fs::relative(e.path(), root).generic_string(),
                           fnv1a64_str(slurp(e.path())));
  std::sort(entries.begin(), entries.end());
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& [rel, hv] : entries) {
    h = fnv1a64_str(rel, h);
    h = fnv1a64(&hv, sizeof(hv), h);
  }
  return h;
}

// ---- criterion 1: canonical identity --------------------------------------

Outcome criterion1() {
  return timed(1.0, [](Outcome& o) {
    const Intrinsics k = intrinsics_from_params(CameraParams::canonical());
    const CameraParams c = CameraParams::canonical();
    const Homography h = homography_from_params(c, c);
    double max_abs = 0.0;
    for (int r = 0; r < 3; ++r)
      for (int col = 0; col < 3; ++col)
        max_abs =
            std::max(max_abs, std::abs(h(r, col) - (r == col ? 1.0 : 0.0)));
    const bool intr = k.fx == 256.0 && k.fy == 256.0 && k.cx == 255.5 &&
                      k.cy == 255.5;
    o.pass = intr && max_abs <= 1e-12;
    o.detail = fmt("identity max abs err %.3g (tol 1e-12), fx=256 cx=255.5 ",
                   max_abs) +
               (intr ? "exact" : "WRONG");
  });
}

// ---- criterion 2: parameter round trip ------------------------------------

Outcome criterion2() {
  return timed(1.0, [](Outcome& o) {
    double max_err = 0.0;
    for (int fi = 0; fi <= 6; ++fi)
      for (int pi = 0; pi <= 6; ++pi)
        for (int si = 0; si <= 6; ++si) {
          CameraParams p;
          p.fov_deg = 60.0 + fi * (50.0 / 6.0);
          p.phi_deg = -15.0 + pi * 5.0;
          p.psi_deg = -15.0 + si * 5.0;
          p.width = p.height = 512;
          const Homography h =
              homography_from_params(p, CameraParams::canonical());
          const ParamRecovery rec = params_from_homography(h, 512, 512);
          if (!rec.in_family) {
            o.detail = "recovery rejected an in-family matrix";
            return;
          }
          max_err = std::max({max_err, std::abs(rec.params.fov_deg - p.fov_deg),
                              std::abs(rec.params.phi_deg - p.phi_deg),
                              std::abs(rec.params.psi_deg - p.psi_deg)});
        }
    o.pass = max_err <= 1e-7;
    o.detail = fmt("7x7x7 grid max param err %.3g deg (tol 1e-7)", max_err);
  });
}

// ---- criterion 3: DLT oracle ----------------------------------------------

Outcome criterion3() {
  return timed(5.0, [](Outcome& o) {
    Rng rng(0xd17c0deull);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      CameraParams p;
      p.fov_deg = rng.uniform(60.0, 110.0);
      p.phi_deg = rng.uniform(-15.0, 15.0);
      p.psi_deg = rng.uniform(-15.0, 15.0);
      p.width = p.height = 512;
      const Homography h = homography_from_params(p, CameraParams::canonical());
      std::vector<Eigen::Vector2d> src, dst;
      for (const auto& c :
           {Eigen::Vector2d(0, 0), Eigen::Vector2d(511, 0),
            Eigen::Vector2d(0, 511), Eigen::Vector2d(511, 511)}) {
        const auto q = project_point(h, c);
        if (!q) {
          o.detail = "corner projected behind the camera";
          return;
        }
        src.push_back(c);
        dst.push_back(*q);
      }
      const Homography fit = fit_homography_dlt(src, dst);
      Eigen::Matrix3d a = h.matrix() / h.matrix().norm();
      Eigen::Matrix3d b = fit.matrix() / fit.matrix().norm();
      if ((a - b).norm() > (a + b).norm()) b = -b;
      worst = std::max(worst, (a - b).norm());
    }
    o.pass = worst <= 1e-6;
    o.detail = fmt("100 draws, worst Frobenius gap %.3g (tol 1e-6)", worst);
  });
}

// ---- criterion 4: warp round trip -----------------------------------------

Outcome criterion4() {
  return timed(60.0, [](Outcome& o) {
    const ImageRaster img = make_smooth_image(0xba5eull, 512);
    double worst = 1e300;
    for (int i = 0; i < 50; ++i) {
      const RandomWarp rw = random_warp(img, mix_seed(0x4a11ull, i), 512);
      WarpSpec back;
      back.homography =
          homography_from_params(rw.params, CameraParams::canonical());
      back.out_width = back.out_height = 512;
      const ImageRaster rec = warp_image(rw.image, back);
      worst = std::min(worst, psnr_masked(rec, img));
    }
    o.pass = worst >= 30.0;
    o.detail = fmt("50 warps, worst round-trip PSNR %.2f dB (needs >= 30)",
                   worst);
  });
}

// ---- criterion 5: pano slice/stitch ---------------------------------------

Outcome criterion5() {
  return timed(60.0, [](Outcome& o) {
    const SphereField field = SphereField::make(0x5111ull);
    const ImageRaster pano = render_equirect(field, 1024, 512);
    PanoLayout layout;
    const std::vector<ImageRaster> views = equirect_to_views(pano, layout);
    const ImageRaster stitched = views_to_equirect(views, layout, 1024, 512);

    ImageRaster band_ref = pano;
    ImageRaster band_out = stitched;
    for (int y = 0; y < 512; ++y) {
      const double lat_deg = (0.5 - (y + 0.5) / 512.0) * 180.0;
      if (std::abs(lat_deg) <= 45.0) continue;
      for (int x = 0; x < 1024; ++x) {
        band_ref.mask[band_ref.pixel_index(x, y)] = 0;
        band_out.mask[band_out.pixel_index(x, y)] = 0;
      }
    }
    const double psnr = psnr_masked(band_out, band_ref);

    // 45 deg horizontal overlap: half of each row is shared with the next
    // view, measured on the center rows where the overlap is purely
    // horizontal
    const CorrespondenceMap adj = build_correspondence(0, 1, layout);
    const double frac = adj.center_row_visible_fraction();
    const double frac_err = std::abs(frac - 0.5);
    const double one_col = 1.0 / layout.view_size;

    o.pass = psnr >= 30.0 && frac_err <= one_col;
    o.detail = fmt("band PSNR %.2f dB (needs >= 30), adjacent overlap "
                   "%.6f (|err| %.2g <= 1/512)",
                   psnr, frac, frac_err);
  });
}

// ---- criterion 6: CAA correctness ------------------------------------------

struct CaaInstance {
  CaaTensors t;
  CorrespondenceMap map;
};

CaaInstance make_caa_instance(std::uint64_t seed, int tw, int th, int sw,
                              int sh, int dim, int k) {
  CaaInstance inst;
  Rng rng(seed);
  inst.t.target_width = tw;
  inst.t.target_height = th;
  inst.t.source_width = sw;
  inst.t.source_height = sh;
  inst.t.dim = dim;
  inst.t.k = k;
  inst.t.target_features.resize(static_cast<std::size_t>(tw) * th * dim);
  inst.t.source_features.resize(static_cast<std::size_t>(sw) * sh * dim);
  for (auto& v : inst.t.target_features) v = rng.uniform(-1.0, 1.0);
  for (auto& v : inst.t.source_features) v = rng.uniform(-1.0, 1.0);
  inst.t.w_q = Eigen::MatrixXd(dim, dim);
  inst.t.w_k = Eigen::MatrixXd(dim, dim);
  inst.t.w_v = Eigen::MatrixXd(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      inst.t.w_q(r, c) = rng.uniform(-0.7, 0.7);
      inst.t.w_k(r, c) = rng.uniform(-0.7, 0.7);
      inst.t.w_v(r, c) = rng.uniform(-0.7, 0.7);
    }
  inst.map.width = tw;
  inst.map.height = th;
  inst.map.source_width = sw;
  inst.map.source_height = sh;
  const std::size_t n = static_cast<std::size_t>(tw) * th;
  inst.map.u.resize(n);
  inst.map.v.resize(n);
  inst.map.visible.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    inst.map.u[i] = rng.uniform(-1.5, sw + 0.5);
    inst.map.v[i] = rng.uniform(-1.5, sh + 0.5);
    inst.map.visible[i] = rng.uniform() < 0.85 ? 1 : 0;
    if (inst.map.u[i] < 0.0 || inst.map.u[i] > sw - 1.0 ||
        inst.map.v[i] < 0.0 || inst.map.v[i] > sh - 1.0)
      inst.map.visible[i] = 0;
  }
  inst.map.u[0] = sw / 2.0;
  inst.map.v[0] = sh / 2.0;
  inst.map.visible[0] = 1;
  return inst;
}

// literal transcription of the attention definition; the oracle
std::vector<double> caa_naive(const CaaTensors& t, const CorrespondenceMap& map) {
  const int dim = t.dim;
  std::vector<double> out(
      static_cast<std::size_t>(t.target_width) * t.target_height * dim, 0.0);
  const int r = t.k / 2;
  for (int y = 0; y < t.target_height; ++y)
    for (int x = 0; x < t.target_width; ++x) {
      const std::size_t pi = map.index(x, y);
      if (!map.visible[pi]) continue;
      const int cx = static_cast<int>(std::lround(map.u[pi]));
      const int cy = static_cast<int>(std::lround(map.v[pi]));
      Eigen::Map<const Eigen::VectorXd> ft(t.target_at(x, y), dim);
      const Eigen::VectorXd q = t.w_q * ft;
      std::vector<double> logits;
      std::vector<Eigen::VectorXd> vals;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          const int sx = cx + dx, sy = cy + dy;
          if (sx < 0 || sx >= t.source_width || sy < 0 ||
              sy >= t.source_height)
            continue;
          Eigen::Map<const Eigen::VectorXd> fs(t.source_at(sx, sy), dim);
          logits.push_back(t.logit_scale * q.dot(t.w_k * fs));
          vals.push_back(t.w_v * fs);
        }
      if (logits.empty()) continue;
      const double mx = *std::max_element(logits.begin(), logits.end());
      double z = 0.0;
      for (double l : logits) z += std::exp(l - mx);
      Eigen::VectorXd m = Eigen::VectorXd::Zero(dim);
      for (std::size_t i = 0; i < logits.size(); ++i)
        m += std::exp(logits[i] - mx) / z * vals[i];
      for (int d = 0; d < dim; ++d) out[pi * dim + d] = m[d];
    }
  return out;
}

Outcome criterion6() {
  return timed(30.0, [](Outcome& o) {
    // forward vs oracle on every grid size up to 8x8, d <= 4, K in {1,3,5}
    double worst_abs = 0.0;
    for (int tw = 1; tw <= 8; ++tw)
      for (int th = 1; th <= 8; ++th)
        for (int dim = 1; dim <= 4; ++dim)
          for (int k : {1, 3, 5}) {
            const CaaInstance inst = make_caa_instance(
                mix_seed(0xacc6ull, tw, th, dim * 8 + k), tw, th, tw + 2,
                th + 2, dim, k);
            const CaaOutput out = caa_forward(inst.t, inst.map);
            const std::vector<double> ref = caa_naive(inst.t, inst.map);
            for (std::size_t i = 0; i < ref.size(); ++i)
              worst_abs =
                  std::max(worst_abs, std::abs(out.values[i] - ref[i]));
          }

    // analytic gradients vs central differences over 20 seeds
    double worst_rel = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const CaaInstance inst = make_caa_instance(mix_seed(0x66adull, seed), 4,
                                                 3, 5, 5, 3, (seed % 2) ? 3 : 5);
      Rng rng(mix_seed(0x0b5ull, seed));
      std::vector<double> upstream(inst.t.target_features.size());
      for (auto& v : upstream) v = rng.uniform(-1.0, 1.0);
      const auto objective = [&](const CaaTensors& t) {
        const CaaOutput out = caa_forward(t, inst.map);
        double s = 0.0;
        for (std::size_t i = 0; i < out.values.size(); ++i)
          s += upstream[i] * out.values[i];
        return s;
      };
      const CaaGradients g = caa_backward(inst.t, inst.map, upstream);
      const double eps = 1e-6;
      const auto rel = [](double a, double fd) {
        return std::abs(a - fd) / std::max({1.0, std::abs(a), std::abs(fd)});
      };
      for (std::size_t i = 0; i < inst.t.target_features.size(); i += 3) {
        CaaTensors tp = inst.t, tm = inst.t;
        tp.target_features[i] += eps;
        tm.target_features[i] -= eps;
        worst_rel = std::max(
            worst_rel,
            rel(g.d_target[i], (objective(tp) - objective(tm)) / (2 * eps)));
      }
      for (std::size_t i = 0; i < inst.t.source_features.size(); i += 5) {
        CaaTensors tp = inst.t, tm = inst.t;
        tp.source_features[i] += eps;
        tm.source_features[i] -= eps;
        worst_rel = std::max(
            worst_rel,
            rel(g.d_source[i], (objective(tp) - objective(tm)) / (2 * eps)));
      }
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
          Eigen::MatrixXd CaaTensors::*const mats[] = {
              &CaaTensors::w_q, &CaaTensors::w_k, &CaaTensors::w_v};
          Eigen::MatrixXd CaaGradients::*const grads[] = {
              &CaaGradients::d_w_q, &CaaGradients::d_w_k, &CaaGradients::d_w_v};
          for (int m = 0; m < 3; ++m) {
            CaaTensors tp = inst.t, tm = inst.t;
            (tp.*mats[m])(r, c) += eps;
            (tm.*mats[m])(r, c) -= eps;
            worst_rel = std::max(
                worst_rel, rel((g.*grads[m])(r, c),
                               (objective(tp) - objective(tm)) / (2 * eps)));
          }
        }
    }

    // K = 1 degeneracy: output equals the value projection of the anchor
    double k1_gap = 0.0;
    const CaaInstance inst = make_caa_instance(0xdecaull, 6, 6, 8, 8, 4, 1);
    const CaaOutput out = caa_forward(inst.t, inst.map);
    for (int y = 0; y < 6; ++y)
      for (int x = 0; x < 6; ++x) {
        const std::size_t i = inst.map.index(x, y);
        if (out.skipped[i]) continue;
        const int cx = static_cast<int>(std::lround(inst.map.u[i]));
        const int cy = static_cast<int>(std::lround(inst.map.v[i]));
        Eigen::Map<const Eigen::VectorXd> fs(inst.t.source_at(cx, cy), 4);
        const Eigen::VectorXd expect = inst.t.w_v * fs;
        for (int d = 0; d < 4; ++d)
          k1_gap = std::max(k1_gap,
                            std::abs(out.at(x, y)[d] - expect[d]));
      }

    o.pass = worst_abs <= 1e-12 && worst_rel <= 1e-4 && k1_gap == 0.0;
    o.detail = fmt("forward vs oracle %.3g (tol 1e-12), gradcheck rel %.3g "
                   "(tol 1e-4), K=1 gap %.3g (exact)",
                   worst_abs, worst_rel, k1_gap);
  });
}

// ---- criterion 7: estimator sanity ----------------------------------------

Outcome criterion7(const fs::path& work) {
  return timed(1800.0, [&](Outcome& o) {
    const fs::path train_ds = work / "train_ds";
    const fs::path held_ds = work / "held_ds";
    const fs::path run_ce = work / "run_ce";
    const fs::path run_mse = work / "run_mse";
    const fs::path ev = work / "eval";

    if (run_cli({"gen-dataset", "--synth", "36", "--size", "128",
                 "--n-per-pano", "16", "--seed", "101", "--out",
                 train_ds.string()}) != 0 ||
        run_cli({"gen-dataset", "--synth", "4", "--size", "128",
                 "--n-per-pano", "8", "--seed", "900", "--out",
                 held_ds.string()}) != 0) {
      o.detail = "dataset generation failed";
      return;
    }
    const std::string manifest = (train_ds / "manifest.jsonl").string();
    for (const char* objective : {"ce", "mse"}) {
      const fs::path out = (objective == std::string("ce")) ? run_ce : run_mse;
      if (run_cli({"train", "--manifest", manifest, "--objective", objective,
                   "--seed", "17", "--epochs", "60", "--lr", "0.001", "--out",
                   out.string()}) != 0) {
        o.detail = std::string("training failed for ") + objective;
        return;
      }
    }
    if (run_cli({"eval", "--manifest", (held_ds / "manifest.jsonl").string(),
                 "--model", (run_ce / "model-ce.cfde").string(), "--model",
                 (run_mse / "model-mse.cfde").string(), "--out",
                 ev.string()}) != 0) {
      o.detail = "evaluation failed";
      return;
    }

    const json rep = json::parse(slurp(ev / "eval-report.json"));
    const auto& rows = rep.at("rows");
    if (rows.size() != 2 || rows[0].at("objective") != "ce" ||
        rows[1].at("objective") != "mse") {
      o.detail = "report does not hold the ce and mse rows";
      return;
    }
    const std::size_t n_train =
        json::parse(slurp(run_ce / "train-log-ce.json")).at("n_samples")
            .get<std::size_t>();
    const double mf = rows[0].at("mae_fov").get<double>();
    const double mp = rows[0].at("mae_phi").get<double>();
    const double ms = rows[0].at("mae_psi").get<double>();
    const bool ref_ok = rep.contains("reference") &&
                        rep.at("reference").at("binding") == false &&
                        rep.at("reference").at("mae_fov") == 7.9;
    o.pass = n_train >= 2000 && mf < 8.3 && mp < 5.0 && ms < 5.0 && ref_ok;
    o.detail = fmt("held-out CE MAE fov %.2f (<8.3), phi %.2f (<5), psi %.2f "
                   "(<5)",
                   mf, mp, ms) +
               ", " + std::to_string(n_train) +
               " train warps, two-row ce/mse report with non-binding "
               "reference " +
               (ref_ok ? "present" : "MISSING");
  });
}

// ---- criterion 8: determinism ----------------------------------------------

Outcome criterion8(const fs::path& work) {
  return timed(600.0, [&](Outcome& o) {
    // gen-dataset twice with one seed
    const fs::path a = work / "ds_a", b = work / "ds_b";
    for (const fs::path& out : {a, b})
      if (run_cli({"gen-dataset", "--synth", "2", "--size", "32",
                   "--n-per-pano", "2", "--seed", "77", "--out",
                   out.string()}) != 0) {
        o.detail = "dataset generation failed";
        return;
      }
    const bool ds_same = hash_tree(a) == hash_tree(b);

    // train twice with one seed on the same manifest
    const fs::path ra = work / "run_a", rb = work / "run_b";
    for (const fs::path& out : {ra, rb})
      if (run_cli({"train", "--manifest", (a / "manifest.jsonl").string(),
                   "--epochs", "3", "--input-size", "32", "--seed", "21",
                   "--out", out.string()}) != 0) {
        o.detail = "training failed";
        return;
      }
    const bool model_same = slurp(ra / "model-ce.cfde") ==
                            slurp(rb / "model-ce.cfde") &&
                            !slurp(ra / "model-ce.cfde").empty();

    // every verify suite twice with one seed, compared as serialized bytes
    bool verify_same = true;
    for (const std::string& name : suite_names()) {
      const SuiteReport r1 = run_suite(name, 5);
      const SuiteReport r2 = run_suite(name, 5);
      if (format_report(r1) != format_report(r2)) verify_same = false;
      for (std::size_t i = 0; i < r1.checks.size(); ++i)
        if (r1.checks[i].observed != r2.checks[i].observed)
          verify_same = false;
      if (!r1.all_pass()) verify_same = false;  // suites must also pass
    }

    o.pass = ds_same && model_same && verify_same;
    o.detail = std::string("gen-dataset ") +
               (ds_same ? "bit-identical" : "DIFFERS") + ", train " +
               (model_same ? "bit-identical" : "DIFFERS") +
               ", verify suites " +
               (verify_same ? "bit-identical and passing" : "DIFFER OR FAIL");
  });
}

}  // namespace

int main() {
  const fs::path work =
      fs::temp_directory_path() / "panogeo_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  report(1, "canonical identity", criterion1());
  report(2, "parameter round trip", criterion2());
  report(3, "DLT oracle agreement", criterion3());
  report(4, "warp round trip", criterion4());
  report(5, "pano slice/stitch", criterion5());
  report(6, "attention correctness", criterion6());
  report(7, "estimator sanity", criterion7(work));
  report(8, "determinism", criterion8(work));

  fs::remove_all(work);
  if (g_failures) {
    std::printf("%d of 8 criteria failed\n", g_failures);
    return 1;
  }
  std::printf("all 8 criteria passed\n");
  return 0;
}
