#include "panogeo/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <utility>

#include "panogeo/caa.hpp"
#include "panogeo/dlt.hpp"
#include "panogeo/geometry.hpp"
#include "panogeo/hashing.hpp"
#include "panogeo/metrics.hpp"
#include "panogeo/pano.hpp"
#include "panogeo/raster.hpp"
#include "panogeo/rng.hpp"
#include "panogeo/synth.hpp"

namespace panogeo {

bool SuiteReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.pass; });
}

namespace {

// observed must stay at or below tol
void bound_check(SuiteReport& r, const std::string& name, double observed,
                 double tol) {
  r.checks.push_back({name + "(<=)", observed, tol, observed <= tol});
}

// observed must reach at least tol
void floor_check(SuiteReport& r, const std::string& name, double observed,
                 double tol) {
  r.checks.push_back({name + "(>=)", observed, tol, observed >= tol});
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return v;
}

CameraParams random_family_params(Rng& rng, int width, int height) {
  CameraParams p;
  p.fov_deg = rng.uniform(60.0, 110.0);
  p.phi_deg = rng.uniform(-15.0, 15.0);
  p.psi_deg = rng.uniform(-15.0, 15.0);
  p.width = width;
  p.height = height;
  return p;
}

std::uint64_t hash_raster(const ImageRaster& img) {
  std::uint64_t h = fnv1a64_span(img.data);
  return fnv1a64_span(img.mask, h);
}

}  // namespace

SuiteReport verify_geometry(std::uint64_t seed) {
  SuiteReport r;
  r.suite = "geometry";
  const CameraParams canon = CameraParams::canonical();

  {
    const Homography h = homography_from_params(canon, canon);
    const double err =
        (h.matrix() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    bound_check(r, "canonical_identity_max_abs", err, 1e-12);
  }
  {
    const Intrinsics k = intrinsics_from_params(canon);
    const double err =
        std::max({std::abs(k.fx - 256.0), std::abs(k.fy - 256.0),
                  std::abs(k.cx - 255.5), std::abs(k.cy - 255.5)});
    bound_check(r, "canonical_intrinsics_abs", err, 0.0);
  }
  {
    double max_err = 0.0;
    for (double fov : linspace(60.0, 110.0, 7))
      for (double phi : linspace(-15.0, 15.0, 7))
        for (double psi : linspace(-15.0, 15.0, 7)) {
          CameraParams p{fov, phi, psi, 512, 512};
          const Homography h = homography_from_params(p, canon);
          const ParamRecovery rec = params_from_homography(h, 512, 512);
          if (!rec.in_family) {
            max_err = std::numeric_limits<double>::infinity();
            continue;
          }
          max_err = std::max({max_err, std::abs(rec.params.fov_deg - fov),
                              std::abs(rec.params.phi_deg - phi),
                              std::abs(rec.params.psi_deg - psi)});
        }
    bound_check(r, "param_round_trip_grid_deg", max_err, 1e-7);
  }
  {
    Rng rng(mix_seed(seed, 0x6e01ull));
    double max_err = 0.0;
    for (int i = 0; i < 50; ++i) {
      const CameraParams p = random_family_params(rng, 640, 480);
      const Homography h = homography_from_params(p, canon);
      const ParamRecovery rec = params_from_homography(h, 640, 480);
      if (!rec.in_family) {
        max_err = std::numeric_limits<double>::infinity();
        continue;
      }
      max_err = std::max({max_err, std::abs(rec.params.fov_deg - p.fov_deg),
                          std::abs(rec.params.phi_deg - p.phi_deg),
                          std::abs(rec.params.psi_deg - p.psi_deg)});
    }
    bound_check(r, "param_round_trip_nonsquare_deg", max_err, 1e-7);
  }
  {
    // equal intrinsics on both sides: the conjugated matrix is the rotation
    Rng rng(mix_seed(seed, 0x6e02ull));
    double max_err = 0.0;
    const Intrinsics k = intrinsics_from_params(canon);
    for (int i = 0; i < 50; ++i) {
      CameraParams p = random_family_params(rng, 512, 512);
      p.fov_deg = 90.0;
      const Homography h = homography_from_params(p, canon);
      // stored homographies are h22-normalized, so the conjugate is a
      // scaled rotation; unit-norm columns recover the scale
      Eigen::Matrix3d m = k.inverse_matrix() * h.matrix() * k.matrix();
      m /= m.col(0).norm();
      max_err = std::max(
          max_err,
          (m * m.transpose() - Eigen::Matrix3d::Identity()).norm());
    }
    bound_check(r, "conjugate_orthogonality_fro", max_err, 1e-9);
  }
  {
    Rng rng(mix_seed(seed, 0x6e03ull));
    double max_fro = 0.0;
    double max_param = 0.0;
    for (int i = 0; i < 100; ++i) {
      const CameraParams p = random_family_params(rng, 512, 512);
      const Homography h = homography_from_params(p, canon);
      std::vector<Eigen::Vector2d> src{{0.0, 0.0},
                                       {511.0, 0.0},
                                       {511.0, 511.0},
                                       {0.0, 511.0}};
      std::vector<Eigen::Vector2d> dst;
      for (const auto& s : src) {
        const auto q = project_point(h, s);
        if (!q) {
          max_fro = std::numeric_limits<double>::infinity();
          break;
        }
        dst.push_back(*q);
      }
      if (dst.size() != src.size()) continue;
      const Homography fitted = fit_homography_dlt(src, dst);
      max_fro = std::max(max_fro, (fitted.matrix() - h.matrix()).norm());
      const ParamRecovery rec = params_from_homography(fitted, 512, 512, canon,
                                                       1e-4);
      if (!rec.in_family) {
        max_param = std::numeric_limits<double>::infinity();
        continue;
      }
      max_param =
          std::max({max_param, std::abs(rec.params.fov_deg - p.fov_deg),
                    std::abs(rec.params.phi_deg - p.phi_deg),
                    std::abs(rec.params.psi_deg - p.psi_deg)});
    }
    bound_check(r, "dlt_vs_closed_form_fro", max_fro, 1e-6);
    bound_check(r, "dlt_param_recovery_deg", max_param, 1e-5);
  }
  {
    Rng rng(mix_seed(seed, 0x6e04ull));
    double max_err = 0.0;
    for (int i = 0; i < 25; ++i) {
      const CameraParams p = random_family_params(rng, 512, 512);
      const Homography h = homography_from_params(p, canon);
      const Homography hi = h.inverse();
      for (int gy = 0; gy < 5; ++gy)
        for (int gx = 0; gx < 5; ++gx) {
          const Eigen::Vector2d pt(gx * 511.0 / 4.0, gy * 511.0 / 4.0);
          const auto fwd = project_point(h, pt);
          if (!fwd) continue;
          const auto back = project_point(hi, *fwd);
          if (!back) continue;
          max_err = std::max(max_err, (*back - pt).norm());
        }
    }
    bound_check(r, "project_round_trip_px", max_err, 1e-8);
  }
  return r;
}

SuiteReport verify_warp(std::uint64_t seed) {
  SuiteReport r;
  r.suite = "warp";
  const int size = 256;
  const CameraParams canon = CameraParams::canonical(size);
  const ImageRaster smooth = make_smooth_image(mix_seed(seed, 0x77a1ull), size);

  {
    WarpSpec spec{Homography(), size, size};
    const ImageRaster out = warp_image(smooth, spec);
    double max_diff = 0.0;
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x) {
        if (!out.valid(x, y)) continue;
        for (int c = 0; c < 3; ++c)
          max_diff = std::max(max_diff,
                              std::abs(out.at(x, y, c) - smooth.at(x, y, c)));
      }
    bound_check(r, "identity_warp_max_abs", max_diff, 0.0);
  }
  {
    Rng rng(mix_seed(seed, 0x77a2ull));
    const ImageRaster flat = ImageRaster::constant(size, size, 3, 0.5);
    double max_diff = 0.0;
    for (int i = 0; i < 5; ++i) {
      const CameraParams p = random_family_params(rng, size, size);
      const Homography h = homography_from_params(p, canon);
      const ImageRaster out = warp_image(flat, {h.inverse(), size, size});
      for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
          if (!out.valid(x, y)) continue;
          for (int c = 0; c < 3; ++c)
            max_diff = std::max(max_diff, std::abs(out.at(x, y, c) - 0.5));
        }
    }
    bound_check(r, "constant_fixed_point_max_abs", max_diff, 1e-12);
  }
  {
    Rng rng(mix_seed(seed, 0x77a3ull));
    double min_psnr = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 10; ++i) {
      const CameraParams p = random_family_params(rng, size, size);
      const Homography h = homography_from_params(p, canon);
      const ImageRaster view = warp_image(smooth, {h.inverse(), size, size});
      const ImageRaster back = warp_image(view, {h, size, size});
      min_psnr = std::min(min_psnr, psnr_masked(smooth, back));
    }
    floor_check(r, "round_trip_min_psnr_db", min_psnr, 30.0);
  }
  {
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const CameraParams p = draw_warp_params(mix_seed(seed, 0x77a4ull, i), size);
      worst = std::max({worst, std::max(0.0, kWarpFovLo - p.fov_deg),
                        std::max(0.0, p.fov_deg - kWarpFovHi),
                        std::max(0.0, std::abs(p.phi_deg) - kWarpRotHi),
                        std::max(0.0, std::abs(p.psi_deg) - kWarpRotHi)});
    }
    bound_check(r, "random_warp_param_box_violation_deg", worst, 0.0);
  }
  {
    const std::uint64_t s = mix_seed(seed, 0x77a5ull);
    const RandomWarp a = random_warp(smooth, s, size);
    const RandomWarp b = random_warp(smooth, s, size);
    const bool same = hash_raster(a.image) == hash_raster(b.image) &&
                      a.params.fov_deg == b.params.fov_deg &&
                      a.params.phi_deg == b.params.phi_deg &&
                      a.params.psi_deg == b.params.psi_deg;
    bound_check(r, "random_warp_determinism_mismatch", same ? 0.0 : 1.0, 0.0);
  }
  {
    Rng rng(mix_seed(seed, 0x77a6ull));
    double min_psnr = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 5; ++i) {
      const RandomWarp rw = random_warp(smooth, rng.below(1u << 30), size);
      const Homography h = homography_from_params(rw.params, canon);
      const ImageRaster back = warp_image(rw.image, {h, size, size});
      min_psnr = std::min(min_psnr, psnr_masked(smooth, back));
    }
    floor_check(r, "random_warp_round_trip_min_psnr_db", min_psnr, 30.0);
  }
  {
    // invalid regions never bleed into valid outputs
    Rng rng(mix_seed(seed, 0x77a7ull));
    ImageRaster holed = smooth;
    for (int y = 60; y < 120; ++y)
      for (int x = 90; x < 170; ++x) {
        holed.mask[holed.pixel_index(x, y)] = 0;
        for (int c = 0; c < 3; ++c) holed.at(x, y, c) = 0.0;
      }
    double violations = 0.0;
    for (int i = 0; i < 5; ++i) {
      const CameraParams p = random_family_params(rng, size, size);
      const Homography h = homography_from_params(p, canon);
      const Homography hw = h.inverse();
      const ImageRaster out = warp_image(holed, {hw, size, size});
      const Homography back = hw.inverse();
      for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
          if (!out.valid(x, y)) continue;
          const auto src = project_point(back, Eigen::Vector2d(x, y));
          if (!src) {
            violations += 1.0;
            continue;
          }
          const int x0 = static_cast<int>(std::floor(src->x()));
          const int y0 = static_cast<int>(std::floor(src->y()));
          const double ax = src->x() - x0;
          const double ay = src->y() - y0;
          const double wts[4] = {(1 - ax) * (1 - ay), ax * (1 - ay),
                                 (1 - ax) * ay, ax * ay};
          const int xs[4] = {x0, x0 + 1, x0, x0 + 1};
          const int ys[4] = {y0, y0, y0 + 1, y0 + 1};
          for (int j = 0; j < 4; ++j) {
            if (wts[j] < 0.001) continue;
            if (!holed.in_bounds(xs[j], ys[j]) || !holed.valid(xs[j], ys[j]))
              violations += 1.0;
          }
        }
    }
    bound_check(r, "mask_monotone_violations", violations, 0.0);
  }
  return r;
}

SuiteReport verify_pano(std::uint64_t seed) {
  SuiteReport r;
  r.suite = "pano";
  PanoLayout layout;
  layout.view_size = 128;
  const int pw = 512;
  const int ph = 256;
  const SphereField field = SphereField::make(mix_seed(seed, 0x9a01ull));
  const ImageRaster pano = render_equirect(field, pw, ph);

  {
    const std::vector<ImageRaster> views = equirect_to_views(pano, layout);
    const ImageRaster stitched = views_to_equirect(views, layout, pw, ph);
    ImageRaster ref = pano;
    ImageRaster got = stitched;
    for (int y = 0; y < ph; ++y) {
      const double lat_deg = (0.5 - (y + 0.5) / ph) * 180.0;
      if (std::abs(lat_deg) <= 45.0) continue;
      for (int x = 0; x < pw; ++x) {
        ref.mask[ref.pixel_index(x, y)] = 0;
        got.mask[got.pixel_index(x, y)] = 0;
      }
    }
    floor_check(r, "slice_stitch_band_psnr_db", psnr_masked(ref, got), 30.0);
  }
  {
    // view i equals view 0 of the column-rolled panorama, bit for bit
    const int shift = pw / layout.num_views;
    double max_diff = 0.0;
    for (int i : {1, 3, 6}) {
      ImageRaster rolled = ImageRaster::zeros(pw, ph, pano.channels);
      for (int y = 0; y < ph; ++y)
        for (int x = 0; x < pw; ++x) {
          const int sx = (x + i * shift) % pw;
          rolled.mask[rolled.pixel_index(x, y)] =
              pano.mask[pano.pixel_index(sx, y)];
          for (int c = 0; c < pano.channels; ++c)
            rolled.at(x, y, c) = pano.at(sx, y, c);
        }
      const ImageRaster vi = equirect_to_view(pano, layout, i);
      const ImageRaster v0 = equirect_to_view(rolled, layout, 0);
      for (std::size_t j = 0; j < vi.data.size(); ++j)
        max_diff = std::max(max_diff, std::abs(vi.data[j] - v0.data[j]));
      for (std::size_t j = 0; j < vi.mask.size(); ++j)
        max_diff = std::max(max_diff,
                            std::abs(double(vi.mask[j]) - double(v0.mask[j])));
    }
    bound_check(r, "yaw_symmetry_slice_max_abs", max_diff, 0.0);
  }
  {
    const ImageRaster v0 = equirect_to_view(pano, layout, 0);
    const std::vector<ImageRaster> copies(8, v0);
    const ImageRaster stitched = views_to_equirect(copies, layout, pw, ph);
    const int period = pw / layout.num_views;
    double max_diff = 0.0;
    for (int y = 0; y < ph; ++y)
      for (int x = 0; x < pw; ++x) {
        const int x2 = (x + period) % pw;
        max_diff = std::max(
            max_diff, std::abs(double(stitched.mask[stitched.pixel_index(x, y)]) -
                               double(stitched.mask[stitched.pixel_index(x2, y)])));
        if (!stitched.valid(x, y) || !stitched.valid(x2, y)) continue;
        for (int c = 0; c < stitched.channels; ++c)
          max_diff = std::max(max_diff,
                              std::abs(stitched.at(x, y, c) - stitched.at(x2, y, c)));
      }
    bound_check(r, "stitch_eightfold_periodicity_max_abs", max_diff, 0.0);
  }
  {
    const CorrespondenceMap adj = build_correspondence(0, 1, layout);
    bound_check(r, "adjacent_center_row_fraction_err",
                std::abs(adj.center_row_visible_fraction() - 0.5),
                1.0 / layout.view_size);
    const CorrespondenceMap opp = build_correspondence(0, 4, layout);
    bound_check(r, "opposite_visible_fraction", opp.visible_fraction(), 0.0);
  }
  {
    double max_diff = 0.0;
    for (int k = 1; k < 8; ++k) {
      const CorrespondenceMap a = build_correspondence(2, 5, layout);
      const CorrespondenceMap b =
          build_correspondence((2 + k) % 8, (5 + k) % 8, layout);
      for (std::size_t i = 0; i < a.u.size(); ++i) {
        max_diff = std::max(max_diff, std::abs(a.u[i] - b.u[i]));
        max_diff = std::max(max_diff, std::abs(a.v[i] - b.v[i]));
        max_diff =
            std::max(max_diff, std::abs(double(a.visible[i]) - b.visible[i]));
      }
    }
    bound_check(r, "yaw_equivariance_maps_max_abs", max_diff, 0.0);
  }
  {
    double worst = 0.0;
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) {
        const double fij = build_correspondence(i, j, layout).visible_fraction();
        const double fji = build_correspondence(j, i, layout).visible_fraction();
        worst = std::max(worst, std::abs(fij - fji));
      }
    bound_check(r, "visibility_symmetry_max_abs", worst, 0.01);
  }
  {
    Rng rng(mix_seed(seed, 0x9a02ull));
    double max_err = 0.0;
    for (int i = 0; i < 3; ++i) {
      const CameraParams input = random_family_params(rng, 160, 120);
      for (int view = 0; view < 8; ++view) {
        const CorrespondenceMap map = build_correspondence(input, view, layout);
        const Homography h = homography_from_params(
            input, CameraParams::canonical(layout.view_size));
        const Eigen::Matrix3d fwd =
            pair_homography(0, view, layout).matrix().inverse() * h.matrix();
        const Homography source_to_target(fwd);
        for (int y = 0; y < map.height; y += 7)
          for (int x = 0; x < map.width; x += 7) {
            const std::size_t idx = map.index(x, y);
            if (!map.visible[idx]) continue;
            const auto back = project_point(
                source_to_target, Eigen::Vector2d(map.u[idx], map.v[idx]));
            if (!back) {
              max_err = std::numeric_limits<double>::infinity();
              continue;
            }
            max_err = std::max(
                max_err, (*back - Eigen::Vector2d(x, y)).norm());
          }
      }
    }
    bound_check(r, "correspondence_reprojection_px", max_err, 1e-6);
  }
  return r;
}

namespace {

// Second, naive evaluation of the attention equation: scalar loops over
// row-major weight copies, no shared code with caa_forward.
std::vector<double> naive_caa(const CaaTensors& t, const CorrespondenceMap& map,
                              bool reverse_neighbors) {
  const int d = t.dim;
  std::vector<double> wq(d * d), wk(d * d), wv(d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      wq[i * d + j] = t.w_q(i, j);
      wk[i * d + j] = t.w_k(i, j);
      wv[i * d + j] = t.w_v(i, j);
    }
  std::vector<double> out(
      static_cast<std::size_t>(t.target_width) * t.target_height * d, 0.0);
  const int half = t.k / 2;
  for (int y = 0; y < t.target_height; ++y)
    for (int x = 0; x < t.target_width; ++x) {
      const std::size_t pi = static_cast<std::size_t>(y) * t.target_width + x;
      if (!map.visible[map.index(x, y)]) continue;
      const long ax = std::lround(map.u[map.index(x, y)]);
      const long ay = std::lround(map.v[map.index(x, y)]);

      std::vector<double> q(d, 0.0);
      const double* ft = t.target_at(x, y);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) q[i] += wq[i * d + j] * ft[j];

      struct Entry {
        double logit;
        std::vector<double> value;
      };
      std::vector<Entry> entries;
      std::vector<std::pair<int, int>> order;
      for (int dy = -half; dy <= half; ++dy)
        for (int dx = -half; dx <= half; ++dx) order.emplace_back(dy, dx);
      if (reverse_neighbors) std::reverse(order.begin(), order.end());

      for (const auto& [dy, dx] : order) {
        const long sx = ax + dx;
        const long sy = ay + dy;
        if (sx < 0 || sx >= t.source_width || sy < 0 || sy >= t.source_height)
          continue;
        const double* fs = t.source_at(static_cast<int>(sx),
                                       static_cast<int>(sy));
        Entry e;
        e.logit = 0.0;
        for (int i = 0; i < d; ++i) {
          double ki = 0.0;
          for (int j = 0; j < d; ++j) ki += wk[i * d + j] * fs[j];
          e.logit += q[i] * ki;
        }
        e.logit *= t.logit_scale;
        e.value.assign(d, 0.0);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) e.value[i] += wv[i * d + j] * fs[j];
        entries.push_back(std::move(e));
      }
      if (entries.empty()) continue;
      double m = entries[0].logit;
      for (const auto& e : entries) m = std::max(m, e.logit);
      double denom = 0.0;
      for (const auto& e : entries) denom += std::exp(e.logit - m);
      for (const auto& e : entries) {
        const double a = std::exp(e.logit - m) / denom;
        for (int i = 0; i < d; ++i) out[pi * d + i] += a * e.value[i];
      }
    }
  return out;
}

CorrespondenceMap random_map(Rng& rng, int tw, int th, int sw, int sh,
                             double visible_prob) {
  CorrespondenceMap map;
  map.width = tw;
  map.height = th;
  map.source_width = sw;
  map.source_height = sh;
  map.source_id = 0;
  map.target_id = 1;
  const std::size_t n = static_cast<std::size_t>(tw) * th;
  map.u.assign(n, 0.0);
  map.v.assign(n, 0.0);
  map.visible.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.uniform() >= visible_prob) continue;
    map.visible[i] = 1;
    map.u[i] = rng.uniform(0.0, sw - 1.0);
    map.v[i] = rng.uniform(0.0, sh - 1.0);
  }
  return map;
}

CaaTensors random_tensors(Rng& rng, int tw, int th, int sw, int sh, int d,
                          int k) {
  CaaTensors t;
  t.target_width = tw;
  t.target_height = th;
  t.source_width = sw;
  t.source_height = sh;
  t.dim = d;
  t.k = k;
  t.target_features.resize(static_cast<std::size_t>(tw) * th * d);
  t.source_features.resize(static_cast<std::size_t>(sw) * sh * d);
  for (double& f : t.target_features) f = rng.normal();
  for (double& f : t.source_features) f = rng.normal();
  t.w_q.resize(d, d);
  t.w_k.resize(d, d);
  t.w_v.resize(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      t.w_q(i, j) = 0.7 * rng.normal();
      t.w_k(i, j) = 0.7 * rng.normal();
      t.w_v(i, j) = 0.7 * rng.normal();
    }
  return t;
}

double caa_loss(const CaaTensors& t, const CorrespondenceMap& map,
                const std::vector<double>& upstream) {
  const CaaOutput out = caa_forward(t, map);
  double loss = 0.0;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    loss += upstream[i] * out.values[i];
  return loss;
}

}  // namespace

SuiteReport verify_caa(std::uint64_t seed) {
  SuiteReport r;
  r.suite = "caa";

  {
    Rng rng(mix_seed(seed, 0xca01ull));
    double max_diff = 0.0;
    double max_rev_diff = 0.0;
    for (int ts : {1, 2, 3, 5, 8})
      for (int ss : {1, 3, 8})
        for (int d : {1, 2, 3, 4})
          for (int k : {1, 3, 5}) {
            const CorrespondenceMap map = random_map(rng, ts, ts, ss, ss, 0.85);
            const CaaTensors t = random_tensors(rng, ts, ts, ss, ss, d, k);
            const CaaOutput out = caa_forward(t, map);
            const std::vector<double> naive = naive_caa(t, map, false);
            const std::vector<double> naive_rev = naive_caa(t, map, true);
            for (std::size_t i = 0; i < out.values.size(); ++i) {
              max_diff = std::max(max_diff, std::abs(out.values[i] - naive[i]));
              max_rev_diff =
                  std::max(max_rev_diff, std::abs(out.values[i] - naive_rev[i]));
            }
          }
    bound_check(r, "oracle_sweep_max_abs", max_diff, 1e-12);
    bound_check(r, "neighbor_permutation_max_abs", max_rev_diff, 1e-12);
  }
  {
    Rng rng(mix_seed(seed, 0xca02ull));
    const CorrespondenceMap map = random_map(rng, 4, 4, 6, 6, 1.0);
    CaaTensors t = random_tensors(rng, 4, 4, 6, 6, 3, 1);
    const CaaOutput out = caa_forward(t, map);
    double max_diff = 0.0;
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x) {
        const std::size_t idx = map.index(x, y);
        const int sx = static_cast<int>(std::lround(map.u[idx]));
        const int sy = static_cast<int>(std::lround(map.v[idx]));
        const Eigen::VectorXd expect =
            t.w_v * Eigen::Map<const Eigen::VectorXd>(t.source_at(sx, sy), 3);
        for (int c = 0; c < 3; ++c)
          max_diff = std::max(max_diff,
                              std::abs(out.at(x, y)[c] - expect[c]));
      }
    bound_check(r, "k1_degenerate_max_abs", max_diff, 0.0);
  }
  {
    // zero key matrix makes every logit zero: softmax must be uniform
    Rng rng(mix_seed(seed, 0xca03ull));
    const CorrespondenceMap map = random_map(rng, 5, 5, 8, 8, 1.0);
    CaaTensors t = random_tensors(rng, 5, 5, 8, 8, 3, 3);
    t.w_k.setZero();
    const CaaOutput out = caa_forward(t, map);
    double max_diff = 0.0;
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 5; ++x) {
        const Neighborhood nb = gather_neighborhood(map, x, y, t.k);
        if (!nb.visible) continue;
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
        int n = 0;
        for (std::size_t j = 0; j < nb.positions.size(); ++j) {
          if (!nb.valid[j]) continue;
          mean += t.w_v * Eigen::Map<const Eigen::VectorXd>(
                              t.source_at(nb.positions[j].x(),
                                          nb.positions[j].y()),
                              3);
          ++n;
        }
        if (n == 0) continue;
        mean /= n;
        for (int c = 0; c < 3; ++c)
          max_diff =
              std::max(max_diff, std::abs(out.at(x, y)[c] - mean[c]));
      }
    bound_check(r, "uniform_key_average_max_abs", max_diff, 1e-12);
  }
  {
    Rng rng(mix_seed(seed, 0xca04ull));
    double max_shift = 0.0;
    double max_sum = 0.0;
    for (int i = 0; i < 50; ++i) {
      const int n = 1 + static_cast<int>(rng.below(24));
      std::vector<double> logits(n);
      for (double& l : logits) l = rng.uniform(-30.0, 30.0);
      const std::vector<double> a = stable_softmax(logits);
      double sum = 0.0;
      for (double v : a) sum += v;
      max_sum = std::max(max_sum, std::abs(sum - 1.0));
      const double c = rng.uniform(-100.0, 100.0);
      std::vector<double> shifted = logits;
      for (double& l : shifted) l += c;
      const std::vector<double> b = stable_softmax(shifted);
      for (int j = 0; j < n; ++j)
        max_shift = std::max(max_shift, std::abs(a[j] - b[j]));
    }
    bound_check(r, "softmax_shift_invariance_max_abs", max_shift, 1e-12);
    bound_check(r, "softmax_sum_to_one_max_abs", max_sum, 1e-12);
  }
  {
    Rng rng(mix_seed(seed, 0xca05ull));
    const CorrespondenceMap map = random_map(rng, 4, 4, 5, 5, 0.9);
    const CaaTensors t = random_tensors(rng, 4, 4, 5, 5, 3, 3);
    std::vector<double> zero(4 * 4 * 3, 0.0);
    const CaaGradients g = caa_backward(t, map, zero);
    double max_abs = std::max(
        {g.d_w_q.cwiseAbs().maxCoeff(), g.d_w_k.cwiseAbs().maxCoeff(),
         g.d_w_v.cwiseAbs().maxCoeff()});
    for (double v : g.d_target) max_abs = std::max(max_abs, std::abs(v));
    for (double v : g.d_source) max_abs = std::max(max_abs, std::abs(v));
    bound_check(r, "zero_upstream_zero_grads", max_abs, 0.0);
  }
  {
    // K = 1 backward: source grad is exactly W_V^T times upstream
    Rng rng(mix_seed(seed, 0xca06ull));
    const CorrespondenceMap map = random_map(rng, 3, 3, 7, 7, 1.0);
    const CaaTensors t = random_tensors(rng, 3, 3, 7, 7, 2, 1);
    std::vector<double> upstream(3 * 3 * 2);
    for (double& u : upstream) u = rng.normal();
    const CaaGradients g = caa_backward(t, map, upstream);
    std::vector<double> expect(t.source_features.size(), 0.0);
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 3; ++x) {
        const std::size_t idx = map.index(x, y);
        const int sx = static_cast<int>(std::lround(map.u[idx]));
        const int sy = static_cast<int>(std::lround(map.v[idx]));
        const Eigen::Map<const Eigen::VectorXd> gu(
            upstream.data() + (static_cast<std::size_t>(y) * 3 + x) * 2, 2);
        const Eigen::VectorXd add = t.w_v.transpose() * gu;
        for (int c = 0; c < 2; ++c)
          expect[(static_cast<std::size_t>(sy) * 7 + sx) * 2 + c] += add[c];
      }
    double max_diff = 0.0;
    double max_q_grad = 0.0;
    for (std::size_t i = 0; i < expect.size(); ++i)
      max_diff = std::max(max_diff, std::abs(g.d_source[i] - expect[i]));
    max_q_grad = std::max(g.d_w_q.cwiseAbs().maxCoeff(),
                          g.d_w_k.cwiseAbs().maxCoeff());
    for (double v : g.d_target) max_q_grad = std::max(max_q_grad, std::abs(v));
    bound_check(r, "k1_backward_value_path_max_abs", max_diff, 0.0);
    bound_check(r, "k1_backward_logit_path_max_abs", max_q_grad, 0.0);
  }
  {
    double max_rel = 0.0;
    const double h = 1e-5;
    for (int s = 0; s < 20; ++s) {
      Rng rng(mix_seed(seed, 0xca07ull, s));
      const int k = s % 3 == 0 ? 1 : (s % 3 == 1 ? 3 : 5);
      const CorrespondenceMap map = random_map(rng, 4, 4, 5, 5, 0.85);
      CaaTensors t = random_tensors(rng, 4, 4, 5, 5, 3, k);
      std::vector<double> upstream(4 * 4 * 3);
      for (double& u : upstream) u = rng.normal();
      const CaaGradients g = caa_backward(t, map, upstream);

      auto check_param = [&](double* p, double analytic) {
        const double orig = *p;
        *p = orig + h;
        const double lp = caa_loss(t, map, upstream);
        *p = orig - h;
        const double lm = caa_loss(t, map, upstream);
        *p = orig;
        const double fd = (lp - lm) / (2.0 * h);
        const double rel = std::abs(analytic - fd) /
                           std::max({1e-4, std::abs(analytic), std::abs(fd)});
        max_rel = std::max(max_rel, rel);
      };

      for (std::size_t i = 0; i < t.target_features.size(); ++i)
        check_param(&t.target_features[i], g.d_target[i]);
      for (std::size_t i = 0; i < t.source_features.size(); ++i)
        check_param(&t.source_features[i], g.d_source[i]);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          check_param(&t.w_q(i, j), g.d_w_q(i, j));
          check_param(&t.w_k(i, j), g.d_w_k(i, j));
          check_param(&t.w_v(i, j), g.d_w_v(i, j));
        }
    }
    bound_check(r, "gradcheck_max_rel_err", max_rel, 1e-4);
  }
  {
    Rng rng1(mix_seed(seed, 0xca08ull));
    Rng rng2(mix_seed(seed, 0xca08ull));
    const CorrespondenceMap m1 = random_map(rng1, 6, 6, 6, 6, 0.9);
    const CorrespondenceMap m2 = random_map(rng2, 6, 6, 6, 6, 0.9);
    const CaaTensors t1 = random_tensors(rng1, 6, 6, 6, 6, 4, 3);
    const CaaTensors t2 = random_tensors(rng2, 6, 6, 6, 6, 4, 3);
    std::vector<double> up1(6 * 6 * 4), up2(6 * 6 * 4);
    for (double& u : up1) u = rng1.normal();
    for (double& u : up2) u = rng2.normal();
    const CaaGradients g1 = caa_backward(t1, m1, up1);
    const CaaGradients g2 = caa_backward(t2, m2, up2);
    const bool same =
        fnv1a64_span(g1.d_target) == fnv1a64_span(g2.d_target) &&
        fnv1a64_span(g1.d_source) == fnv1a64_span(g2.d_source) &&
        g1.d_w_q == g2.d_w_q && g1.d_w_k == g2.d_w_k && g1.d_w_v == g2.d_w_v;
    bound_check(r, "backward_determinism_mismatch", same ? 0.0 : 1.0, 0.0);
  }
  return r;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"geometry", "warp", "pano",
                                                 "caa"};
  return names;
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
  if (name == "geometry") return verify_geometry(seed);
  if (name == "warp") return verify_warp(seed);
  if (name == "pano") return verify_pano(seed);
  if (name == "caa") return verify_caa(seed);
  throw std::invalid_argument("unknown verify suite: " + name);
}

std::string format_report(const SuiteReport& report) {
  std::string out = "suite " + report.suite + "\n";
  char line[256];
  for (const auto& c : report.checks) {
    std::snprintf(line, sizeof(line), "  %-42s observed %.17g tol %.17g %s\n",
                  c.name.c_str(), c.observed, c.tol,
                  c.pass ? "PASS" : "FAIL");
    out += line;
  }
  out += report.all_pass() ? "suite PASS\n" : "suite FAIL\n";
  return out;
}

}  // namespace panogeo
