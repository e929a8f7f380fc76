#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "panogeo/dataset.hpp"
#include "panogeo/hashing.hpp"
#include "panogeo/json_io.hpp"
#include "panogeo/pano.hpp"
#include "panogeo/png_io.hpp"
#include "panogeo/synth.hpp"

using namespace panogeo;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str(const std::string& sub = "") const {
    return (sub.empty() ? path : path / sub).string();
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  return std::string((std::istreambuf_iterator<char>(f)), {});
}

// order-independent content hash of the data files under a directory; the
// config echo is skipped because it records the differing --out path
std::uint64_t hash_tree(const fs::path& root) {
  std::vector<std::pair<std::string, std::uint64_t>> entries;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() &&
        !e.path().filename().string().ends_with("-config.json")) {
      const std::string rel = fs::relative(e.path(), root).generic_string();
      const std::string bytes = slurp(e.path());
      entries.emplace_back(rel, fnv1a64_str(bytes));
    }
  std::sort(entries.begin(), entries.end());
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& [rel, hv] : entries) {
    h = fnv1a64_str(rel, h);
    h = fnv1a64(&hv, sizeof(hv), h);
  }
  REQUIRE(!entries.empty());
  return h;
}

}  // namespace

TEST_CASE("usage problems exit with code 1") {
  CHECK(run_cli({}) == 1);
  CHECK(run_cli({"no-such-command"}) == 1);
  CHECK(run_cli({"verify", "no-such-suite"}) == 1);
  // gen-dataset wants exactly one input source
  TempDir td("pg_cli_usage");
  CHECK(run_cli({"gen-dataset", "--out", td.str("o")}) == 1);
  CHECK(run_cli({"gen-dataset", "--synth", "1", "--panos", td.str(),
                 "--out", td.str("o")}) == 1);
  // unwarp with neither params, model, nor sidecar
  write_png(td.str("img.png"), make_smooth_image(1u, 32));
  CHECK(run_cli({"unwarp", "--image", td.str("img.png"), "--out",
                 td.str("o")}) == 1);
}

TEST_CASE("missing data exits with code 2") {
  TempDir td("pg_cli_data");
  CHECK(run_cli({"train", "--manifest", td.str("absent.jsonl"), "--out",
                 td.str("o")}) == 2);
  CHECK(run_cli({"unwarp", "--image", td.str("absent.png"), "--params",
                 td.str("absent.json"), "--out", td.str("o")}) == 2);
}

TEST_CASE("gen-dataset writes a loadable manifest and echoes its config") {
  TempDir td("pg_cli_gen");
  CHECK(run_cli({"gen-dataset", "--synth", "1", "--size", "32",
                 "--n-per-pano", "2", "--seed", "3", "--out", td.str("ds")}) ==
        0);
  const json echo = json::parse(slurp(td.path / "ds" / "gen-dataset-config.json"));
  CHECK(echo.at("command") == "gen-dataset");
  CHECK(echo.at("synth") == 1);
  CHECK(echo.at("size") == 32);
  CHECK(echo.at("n_per_pano") == 2);
  CHECK(echo.at("seed") == 3);

  const auto entries = load_manifest(td.path / "ds" / "manifest.jsonl");
  CHECK(entries.size() == 16);  // 8 views x 2 warps
  for (const auto& e : entries) {
    const ImageRaster img = read_png(e.image.string());
    CHECK(img.width == 32);
    const CameraParams p = load_params_sidecar(e.params);
    CHECK(p.fov_deg >= kWarpFovLo);
    CHECK(p.fov_deg <= kWarpFovHi);
    CHECK(p.width == 32);
  }
}

TEST_CASE("same-seed dataset runs are byte-identical, reseeded ones differ") {
  TempDir td("pg_cli_det");
  const std::vector<std::string> base = {"gen-dataset", "--synth", "1",
                                         "--size",      "32",      "--n-per-pano",
                                         "1",           "--seed",  "9"};
  auto with_out = [&](const std::string& out) {
    std::vector<std::string> a = base;
    a.push_back("--out");
    a.push_back(td.str(out));
    return a;
  };
  REQUIRE(run_cli(with_out("a")) == 0);
  REQUIRE(run_cli(with_out("b")) == 0);
  CHECK(hash_tree(td.path / "a") == hash_tree(td.path / "b"));

  std::vector<std::string> other = with_out("c");
  other[8] = "10";  // --seed value
  REQUIRE(run_cli(other) == 0);
  CHECK(hash_tree(td.path / "a") != hash_tree(td.path / "c"));
}

TEST_CASE("config files fill unset flags and the command line wins") {
  TempDir td("pg_cli_cfg");
  REQUIRE(run_cli({"gen-dataset", "--synth", "1", "--size", "32",
                   "--n-per-pano", "1", "--seed", "4", "--out",
                   td.str("ds")}) == 0);
  {
    std::ofstream f(td.path / "train.json");
    f << R"({"epochs": 2, "input_size": 32, "learning_rate": 0.001})";
  }
  REQUIRE(run_cli({"train", "--manifest", td.str("ds/manifest.jsonl"),
                   "--config", td.str("train.json"), "--epochs", "1", "--out",
                   td.str("run")}) == 0);
  const json echo = json::parse(slurp(td.path / "run" / "train-config.json"));
  CHECK(echo.at("epochs") == 1);               // flag beats config
  CHECK(echo.at("input_size") == 32);          // config beats default
  CHECK(echo.at("learning_rate") == 0.001);
  CHECK(echo.at("batch_size") == 32);          // untouched default
  CHECK(fs::exists(td.path / "run" / "model-ce.cfde"));
  const json log = json::parse(slurp(td.path / "run" / "train-log-ce.json"));
  CHECK(log.at("epoch_loss").size() == 1);
  CHECK(log.at("n_samples") == 8);
}

TEST_CASE("train, eval, and unwarp via a model work end to end") {
  TempDir td("pg_cli_e2e");
  REQUIRE(run_cli({"gen-dataset", "--synth", "1", "--size", "32",
                   "--n-per-pano", "2", "--seed", "5", "--out",
                   td.str("ds")}) == 0);
  REQUIRE(run_cli({"train", "--manifest", td.str("ds/manifest.jsonl"),
                   "--epochs", "2", "--input-size", "32", "--out",
                   td.str("run")}) == 0);
  REQUIRE(run_cli({"eval", "--manifest", td.str("ds/manifest.jsonl"),
                   "--model", td.str("run/model-ce.cfde"), "--out",
                   td.str("ev")}) == 0);
  const json rep = json::parse(slurp(td.path / "ev" / "eval-report.json"));
  REQUIRE(rep.at("rows").size() == 1);
  CHECK(rep.at("rows")[0].at("objective") == "ce");
  CHECK(rep.at("rows")[0].at("n") == 16);
  CHECK(rep.at("rows")[0].at("mae_fov").get<double>() >= 0.0);
  CHECK(rep.at("reference").at("binding") == false);
  CHECK(fs::exists(td.path / "ev" / "errors-model-ce.csv"));

  // prediction-driven unwarp emits the full artifact set
  const auto img0 = load_manifest(td.path / "ds" / "manifest.jsonl")[0].image;
  REQUIRE(run_cli({"unwarp", "--image", img0.string(), "--model",
                   td.str("run/model-ce.cfde"), "--canonical-size", "32",
                   "--out", td.str("uw")}) == 0);
  const std::string stem = img0.stem().string();
  CHECK(fs::exists(td.path / "uw" / (stem + "_canonical.png")));
  CHECK(fs::exists(td.path / "uw" / (stem + "_inpaint_mask.png")));
  const json hj = load_json(td.path / "uw" / (stem + "_homography.json"));
  CHECK(hj.size() == 9);
  CHECK(hj[8] == 1.0);
}

TEST_CASE("unwarping a canonical image is the identity") {
  TempDir td("pg_cli_id");
  const ImageRaster img = make_smooth_image(12u, 64);
  write_png(td.str("cano.png"), img);
  const CameraParams p = CameraParams::canonical(64);
  save_params_sidecar(td.path / "cano.params.json", p);
  // sidecar autodiscovery, no explicit --params
  REQUIRE(run_cli({"unwarp", "--image", td.str("cano.png"),
                   "--canonical-size", "64", "--out", td.str("out")}) == 0);
  CHECK(slurp(td.path / "out" / "cano_canonical.png") ==
        slurp(td.path / "cano.png"));
  // fully valid mask: every byte of the inpaint mask is zero
  const ImageRaster mask =
      read_png(td.str("out/cano_inpaint_mask.png"));
  for (double v : mask.data) CHECK(v == 0.0);
}

TEST_CASE("correspondences reports coverage per view") {
  TempDir td("pg_cli_corr");
  CameraParams p = CameraParams::canonical(64);
  save_params_sidecar(td.path / "in.params.json", p);
  REQUIRE(run_cli({"correspondences", "--params", td.str("in.params.json"),
                   "--view-size", "64", "--out", td.str("out")}) == 0);
  for (int v = 0; v < 8; ++v)
    CHECK(fs::exists(td.path / "out" / ("corr_v" + std::to_string(v) + ".cmap")));
  const json cov = load_json(td.path / "out" / "coverage.json");
  REQUIRE(cov.at("views").size() == 8);
  CHECK(cov.at("views")[0].at("visible_fraction").get<double>() == 1.0);
  const double f1 = cov.at("views")[1].at("visible_fraction").get<double>();
  CHECK(f1 > 0.4);
  CHECK(f1 < 0.6);
  CHECK(cov.at("views")[4].at("visible_fraction").get<double>() == 0.0);

  const CorrespondenceMap m =
      load_cmap(td.path / "out" / "corr_v1.cmap", 64, 64);
  CHECK(m.source_id == kInputViewId);
  CHECK(m.target_id == 1);
}

TEST_CASE("slice and stitch round trip through the CLI") {
  TempDir td("pg_cli_pano");
  const ImageRaster pano = render_equirect(SphereField::make(3u), 256, 128);
  write_png(td.str("pano.png"), pano);
  REQUIRE(run_cli({"slice", "--pano", td.str("pano.png"), "--view-size", "64",
                   "--out", td.str("views")}) == 0);
  for (int v = 0; v < 8; ++v)
    CHECK(fs::exists(td.path / "views" / ("view_" + std::to_string(v) + ".png")));
  REQUIRE(run_cli({"stitch", "--views", td.str("views"), "--width", "256",
                   "--height", "128", "--out", td.str("re")}) == 0);
  CHECK(fs::exists(td.path / "re" / "pano.png"));
  CHECK(fs::exists(td.path / "re" / "pano_mask.png"));
  // stitching is lossy through 8-bit PNGs but must stay close on the band
  const ImageRaster a = read_png(td.str("pano.png"));
  ImageRaster b = read_png(td.str("re/pano.png"));
  const ImageRaster mask = read_png(td.str("re/pano_mask.png"));
  double err = 0.0;
  std::size_t n = 0;
  for (int y = 48; y < 80; ++y)
    for (int x = 0; x < 256; ++x) {
      if (mask.at(x, y, 0) != 0.0) continue;  // 0 marks valid in the inpaint convention
      for (int c = 0; c < 3; ++c) {
        err += std::abs(a.at(x, y, c) - b.at(x, y, c));
        ++n;
      }
    }
  REQUIRE(n > 0);
  CHECK(err / n < 0.02);

  // a non 2:1 pano is a data error
  write_png(td.str("bad.png"), make_smooth_image(2u, 64));
  CHECK(run_cli({"slice", "--pano", td.str("bad.png"), "--out",
                 td.str("v2")}) == 2);
}

TEST_CASE("verify subcommand writes a report and respects exit codes") {
  TempDir td("pg_cli_verify");
  CHECK(run_cli({"verify", "geometry", "--seed", "1", "--out",
                 td.str("rep")}) == 0);
  const json rep = load_json(td.path / "rep" / "verify-report.json");
  REQUIRE(rep.at("reports").size() == 1);
  CHECK(rep.at("reports")[0].at("suite") == "geometry");
  CHECK(rep.at("reports")[0].at("all_pass") == true);
  for (const auto& c : rep.at("reports")[0].at("checks")) {
    CHECK(c.at("pass") == true);
    CHECK(c.contains("observed"));
    CHECK(c.contains("tol"));
  }
  CHECK(rep.at("all_pass") == true);
}

TEST_CASE("caa-check passes its gradient audit") {
  CHECK(run_cli({"caa-check", "--seed", "2"}) == 0);
}
