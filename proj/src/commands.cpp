#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "panogeo/caa.hpp"
#include "panogeo/dataset.hpp"
#include "panogeo/estimator.hpp"
#include "panogeo/geometry.hpp"
#include "panogeo/json_io.hpp"
#include "panogeo/metrics.hpp"
#include "panogeo/pano.hpp"
#include "panogeo/png_io.hpp"
#include "panogeo/raster.hpp"
#include "panogeo/rng.hpp"
#include "panogeo/synth.hpp"
#include "panogeo/verify.hpp"

namespace panogeo {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Exit code 1; anything else escaping a handler is a data error (2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  json cfg = load_json(path);
  if (!cfg.is_object())
    throw std::runtime_error("config: " + path + " must hold a JSON object");
  return cfg;
}

// Config-file values fill in options the user did not pass on the command
// line; explicit flags always win. Unknown config keys are ignored so a
// resolved-config echo can be replayed directly.
template <typename T>
void merge_cfg(const json& cfg, const CLI::App& sub, const char* flag,
               const char* key, T& field) {
  if (cfg.contains(key) && sub.count(flag) == 0) field = cfg.at(key).get<T>();
}

void write_echo(const fs::path& out_dir, const std::string& command,
                const json& resolved) {
  save_json(out_dir / (command + "-config.json"), resolved);
}

fs::path require_out(const std::string& out) {
  if (out.empty()) throw UsageError("--out is required");
  const fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------------------
// gen-dataset

struct GenDatasetOpts {
  std::string config;
  std::string panos;
  int synth = 0;
  std::string out;
  int n_per_pano = 4;
  int size = 512;
  std::uint64_t seed = 0;
};

int cmd_gen_dataset(const CLI::App& sub, GenDatasetOpts opt) {
  const json cfg = load_config_file(opt.config);
  merge_cfg(cfg, sub, "--panos", "panos", opt.panos);
  merge_cfg(cfg, sub, "--synth", "synth", opt.synth);
  merge_cfg(cfg, sub, "--out", "out", opt.out);
  merge_cfg(cfg, sub, "--n-per-pano", "n_per_pano", opt.n_per_pano);
  merge_cfg(cfg, sub, "--size", "size", opt.size);
  merge_cfg(cfg, sub, "--seed", "seed", opt.seed);

  if (opt.panos.empty() && opt.synth <= 0)
    throw UsageError("gen-dataset: give --panos <dir> or --synth <count>");
  if (!opt.panos.empty() && opt.synth > 0)
    throw UsageError("gen-dataset: --panos and --synth are mutually exclusive");
  if (opt.n_per_pano <= 0 || opt.size <= 0)
    throw UsageError("gen-dataset: --n-per-pano and --size must be positive");
  const fs::path out_dir = require_out(opt.out);

  PanoLayout layout;
  layout.view_size = opt.size;

  // Source panoramas as (stem, loader) pairs; loaders run one at a time so
  // only a single panorama is resident.
  struct PanoSource {
    std::string stem;
    std::function<ImageRaster()> load;
  };
  std::vector<PanoSource> sources;
  if (opt.synth > 0) {
    for (int p = 0; p < opt.synth; ++p) {
      char stem[32];
      std::snprintf(stem, sizeof stem, "synth%03d", p);
      const std::uint64_t field_seed = mix_seed(opt.seed, 0xa0ull, p);
      const int w = 4 * opt.size, h = 2 * opt.size;
      sources.push_back({stem, [field_seed, w, h] {
                           return render_equirect(SphereField::make(field_seed),
                                                  w, h);
                         }});
    }
  } else {
    std::vector<fs::path> files;
    if (!fs::is_directory(opt.panos))
      throw std::runtime_error("gen-dataset: not a directory: " + opt.panos);
    for (const auto& e : fs::directory_iterator(opt.panos))
      if (e.is_regular_file() && e.path().extension() == ".png")
        files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files)
      sources.push_back({f.stem().string(), [f] { return read_png(f.string()); }});
  }

  std::vector<DatasetEntry> entries;
  std::size_t pano_index = 0;
  for (const PanoSource& src : sources) {
    const std::uint64_t p = pano_index++;
    ImageRaster pano;
    try {
      pano = src.load();
    } catch (const std::exception& e) {
      std::cerr << "gen-dataset: skipping " << src.stem << ": " << e.what()
                << "\n";
      continue;
    }
    std::vector<ImageRaster> views;
    if (pano.width == 2 * pano.height) {
      views = equirect_to_views(pano, layout);
    } else if (pano.width == pano.height) {
      views.push_back(std::move(pano));  // pre-sliced perspective view
    } else {
      std::cerr << "gen-dataset: skipping " << src.stem
                << ": expected a 2:1 panorama or a square view, got "
                << pano.width << "x" << pano.height << "\n";
      continue;
    }
    for (std::size_t i = 0; i < views.size(); ++i) {
      for (int j = 0; j < opt.n_per_pano; ++j) {
        const RandomWarp rw =
            random_warp(views[i], mix_seed(opt.seed, p, i, j), opt.size);
        char name[128];
        std::snprintf(name, sizeof name, "%s_v%zu_w%02d", src.stem.c_str(), i, j);
        const fs::path img_path = out_dir / (std::string(name) + ".png");
        const fs::path par_path = out_dir / (std::string(name) + ".params.json");
        write_png(img_path.string(), rw.image);
        save_params_sidecar(par_path, rw.params);
        entries.push_back({img_path, par_path});
      }
    }
  }

  if (entries.empty())
    throw std::runtime_error("gen-dataset: no usable panoramas, nothing written");
  save_manifest(out_dir / "manifest.jsonl", entries);

  json resolved = {{"command", "gen-dataset"}, {"panos", opt.panos},
                   {"synth", opt.synth},       {"out", opt.out},
                   {"n_per_pano", opt.n_per_pano}, {"size", opt.size},
                   {"seed", opt.seed}};
  write_echo(out_dir, "gen-dataset", resolved);
  std::cout << "gen-dataset: wrote " << entries.size() << " images to "
            << out_dir.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainOpts {
  std::string config;
  std::string manifest;
  std::string out;
  std::string objective = "ce";
  int epochs = 30;
  int batch_size = 32;
  double learning_rate = 2e-4;
  double momentum = 0.9;
  double val_fraction = 0.1;
  int input_size = 128;
  std::vector<int> hidden = {256, 128, 64};
  std::uint64_t seed = 0;
  std::uint64_t extractor_seed = FeatureExtractor::kDefaultSeed;
};

Objective parse_objective(const std::string& s) {
  if (s == "ce") return Objective::kCrossEntropy;
  if (s == "mse") return Objective::kMse;
  throw UsageError("objective must be 'ce' or 'mse', got '" + s + "'");
}

int cmd_train(const CLI::App& sub, TrainOpts opt) {
  const json cfg = load_config_file(opt.config);
  merge_cfg(cfg, sub, "--manifest", "manifest", opt.manifest);
  merge_cfg(cfg, sub, "--out", "out", opt.out);
  merge_cfg(cfg, sub, "--objective", "objective", opt.objective);
  merge_cfg(cfg, sub, "--epochs", "epochs", opt.epochs);
  merge_cfg(cfg, sub, "--batch-size", "batch_size", opt.batch_size);
  merge_cfg(cfg, sub, "--lr", "learning_rate", opt.learning_rate);
  merge_cfg(cfg, sub, "--momentum", "momentum", opt.momentum);
  merge_cfg(cfg, sub, "--val-fraction", "val_fraction", opt.val_fraction);
  merge_cfg(cfg, sub, "--input-size", "input_size", opt.input_size);
  merge_cfg(cfg, sub, "--seed", "seed", opt.seed);
  merge_cfg(cfg, sub, "--extractor-seed", "extractor_seed", opt.extractor_seed);
  if (cfg.contains("hidden")) opt.hidden = cfg.at("hidden").get<std::vector<int>>();

  if (opt.manifest.empty()) throw UsageError("train: --manifest is required");
  const fs::path out_dir = require_out(opt.out);

  const std::vector<DatasetEntry> entries = load_manifest(opt.manifest);
  if (entries.empty())
    throw std::runtime_error("train: manifest has no entries: " + opt.manifest);
  const ManifestSamples samples(entries);

  TrainConfig tc;
  tc.objective = parse_objective(opt.objective);
  tc.epochs = opt.epochs;
  tc.batch_size = opt.batch_size;
  tc.learning_rate = opt.learning_rate;
  tc.momentum = opt.momentum;
  tc.val_fraction = opt.val_fraction;
  tc.input_size = opt.input_size;
  tc.hidden = opt.hidden;
  tc.seed = opt.seed;
  tc.extractor_seed = opt.extractor_seed;

  TrainLog log;
  const EstimatorModel model = train(samples, tc, &log);
  const fs::path model_path = out_dir / ("model-" + opt.objective + ".cfde");
  save_model(model_path, model);

  json jlog = {{"epoch_loss", log.epoch_loss},
               {"val_mae_sum", log.val_mae_sum},
               {"best_epoch", log.best_epoch},
               {"n_samples", entries.size()}};
  save_json(out_dir / ("train-log-" + opt.objective + ".json"), jlog);

  json resolved = {{"command", "train"},
                   {"manifest", opt.manifest},
                   {"out", opt.out},
                   {"objective", opt.objective},
                   {"epochs", opt.epochs},
                   {"batch_size", opt.batch_size},
                   {"learning_rate", opt.learning_rate},
                   {"momentum", opt.momentum},
                   {"val_fraction", opt.val_fraction},
                   {"input_size", opt.input_size},
                   {"hidden", opt.hidden},
                   {"seed", opt.seed},
                   {"extractor_seed", opt.extractor_seed}};
  write_echo(out_dir, "train", resolved);
  std::cout << "train: wrote " << model_path.string() << " (best epoch "
            << log.best_epoch << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOpts {
  std::string config;
  std::string manifest;
  std::vector<std::string> models;
  std::string out;
};

const char* objective_name(Objective o) {
  return o == Objective::kCrossEntropy ? "ce" : "mse";
}

int cmd_eval(const CLI::App& sub, EvalOpts opt) {
  const json cfg = load_config_file(opt.config);
  merge_cfg(cfg, sub, "--manifest", "manifest", opt.manifest);
  merge_cfg(cfg, sub, "--out", "out", opt.out);
  if (cfg.contains("models") && sub.count("--model") == 0)
    opt.models = cfg.at("models").get<std::vector<std::string>>();

  if (opt.manifest.empty()) throw UsageError("eval: --manifest is required");
  if (opt.models.empty()) throw UsageError("eval: at least one --model is required");
  const fs::path out_dir = require_out(opt.out);

  const std::vector<DatasetEntry> entries = load_manifest(opt.manifest);
  if (entries.empty())
    throw std::runtime_error("eval: manifest has no entries: " + opt.manifest);
  const ManifestSamples samples(entries);

  json rows = json::array();
  for (const std::string& model_path : opt.models) {
    const EstimatorModel model = load_model(model_path);
    const std::string stem = fs::path(model_path).stem().string();

    std::ofstream csv(out_dir / ("errors-" + stem + ".csv"));
    if (!csv) throw std::runtime_error("eval: cannot write per-sample CSV");
    csv << "index,image,fov_true,fov_pred,phi_true,phi_pred,psi_true,psi_pred,"
           "abs_err_fov,abs_err_phi,abs_err_psi\n";
    std::vector<double> e_fov, e_phi, e_psi;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const Sample s = samples.load(i);
      const PredictionResult pr = predict(model, s.image);
      const double ef = std::abs(pr.fov_deg - s.params.fov_deg);
      const double eh = std::abs(pr.phi_deg - s.params.phi_deg);
      const double es = std::abs(pr.psi_deg - s.params.psi_deg);
      e_fov.push_back(ef);
      e_phi.push_back(eh);
      e_psi.push_back(es);
      csv << i << ',' << entries[i].image.filename().string() << ','
          << s.params.fov_deg << ',' << pr.fov_deg << ',' << s.params.phi_deg
          << ',' << pr.phi_deg << ',' << s.params.psi_deg << ',' << pr.psi_deg
          << ',' << ef << ',' << eh << ',' << es << '\n';
    }
    // sorted accumulation, same convention as evaluate_mae
    std::sort(e_fov.begin(), e_fov.end());
    std::sort(e_phi.begin(), e_phi.end());
    std::sort(e_psi.begin(), e_psi.end());
    double m_fov = 0, m_phi = 0, m_psi = 0;
    for (double v : e_fov) m_fov += v;
    for (double v : e_phi) m_phi += v;
    for (double v : e_psi) m_psi += v;
    const double n = static_cast<double>(samples.size());
    rows.push_back({{"model", model_path},
                    {"objective", objective_name(model.objective)},
                    {"n", samples.size()},
                    {"mae_fov", m_fov / n},
                    {"mae_phi", m_phi / n},
                    {"mae_psi", m_psi / n}});
    std::cout << "eval: " << objective_name(model.objective) << " mae fov/phi/psi = "
              << m_fov / n << " / " << m_phi / n << " / " << m_psi / n << " ("
              << samples.size() << " samples)\n";
  }

  json report = {
      {"rows", rows},
      {"reference",
       {{"label",
         "full-scale reference system (pretrained backbone, real-scene "
         "training data); not comparable to this synthetic desk-scale setup"},
        {"binding", false},
        {"mae_fov", 7.9},
        {"mae_phi", 1.8},
        {"mae_psi", 1.5}}}};
  save_json(out_dir / "eval-report.json", report);

  json resolved = {{"command", "eval"},
                   {"manifest", opt.manifest},
                   {"models", opt.models},
                   {"out", opt.out}};
  write_echo(out_dir, "eval", resolved);
  return 0;
}

// ---------------------------------------------------------------------------
// unwarp

struct UnwarpOpts {
  std::string config;
  std::string image;
  std::string params;
  std::string model;
  std::string out;
  int canonical_size = 512;
  bool error_sweep = false;
};

bool is_fgrid(const fs::path& p) { return p.extension() == ".fgrid"; }

ImageRaster load_input_image(const fs::path& p) {
  return is_fgrid(p) ? read_fgrid(p.string()) : read_png(p.string());
}

// Resolution order: --params, --model, then the image's own sidecar.
CameraParams resolve_params(const std::string& params_path,
                            const std::string& model_path,
                            const fs::path& image_path, const ImageRaster& img) {
  if (!params_path.empty() && !model_path.empty())
    throw UsageError("give at most one of --params and --model");
  if (!params_path.empty()) {
    CameraParams p = load_params_sidecar(params_path);
    if (p.width != img.width || p.height != img.height)
      throw std::runtime_error("params sidecar size " + std::to_string(p.width) +
                               "x" + std::to_string(p.height) +
                               " does not match the image");
    return p;
  }
  if (!model_path.empty()) {
    const EstimatorModel model = load_model(model_path);
    const PredictionResult pr = predict(model, img);
    CameraParams p;
    p.fov_deg = pr.fov_deg;
    p.phi_deg = pr.phi_deg;
    p.psi_deg = pr.psi_deg;
    p.width = img.width;
    p.height = img.height;
    return p;
  }
  fs::path sidecar = image_path;
  sidecar.replace_extension();
  sidecar += ".params.json";
  if (fs::exists(sidecar)) return resolve_params(sidecar.string(), "", image_path, img);
  throw UsageError("missing parameters: give --params or --model (no sidecar at " +
                   sidecar.string() + ")");
}

int cmd_unwarp(const CLI::App& sub, UnwarpOpts opt) {
  const json cfg = load_config_file(opt.config);
  merge_cfg(cfg, sub, "--image", "image", opt.image);
  merge_cfg(cfg, sub, "--params", "params", opt.params);
  merge_cfg(cfg, sub, "--model", "model", opt.model);
  merge_cfg(cfg, sub, "--out", "out", opt.out);
  merge_cfg(cfg, sub, "--canonical-size", "canonical_size", opt.canonical_size);
  merge_cfg(cfg, sub, "--error-sweep", "error_sweep", opt.error_sweep);

  if (opt.image.empty()) throw UsageError("unwarp: --image is required");
  if (opt.canonical_size <= 0) throw UsageError("unwarp: bad --canonical-size");
  const fs::path out_dir = require_out(opt.out);
  const fs::path image_path(opt.image);

  const ImageRaster img = load_input_image(image_path);
  const CameraParams params = resolve_params(opt.params, opt.model, image_path, img);
  const CameraParams canon = CameraParams::canonical(opt.canonical_size);
  const Homography h = homography_from_params(params, canon);
  const ImageRaster canonical =
      warp_image(img, {h, opt.canonical_size, opt.canonical_size});

  const std::string stem = image_path.stem().string();
  if (is_fgrid(image_path))
    write_fgrid((out_dir / (stem + "_canonical.fgrid")).string(), canonical);
  else
    write_png((out_dir / (stem + "_canonical.png")).string(), canonical);
  write_inpaint_mask_png((out_dir / (stem + "_inpaint_mask.png")).string(),
                         canonical);
  save_json(out_dir / (stem + "_homography.json"), homography_to_json(h));

  if (opt.error_sweep) {
    std::ofstream csv(out_dir / (stem + "_error_sweep.csv"));
    if (!csv) throw std::runtime_error("unwarp: cannot write the sweep CSV");
    csv << "param,delta_deg,psnr_db\n";
    const double deltas[] = {-8, -4, -2, -1, -0.5, 0.5, 1, 2, 4, 8};
    const char* names[] = {"fov", "phi", "psi"};
    for (int k = 0; k < 3; ++k) {
      for (double d : deltas) {
        CameraParams p = params;
        (k == 0 ? p.fov_deg : k == 1 ? p.phi_deg : p.psi_deg) += d;
        const Homography hp = homography_from_params(p, canon);
        const ImageRaster pert =
            warp_image(img, {hp, opt.canonical_size, opt.canonical_size});
        csv << names[k] << ',' << d << ',' << psnr_masked(canonical, pert)
            << '\n';
      }
    }
  }

  json resolved = {{"command", "unwarp"},
                   {"image", opt.image},
                   {"params", opt.params},
                   {"model", opt.model},
                   {"out", opt.out},
                   {"canonical_size", opt.canonical_size},
                   {"error_sweep", opt.error_sweep}};
  write_echo(out_dir, "unwarp", resolved);
  std::cout << "unwarp: wrote " << stem << "_canonical"
            << (is_fgrid(image_path) ? ".fgrid" : ".png") << " to "
            << out_dir.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// correspondences

struct CorrOpts {
  std::string config;
  std::string image;
  std::string params;
  std::string model;
  std::string out;
  int view_size = 512;
};

int cmd_correspondences(const CLI::App& sub, CorrOpts opt) {
  const json cfg = load_config_file(opt.config);
  merge_cfg(cfg, sub, "--image", "image", opt.image);
  merge_cfg(cfg, sub, "--params", "params", opt.params);
  merge_cfg(cfg, sub, "--model", "model", opt.model);
  merge_cfg(cfg, sub, "--out", "out", opt.out);
  merge_cfg(cfg, sub, "--view-size", "view_size", opt.view_size);

  if (opt.view_size <= 0) throw UsageError("correspondences: bad --view-size");
  const fs::path out_dir = require_out(opt.out);

  CameraParams input;
  if (!opt.params.empty() && opt.model.empty()) {
    input = load_params_sidecar(opt.params);
  } else if (!opt.image.empty()) {
    const fs::path image_path(opt.image);
    const ImageRaster img = load_input_image(image_path);
    input = resolve_params(opt.params, opt.model, image_path, img);
  } else {
    throw UsageError(
        "correspondences: give --params, or --image with --model/sidecar");
  }

  PanoLayout layout;
  layout.view_size = opt.view_size;

  json coverage = json::array();
  for (int i = 0; i < layout.num_views; ++i) {
    const CorrespondenceMap map = build_correspondence(input, i, layout);
    char name[32];
    std::snprintf(name, sizeof name, "corr_v%d.cmap", i);
    save_cmap(out_dir / name, map);
    coverage.push_back({{"view", i},
                        {"yaw_deg", layout.yaw_deg(i)},
                        {"visible_fraction", map.visible_fraction()},
                        {"center_row_visible_fraction",
                         map.center_row_visible_fraction()}});
  }
  save_json(out_dir / "coverage.json", json{{"views", coverage}});

  json resolved = {{"command", "correspondences"}, {"image", opt.image},
                   {"params", opt.params},         {"model", opt.model},
                   {"out", opt.out},               {"view_size", opt.view_size}};
  write_echo(out_dir, "correspondences", resolved);
  std::cout << "correspondences: wrote 8 maps to " << out_dir.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// slice / stitch

struct SliceOpts {
  std::string config;
  std::string pano;
  std::string out;
  int view_size = 512;
};

int cmd_slice(const CLI::App& sub, SliceOpts opt) {
  const json cfg = load_config_file(opt.config);
  merge_cfg(cfg, sub, "--pano", "pano", opt.pano);
  merge_cfg(cfg, sub, "--out", "out", opt.out);
  merge_cfg(cfg, sub, "--view-size", "view_size", opt.view_size);

  if (opt.pano.empty()) throw UsageError("slice: --pano is required");
  if (opt.view_size <= 0) throw UsageError("slice: bad --view-size");
  const fs::path out_dir = require_out(opt.out);

  const ImageRaster pano = read_png(opt.pano);
  if (pano.width != 2 * pano.height)
    throw std::runtime_error("slice: panorama must be 2:1, got " +
                             std::to_string(pano.width) + "x" +
                             std::to_string(pano.height));
  PanoLayout layout;
  layout.view_size = opt.view_size;
  const std::vector<ImageRaster> views = equirect_to_views(pano, layout);
  for (std::size_t i = 0; i < views.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "view_%zu.png", i);
    write_png((out_dir / name).string(), views[i]);
  }

  json resolved = {{"command", "slice"},
                   {"pano", opt.pano},
                   {"out", opt.out},
                   {"view_size", opt.view_size}};
  write_echo(out_dir, "slice", resolved);
  std::cout << "slice: wrote " << views.size() << " views to "
            << out_dir.string() << "\n";
  return 0;
}

struct StitchOpts {
  std::string config;
  std::string views;
  std::string out;
  int width = 1024;
  int height = 512;
};

int cmd_stitch(const CLI::App& sub, StitchOpts opt) {
  const json cfg = load_config_file(opt.config);
  merge_cfg(cfg, sub, "--views", "views", opt.views);
  merge_cfg(cfg, sub, "--out", "out", opt.out);
  merge_cfg(cfg, sub, "--width", "width", opt.width);
  merge_cfg(cfg, sub, "--height", "height", opt.height);

  if (opt.views.empty()) throw UsageError("stitch: --views is required");
  if (opt.width <= 0 || opt.height <= 0 || opt.width != 2 * opt.height)
    throw UsageError("stitch: output must be 2:1 (--width = 2 * --height)");
  const fs::path out_dir = require_out(opt.out);

  PanoLayout layout;
  std::vector<ImageRaster> views;
  for (int i = 0; i < layout.num_views; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "view_%d.png", i);
    const fs::path p = fs::path(opt.views) / name;
    if (!fs::exists(p))
      throw std::runtime_error("stitch: missing view file " + p.string());
    views.push_back(read_png(p.string()));
  }
  layout.view_size = views[0].width;

  const ImageRaster pano = views_to_equirect(views, layout, opt.width, opt.height);
  write_png((out_dir / "pano.png").string(), pano);
  write_inpaint_mask_png((out_dir / "pano_mask.png").string(), pano);

  json resolved = {{"command", "stitch"},
                   {"views", opt.views},
                   {"out", opt.out},
                   {"width", opt.width},
                   {"height", opt.height}};
  write_echo(out_dir, "stitch", resolved);
  std::cout << "stitch: wrote pano.png to " << out_dir.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// verify / caa-check

json report_to_json(const SuiteReport& r) {
  json checks = json::array();
  for (const CheckResult& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"observed", c.observed},
                      {"tol", c.tol},
                      {"pass", c.pass}});
  return {{"suite", r.suite}, {"checks", checks}, {"all_pass", r.all_pass()}};
}

struct VerifyOpts {
  std::string config;
  std::string suite = "all";
  std::string out;
  std::uint64_t seed = 0;
};

int cmd_verify(const CLI::App& sub, VerifyOpts opt) {
  const json cfg = load_config_file(opt.config);
  merge_cfg(cfg, sub, "suite", "suite", opt.suite);
  merge_cfg(cfg, sub, "--out", "out", opt.out);
  merge_cfg(cfg, sub, "--seed", "seed", opt.seed);

  std::vector<std::string> suites;
  if (opt.suite == "all") {
    suites = suite_names();
  } else {
    suites.push_back(opt.suite);
  }

  bool all_pass = true;
  json jreports = json::array();
  for (const std::string& name : suites) {
    SuiteReport report;
    try {
      report = run_suite(name, opt.seed);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    std::cout << format_report(report);
    all_pass = all_pass && report.all_pass();
    jreports.push_back(report_to_json(report));
  }

  if (!opt.out.empty()) {
    const fs::path out_dir = require_out(opt.out);
    save_json(out_dir / "verify-report.json",
              json{{"reports", jreports}, {"all_pass", all_pass}});
    json resolved = {{"command", "verify"},
                     {"suite", opt.suite},
                     {"out", opt.out},
                     {"seed", opt.seed}};
    write_echo(out_dir, "verify", resolved);
  }
  return all_pass ? 0 : 3;
}

struct CaaCheckOpts {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
};

int cmd_caa_check(const CLI::App& sub, CaaCheckOpts opt) {
  const json cfg = load_config_file(opt.config);
  merge_cfg(cfg, sub, "--out", "out", opt.out);
  merge_cfg(cfg, sub, "--seed", "seed", opt.seed);

  const SuiteReport report = verify_caa(opt.seed);
  std::cout << format_report(report);
  if (!opt.out.empty()) {
    const fs::path out_dir = require_out(opt.out);
    save_json(out_dir / "caa-check-report.json", report_to_json(report));
    json resolved = {{"command", "caa-check"}, {"out", opt.out}, {"seed", opt.seed}};
    write_echo(out_dir, "caa-check", resolved);
  }
  return report.all_pass() ? 0 : 3;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"3-DoF homography, panorama, and correspondence toolkit"};
  app.require_subcommand(1);

  GenDatasetOpts gd;
  CLI::App* s_gd = app.add_subcommand(
      "gen-dataset", "Slice panoramas into views and write random warps");
  s_gd->add_option("--config", gd.config, "JSON config file");
  s_gd->add_option("--panos", gd.panos, "Directory of 2:1 equirect PNGs");
  s_gd->add_option("--synth", gd.synth, "Generate N procedural panoramas instead");
  s_gd->add_option("--out", gd.out, "Output directory");
  s_gd->add_option("--n-per-pano", gd.n_per_pano, "Warps per view");
  s_gd->add_option("--size", gd.size, "View and warp size in pixels");
  s_gd->add_option("--seed", gd.seed, "Random seed");

  TrainOpts tr;
  CLI::App* s_tr = app.add_subcommand("train", "Train a parameter estimator");
  s_tr->add_option("--config", tr.config, "JSON config file");
  s_tr->add_option("--manifest", tr.manifest, "Dataset manifest (JSON lines)");
  s_tr->add_option("--out", tr.out, "Output directory");
  s_tr->add_option("--objective", tr.objective, "ce or mse");
  s_tr->add_option("--epochs", tr.epochs, "Training epochs");
  s_tr->add_option("--batch-size", tr.batch_size, "Minibatch size");
  s_tr->add_option("--lr", tr.learning_rate, "Learning rate");
  s_tr->add_option("--momentum", tr.momentum, "SGD momentum");
  s_tr->add_option("--val-fraction", tr.val_fraction, "Validation split fraction");
  s_tr->add_option("--input-size", tr.input_size, "Training image size");
  s_tr->add_option("--seed", tr.seed, "Random seed");
  s_tr->add_option("--extractor-seed", tr.extractor_seed, "Frozen extractor seed");

  EvalOpts ev;
  CLI::App* s_ev = app.add_subcommand("eval", "Evaluate estimator MAE");
  s_ev->add_option("--config", ev.config, "JSON config file");
  s_ev->add_option("--manifest", ev.manifest, "Dataset manifest (JSON lines)");
  s_ev->add_option("--model", ev.models, "Model file; repeat for comparisons");
  s_ev->add_option("--out", ev.out, "Output directory");

  UnwarpOpts uw;
  CLI::App* s_uw = app.add_subcommand(
      "unwarp", "Rectify an input image into the canonical view");
  s_uw->add_option("--config", uw.config, "JSON config file");
  s_uw->add_option("--image", uw.image, "Input PNG or .fgrid feature grid");
  s_uw->add_option("--params", uw.params, "Camera parameter sidecar JSON");
  s_uw->add_option("--model", uw.model, "Estimator model for predicted params");
  s_uw->add_option("--out", uw.out, "Output directory");
  s_uw->add_option("--canonical-size", uw.canonical_size, "Canonical view size");
  s_uw->add_flag("--error-sweep", uw.error_sweep,
                 "Also write a PSNR-vs-parameter-error CSV");

  CorrOpts co;
  CLI::App* s_co = app.add_subcommand(
      "correspondences", "Write input-to-view correspondence maps");
  s_co->add_option("--config", co.config, "JSON config file");
  s_co->add_option("--image", co.image, "Input image (for --model or sidecar)");
  s_co->add_option("--params", co.params, "Camera parameter sidecar JSON");
  s_co->add_option("--model", co.model, "Estimator model for predicted params");
  s_co->add_option("--out", co.out, "Output directory");
  s_co->add_option("--view-size", co.view_size, "Canonical view size");

  SliceOpts sl;
  CLI::App* s_sl = app.add_subcommand("slice", "Slice a panorama into 8 views");
  s_sl->add_option("--config", sl.config, "JSON config file");
  s_sl->add_option("--pano", sl.pano, "2:1 equirect PNG");
  s_sl->add_option("--out", sl.out, "Output directory");
  s_sl->add_option("--view-size", sl.view_size, "View size in pixels");

  StitchOpts st;
  CLI::App* s_st = app.add_subcommand("stitch", "Stitch 8 views into a panorama");
  s_st->add_option("--config", st.config, "JSON config file");
  s_st->add_option("--views", st.views, "Directory with view_0.png .. view_7.png");
  s_st->add_option("--out", st.out, "Output directory");
  s_st->add_option("--width", st.width, "Output width");
  s_st->add_option("--height", st.height, "Output height");

  CaaCheckOpts cc;
  CLI::App* s_cc = app.add_subcommand(
      "caa-check", "Run the attention oracle and gradient checks");
  s_cc->add_option("--config", cc.config, "JSON config file");
  s_cc->add_option("--out", cc.out, "Optional report directory");
  s_cc->add_option("--seed", cc.seed, "Random seed");

  VerifyOpts vf;
  CLI::App* s_vf = app.add_subcommand("verify", "Run invariant suites");
  s_vf->add_option("suite", vf.suite, "geometry, warp, pano, caa, or all");
  s_vf->add_option("--config", vf.config, "JSON config file");
  s_vf->add_option("--out", vf.out, "Optional report directory");
  s_vf->add_option("--seed", vf.seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (s_gd->parsed()) return cmd_gen_dataset(*s_gd, gd);
    if (s_tr->parsed()) return cmd_train(*s_tr, tr);
    if (s_ev->parsed()) return cmd_eval(*s_ev, ev);
    if (s_uw->parsed()) return cmd_unwarp(*s_uw, uw);
    if (s_co->parsed()) return cmd_correspondences(*s_co, co);
    if (s_sl->parsed()) return cmd_slice(*s_sl, sl);
    if (s_st->parsed()) return cmd_stitch(*s_st, st);
    if (s_cc->parsed()) return cmd_caa_check(*s_cc, cc);
    if (s_vf->parsed()) return cmd_verify(*s_vf, vf);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("panogeo");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace panogeo
