#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "panogeo/features.hpp"
#include "panogeo/geometry.hpp"
#include "panogeo/raster.hpp"

namespace panogeo {

enum class Objective : std::uint8_t { kCrossEntropy = 0, kMse = 1 };

// Uniform 1-degree-style bin grid over [lo, hi]; centers at lo + i*step.
struct BinSpec {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;

  void validate() const;
  int count() const;
  int index_of(double value) const;  // nearest bin, clamped to the grid
  double center(int index) const { return lo + index * step; }
  bool contains(double value) const {
    return value >= lo - 1e-9 && value <= hi + 1e-9;
  }
};

BinSpec default_fov_bins();  // [60, 110] step 1 -> 51 bins
BinSpec default_phi_bins();  // [-15, 15] step 1 -> 31 bins
BinSpec default_psi_bins();  // [-15, 15] step 1 -> 31 bins

struct DenseLayer {
  Eigen::MatrixXf w;
  Eigen::VectorXf b;
};

// Trunk of SiLU hidden layers shared by the three heads; classification
// heads emit one logit per bin, regression heads one scalar each (trained on
// range-normalized targets).
struct MlpParams {
  std::vector<DenseLayer> trunk;
  DenseLayer head_fov, head_phi, head_psi;
};

struct EstimatorModel {
  Objective objective = Objective::kCrossEntropy;
  int input_size = 128;
  BinSpec fov_bins, phi_bins, psi_bins;
  FeatureExtractor extractor;
  Eigen::VectorXf feat_mean, feat_std;  // training-set standardization
  MlpParams mlp;
};

struct Sample {
  ImageRaster image;
  CameraParams params;
};

// Streaming access to training/eval data so images never have to be resident
// all at once; features are cached instead.
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual std::size_t size() const = 0;
  virtual Sample load(std::size_t index) const = 0;
};

class MemorySamples final : public SampleSource {
 public:
  explicit MemorySamples(std::vector<Sample> samples)
      : samples_(std::move(samples)) {}
  std::size_t size() const override { return samples_.size(); }
  Sample load(std::size_t index) const override { return samples_[index]; }

 private:
  std::vector<Sample> samples_;
};

struct TrainConfig {
  Objective objective = Objective::kCrossEntropy;
  BinSpec fov_bins = default_fov_bins();
  BinSpec phi_bins = default_phi_bins();
  BinSpec psi_bins = default_psi_bins();
  int epochs = 30;
  int batch_size = 32;
  double learning_rate = 2e-4;
  double momentum = 0.9;
  double val_fraction = 0.1;  // 0 keeps the final-epoch parameters
  int input_size = 128;
  std::vector<int> hidden = {256, 128, 64};
  std::uint64_t seed = 0;
  std::uint64_t extractor_seed = FeatureExtractor::kDefaultSeed;
  bool record_step_loss = false;
};

struct TrainLog {
  std::vector<double> epoch_loss;                    // mean train loss
  std::vector<double> val_mae_sum;                   // empty without val split
  std::vector<double> step_loss;                     // per step, if recorded
  std::vector<std::array<double, 3>> step_head_loss; // per step, if recorded
  int best_epoch = -1;
};

// Deterministic given config.seed: fixed split, shuffles, init, and update
// order. Returns the parameters of the epoch with the lowest summed
// validation MAE (final parameters when val_fraction = 0).
EstimatorModel train(const SampleSource& data, const TrainConfig& config,
                     TrainLog* log = nullptr);

struct PredictionResult {
  double fov_deg = 0.0;
  double phi_deg = 0.0;
  double psi_deg = 0.0;
  double conf_fov = 1.0;  // classification: softmax of the argmax bin
  double conf_phi = 1.0;
  double conf_psi = 1.0;
};

// Classification: argmax bin center, ties resolved to the lowest bin index.
// Regression: output clamped to the bin range, confidence 1.
PredictionResult predict(const EstimatorModel& model, const ImageRaster& img);

struct MaeReport {
  double mae_fov = 0.0;
  double mae_phi = 0.0;
  double mae_psi = 0.0;
  std::size_t n = 0;
};

// Mean absolute error per head in degrees. Errors are summed in sorted order
// so the result is invariant to dataset permutation.
MaeReport evaluate_mae(const EstimatorModel& model, const SampleSource& data);

// CFDE container: magic "CFDE", u32 version = 1, u8 objective,
// u32 input_size, 3 x BinSpec (f64 lo, hi, step), extractor
// (u64 seed, u32 layer count, per layer u32 in/out channels + f32 weights
// + f32 biases), feature mean/std (u32 dim + f32 each), MLP (u32 trunk
// count, per layer u32 rows/cols + f32 row-major weights + f32 biases,
// then the three heads in fov/phi/psi order). Little-endian throughout.
void save_model(const std::filesystem::path& path, const EstimatorModel& model);
EstimatorModel load_model(const std::filesystem::path& path);

}  // namespace panogeo
