#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "panogeo/raster.hpp"

namespace panogeo {

// Frozen random convolutional pyramid: 3 -> 16 -> 32 -> 64 -> 64 channels of
// 3x3 stride-2 pad-1 convolutions with SiLU, followed by a 4x4 adaptive
// average pool, flattened to 64 * 16 = 1024 features. Weights are drawn once
// from the seed and never trained; identical (input_size, seed) pairs always
// produce the same extractor.
class FeatureExtractor {
 public:
  static constexpr int kFeatureDim = 1024;
  static constexpr int kPoolGrid = 4;
  static constexpr std::uint64_t kDefaultSeed = 0x7a3c19f0d2b5e481ull;

  struct ConvLayer {
    int in_ch = 0;
    int out_ch = 0;
    std::vector<float> weights;  // [out][in][ky][kx], 3x3 kernels
    std::vector<float> bias;     // [out]
  };

  FeatureExtractor() = default;

  static FeatureExtractor create(int input_size,
                                 std::uint64_t seed = kDefaultSeed);

  // Used by model deserialization; layers must match the create() topology.
  static FeatureExtractor from_parts(int input_size, std::uint64_t seed,
                                     std::vector<ConvLayer> layers);

  // img must be RGB at input_size x input_size. Invalid pixels are expected
  // to hold zeros, which is how warp borders reach the features.
  Eigen::VectorXf extract(const ImageRaster& img) const;

  int input_size() const { return input_size_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<ConvLayer>& layers() const { return layers_; }

 private:
  int input_size_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<ConvLayer> layers_;
};

}  // namespace panogeo
