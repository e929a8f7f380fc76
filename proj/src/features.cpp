#include "panogeo/features.hpp"

#include <cmath>
#include <stdexcept>

#include "panogeo/rng.hpp"

namespace panogeo {

namespace {

constexpr int kChannels[] = {3, 16, 32, 64, 64};
constexpr int kNumLayers = 4;

inline float silu(float x) { return x / (1.0f + std::exp(-x)); }

// 3x3 stride-2 pad-1 convolution as im2col + GEMM. in is CHW.
std::vector<float> conv_layer(const std::vector<float>& in, int in_ch, int size,
                              const FeatureExtractor::ConvLayer& layer,
                              int* out_size) {
  const int os = (size + 1) / 2;
  *out_size = os;
  const int patch = in_ch * 9;
  Eigen::MatrixXf cols(patch, os * os);
  for (int oy = 0; oy < os; ++oy) {
    for (int ox = 0; ox < os; ++ox) {
      const int col = oy * os + ox;
      int row = 0;
      for (int c = 0; c < in_ch; ++c) {
        const float* plane = in.data() + static_cast<std::size_t>(c) * size * size;
        for (int ky = 0; ky < 3; ++ky) {
          const int iy = 2 * oy + ky - 1;
          for (int kx = 0; kx < 3; ++kx, ++row) {
            const int ix = 2 * ox + kx - 1;
            cols(row, col) = (ix >= 0 && ix < size && iy >= 0 && iy < size)
                                 ? plane[iy * size + ix]
                                 : 0.0f;
          }
        }
      }
    }
  }
  const Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>>
      w(layer.weights.data(), layer.out_ch, patch);
  Eigen::MatrixXf out = w * cols;
  std::vector<float> result(static_cast<std::size_t>(layer.out_ch) * os * os);
  for (int c = 0; c < layer.out_ch; ++c)
    for (int i = 0; i < os * os; ++i)
      result[static_cast<std::size_t>(c) * os * os + i] =
          silu(out(c, i) + layer.bias[c]);
  return result;
}

}  // namespace

FeatureExtractor FeatureExtractor::create(int input_size, std::uint64_t seed) {
  if (input_size < 16 || input_size % 16 != 0)
    throw std::invalid_argument(
        "FeatureExtractor: input size must be a positive multiple of 16");
  FeatureExtractor fe;
  fe.input_size_ = input_size;
  fe.seed_ = seed;
  fe.layers_.resize(kNumLayers);
  for (int l = 0; l < kNumLayers; ++l) {
    Rng rng(mix_seed(seed, 0xfea7ull, l));
    ConvLayer& layer = fe.layers_[l];
    layer.in_ch = kChannels[l];
    layer.out_ch = kChannels[l + 1];
    const int fan_in = layer.in_ch * 9;
    const float std_w = std::sqrt(2.0f / static_cast<float>(fan_in));
    layer.weights.resize(static_cast<std::size_t>(layer.out_ch) * fan_in);
    for (float& w : layer.weights)
      w = std_w * static_cast<float>(rng.normal());
    layer.bias.resize(layer.out_ch);
    for (float& b : layer.bias) b = 0.1f * static_cast<float>(rng.normal());
  }
  return fe;
}

FeatureExtractor FeatureExtractor::from_parts(int input_size,
                                              std::uint64_t seed,
                                              std::vector<ConvLayer> layers) {
  if (static_cast<int>(layers.size()) != kNumLayers)
    throw std::invalid_argument("FeatureExtractor: wrong layer count");
  for (int l = 0; l < kNumLayers; ++l) {
    if (layers[l].in_ch != kChannels[l] || layers[l].out_ch != kChannels[l + 1])
      throw std::invalid_argument("FeatureExtractor: channel plan mismatch");
    const std::size_t nw =
        static_cast<std::size_t>(layers[l].out_ch) * layers[l].in_ch * 9;
    if (layers[l].weights.size() != nw ||
        layers[l].bias.size() != static_cast<std::size_t>(layers[l].out_ch))
      throw std::invalid_argument("FeatureExtractor: parameter size mismatch");
  }
  FeatureExtractor fe;
  fe.input_size_ = input_size;
  fe.seed_ = seed;
  fe.layers_ = std::move(layers);
  return fe;
}

Eigen::VectorXf FeatureExtractor::extract(const ImageRaster& img) const {
  if (img.width != input_size_ || img.height != input_size_ ||
      img.channels != 3)
    throw std::invalid_argument("FeatureExtractor: image shape mismatch");

  int size = input_size_;
  std::vector<float> buf(static_cast<std::size_t>(3) * size * size);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x)
        buf[(static_cast<std::size_t>(c) * size + y) * size + x] =
            static_cast<float>(img.at(x, y, c));

  int ch = 3;
  for (const ConvLayer& layer : layers_) {
    int out_size = 0;
    buf = conv_layer(buf, ch, size, layer, &out_size);
    ch = layer.out_ch;
    size = out_size;
  }

  // adaptive average pool to kPoolGrid x kPoolGrid
  Eigen::VectorXf features(kFeatureDim);
  int idx = 0;
  for (int c = 0; c < ch; ++c) {
    const float* plane = buf.data() + static_cast<std::size_t>(c) * size * size;
    // floor/ceil bin edges keep every bin non-empty even when the conv
    // output is smaller than the pool grid
    for (int gy = 0; gy < kPoolGrid; ++gy) {
      const int y0 = gy * size / kPoolGrid;
      const int y1 = ((gy + 1) * size + kPoolGrid - 1) / kPoolGrid;
      for (int gx = 0; gx < kPoolGrid; ++gx) {
        const int x0 = gx * size / kPoolGrid;
        const int x1 = ((gx + 1) * size + kPoolGrid - 1) / kPoolGrid;
        float sum = 0.0f;
        for (int y = y0; y < y1; ++y)
          for (int x = x0; x < x1; ++x) sum += plane[y * size + x];
        features[idx++] = sum / static_cast<float>((y1 - y0) * (x1 - x0));
      }
    }
  }
  return features;
}

}  // namespace panogeo
