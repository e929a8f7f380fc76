#include "panogeo/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace panogeo {

namespace {

struct Overlap {
  double sum_sq = 0.0;
  double sum_abs = 0.0;
  std::size_t count = 0;  // pixel-channel samples
};

Overlap accumulate(const ImageRaster& a, const ImageRaster& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("metrics: shape mismatch");
  Overlap o;
  for (int y = 0; y < a.height; ++y) {
    for (int x = 0; x < a.width; ++x) {
      if (!a.valid(x, y) || !b.valid(x, y)) continue;
      const std::size_t base = a.pixel_index(x, y) * a.channels;
      for (int c = 0; c < a.channels; ++c) {
        const double d = a.data[base + c] - b.data[base + c];
        o.sum_sq += d * d;
        o.sum_abs += std::abs(d);
        ++o.count;
      }
    }
  }
  return o;
}

}  // namespace

double psnr_masked(const ImageRaster& a, const ImageRaster& b) {
  const Overlap o = accumulate(a, b);
  if (o.count == 0) return -std::numeric_limits<double>::infinity();
  const double mse = o.sum_sq / static_cast<double>(o.count);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

double mad_masked(const ImageRaster& a, const ImageRaster& b) {
  const Overlap o = accumulate(a, b);
  if (o.count == 0) return std::numeric_limits<double>::quiet_NaN();
  return o.sum_abs / static_cast<double>(o.count);
}

}  // namespace panogeo
