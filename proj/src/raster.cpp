#include "panogeo/raster.hpp"

#include <cmath>
#include <stdexcept>

#include "panogeo/rng.hpp"

namespace panogeo {

ImageRaster ImageRaster::zeros(int width, int height, int channels) {
  if (width < 0 || height < 0 || channels < 0)
    throw std::invalid_argument("ImageRaster: negative shape");
  ImageRaster img;
  img.width = width;
  img.height = height;
  img.channels = channels;
  img.data.assign(static_cast<std::size_t>(width) * height * channels, 0.0);
  img.mask.assign(static_cast<std::size_t>(width) * height, 1);
  return img;
}

ImageRaster ImageRaster::constant(int width, int height, int channels, double value) {
  ImageRaster img = zeros(width, height, channels);
  img.data.assign(img.data.size(), value);
  return img;
}

double sample_bilinear(const ImageRaster& img, double u, double v, double* out) {
  const int c = img.channels;
  for (int k = 0; k < c; ++k) out[k] = 0.0;

  const double fx = std::floor(u);
  const double fy = std::floor(v);
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  const double ax = u - fx;
  const double ay = v - fy;

  const double wts[4] = {(1.0 - ax) * (1.0 - ay), ax * (1.0 - ay),
                         (1.0 - ax) * ay, ax * ay};
  const int xs[4] = {x0, x0 + 1, x0, x0 + 1};
  const int ys[4] = {y0, y0, y0 + 1, y0 + 1};

  double validity = 0.0;
  for (int i = 0; i < 4; ++i) {
    if (wts[i] == 0.0) continue;
    if (!img.in_bounds(xs[i], ys[i])) continue;
    if (!img.valid(xs[i], ys[i])) continue;
    validity += wts[i];
    const double* src = img.data.data() + img.pixel_index(xs[i], ys[i]) * c;
    for (int k = 0; k < c; ++k) out[k] += wts[i] * src[k];
  }
  return validity;
}

ImageRaster warp_image(const ImageRaster& img, const WarpSpec& spec) {
  ImageRaster out = ImageRaster::zeros(spec.out_width, spec.out_height, img.channels);
  const Homography inv = spec.homography.inverse();
  std::vector<double> px(static_cast<std::size_t>(img.channels), 0.0);
  for (int y = 0; y < spec.out_height; ++y) {
    for (int x = 0; x < spec.out_width; ++x) {
      const auto src = project_point(inv, Eigen::Vector2d(x, y));
      const std::size_t pi = out.pixel_index(x, y);
      if (!src) {
        out.mask[pi] = 0;
        continue;
      }
      const double validity = sample_bilinear(img, src->x(), src->y(), px.data());
      if (validity < kValidityThreshold) {
        out.mask[pi] = 0;
        continue;
      }
      for (int k = 0; k < img.channels; ++k)
        out.data[pi * img.channels + k] = px[k] / validity;
    }
  }
  return out;
}

CameraParams draw_warp_params(std::uint64_t seed, int out_size) {
  Rng rng(seed);
  CameraParams p;
  p.fov_deg = rng.uniform(kWarpFovLo, kWarpFovHi);
  p.phi_deg = rng.uniform(kWarpRotLo, kWarpRotHi);
  p.psi_deg = rng.uniform(kWarpRotLo, kWarpRotHi);
  p.width = out_size;
  p.height = out_size;
  return p;
}

RandomWarp random_warp(const ImageRaster& canonical_img, std::uint64_t seed,
                       int out_size) {
  if (canonical_img.width != canonical_img.height)
    throw std::invalid_argument("random_warp: input must be square");
  RandomWarp rw;
  rw.params = draw_warp_params(seed, out_size);

  CameraParams canon = CameraParams::canonical(canonical_img.width);
  // homography_from_params maps the synthetic view onto the canonical frame;
  // the warp renders the synthetic view, so the output samples through H.
  const Homography h = homography_from_params(rw.params, canon);
  WarpSpec spec;
  spec.homography = h.inverse();
  spec.out_width = out_size;
  spec.out_height = out_size;
  rw.image = warp_image(canonical_img, spec);
  return rw;
}

}  // namespace panogeo
