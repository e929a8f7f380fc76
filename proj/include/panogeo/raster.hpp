#pragma once

#include <cstdint>
#include <vector>

#include "panogeo/geometry.hpp"

namespace panogeo {

// H x W x C grid of real-valued samples with a per-pixel validity mask.
// mask = 1 marks a valid pixel; invalid pixels hold value 0 and mask 0.
// Values are in [0, 1] for images; feature grids may carry anything finite.
struct ImageRaster {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> data;          // row-major, [y][x][c]
  std::vector<std::uint8_t> mask;    // [y][x]

  static ImageRaster zeros(int width, int height, int channels);
  static ImageRaster constant(int width, int height, int channels, double value);

  std::size_t pixel_index(int x, int y) const {
    return static_cast<std::size_t>(y) * width + x;
  }
  double at(int x, int y, int c) const { return data[pixel_index(x, y) * channels + c]; }
  double& at(int x, int y, int c) { return data[pixel_index(x, y) * channels + c]; }
  bool valid(int x, int y) const { return mask[pixel_index(x, y)] != 0; }
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  bool same_shape(const ImageRaster& o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }
};

// Bilinear sample of values and mask at real pixel coordinates (u, v).
// Out-of-bounds neighbors contribute value 0 with validity 0, so a fully
// out-of-bounds sample returns 0 values and weight 0. out must hold
// img.channels doubles. Returns the interpolated validity weight.
double sample_bilinear(const ImageRaster& img, double u, double v, double* out);

// An output pixel is valid only when the interpolated validity reaches this
// threshold, i.e. every contributing source neighbor was valid and in bounds.
inline constexpr double kValidityThreshold = 0.999;

struct WarpSpec {
  Homography homography;  // maps source pixel coordinates to output pixel coordinates
  int out_width = 0;
  int out_height = 0;
};

// Backward warp: output pixel p samples img at spec.homography^-1 * p.
// Pixels whose source point is behind the camera or whose interpolated
// validity falls below kValidityThreshold come out invalid.
ImageRaster warp_image(const ImageRaster& img, const WarpSpec& spec);

struct RandomWarp {
  ImageRaster image;
  CameraParams params;  // ground truth of the synthesized view
};

// Parameter ranges of the synthetic warp protocol.
inline constexpr double kWarpFovLo = 60.0;
inline constexpr double kWarpFovHi = 110.0;
inline constexpr double kWarpRotLo = -15.0;
inline constexpr double kWarpRotHi = 15.0;

// Draws (fov, phi, psi) for random_warp; uniform in
// [60, 110] x [-15, 15] x [-15, 15], in that call order.
CameraParams draw_warp_params(std::uint64_t seed, int out_size);

// Synthesizes the out_size x out_size view a camera with randomly drawn
// parameters would have seen of the canonical-style (90 deg fov, square)
// input crop. Deterministic in (img, seed).
RandomWarp random_warp(const ImageRaster& canonical_img, std::uint64_t seed,
                       int out_size = 512);

}  // namespace panogeo
