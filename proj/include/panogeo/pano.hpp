#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "panogeo/geometry.hpp"
#include "panogeo/raster.hpp"

namespace panogeo {

// The eight-view panorama layout: perspective views at yaw = i * 45 deg,
// pitch = roll = 0, each with a 90 deg fov, so adjacent views overlap by
// 45 deg horizontally.
struct PanoLayout {
  int num_views = 8;
  double fov_deg = 90.0;
  double yaw_step_deg = 45.0;
  int view_size = 512;

  double yaw_deg(int view) const { return view * yaw_step_deg; }
  CameraParams view_params() const;
  void validate() const;  // num_views * yaw_step_deg must cover 360 exactly
};

// source_view_id value marking the camera-free input view.
inline constexpr int kInputViewId = -1;

// Per-target-pixel source coordinates plus visibility. Coordinates are kept
// in double precision in memory; the CMAP file stores them as f32.
struct CorrespondenceMap {
  int width = 0;
  int height = 0;
  int source_id = kInputViewId;
  int target_id = 0;
  int source_width = 0;   // source bounds, needed for neighborhood clipping
  int source_height = 0;  // (not part of the serialized format)
  std::vector<double> u;
  std::vector<double> v;
  std::vector<std::uint8_t> visible;

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width + x;
  }
  double visible_fraction() const;
  // Fraction of visible pixels on the horizontal center rows; for even
  // heights the two middle rows are averaged.
  double center_row_visible_fraction() const;
};

// Bilinear sample of an equirectangular raster with longitudinal wrap-around
// (latitude clamps at the poles). Same return convention as sample_bilinear.
double sample_equirect(const ImageRaster& pano, double u, double v, double* out);

// Perspective view at layout yaw i via sphere-direction lookup. The sampling
// column is computed in view-local longitude and shifted by the integer
// column offset i * width / 8 when width is divisible by 8, which makes yaw
// symmetry pixel-exact.
ImageRaster equirect_to_view(const ImageRaster& pano, const PanoLayout& layout,
                             int view);
std::vector<ImageRaster> equirect_to_views(const ImageRaster& pano,
                                           const PanoLayout& layout);

// Stitches the 8 views back into an equirect band covering latitude +-45 deg
// at the center columns. Overlaps blend with inverse squared angular distance
// to the contributing view's optical axis; per-pixel contributions accumulate
// in view-local column order so the result is yaw-shift equivariant bit for
// bit. Pixels no view covers are invalid.
ImageRaster views_to_equirect(const std::vector<ImageRaster>& views,
                              const PanoLayout& layout, int out_width,
                              int out_height);

// Correspondence between two canonical views: target pixel p_t maps to
// source pixel via K R_y(yaw_t - yaw_s) K^-1.
CorrespondenceMap build_correspondence(int source_view, int target_view,
                                       const PanoLayout& layout);

// Correspondence from the camera-free input (source) to canonical view i
// (target): composes the input->canonical-0 homography with the yaw
// rotation, p_src = H^-1 K R_y(yaw_t) K^-1 p_t.
CorrespondenceMap build_correspondence(const CameraParams& input,
                                       int target_view,
                                       const PanoLayout& layout);

// The homography actually used by build_correspondence for a canonical pair;
// exposed so consistency of map entries can be checked against project_point.
Homography pair_homography(int source_view, int target_view,
                           const PanoLayout& layout);

struct Neighborhood {
  bool visible = false;
  int k = 0;
  std::vector<Eigen::Vector2i> positions;  // row-major K x K around the anchor
  std::vector<std::uint8_t> valid;         // inside source bounds
};

// K x K integer grid centered at the rounded source coordinates of (x, y).
// Invisible targets yield an empty, visible = false result.
Neighborhood gather_neighborhood(const CorrespondenceMap& map, int x, int y,
                                 int k);

// CMAP container: "CMAP" magic, u32 version = 1, u32 width, u32 height,
// i32 source_id, i32 target_id, then width*height row-major records of
// (f32 u, f32 v, u8 visible), little-endian, packed.
void save_cmap(const std::filesystem::path& path, const CorrespondenceMap& map);
CorrespondenceMap load_cmap(const std::filesystem::path& path, int source_width,
                            int source_height);

}  // namespace panogeo
