#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "panogeo/geometry.hpp"
#include "panogeo/raster.hpp"

namespace panogeo {

// Band-limited procedural scene defined on the unit sphere of view
// directions: per channel a sum of sinusoids sin(k . d + phase). Amplitudes
// are normalized so values stay strictly inside (0, 1), which keeps 8-bit
// quantization the only loss in PNG round trips.
struct SphereField {
  struct Wave {
    Eigen::Vector3d k;
    double phase = 0.0;
    double amp = 0.0;
  };
  std::vector<std::vector<Wave>> waves;  // [channel][wave]
  double bias = 0.5;

  static SphereField make(std::uint64_t seed, int channels = 3,
                          int waves_per_channel = 24, double max_freq = 7.0);

  double eval(const Eigen::Vector3d& unit_dir, int channel) const;
};

// Equirectangular mapping shared by the pano pipeline and these renderers:
//   longitude(u) = ((u + 0.5) / W - 0.5) * 2pi, positive to the right
//   latitude(v)  = (0.5 - (v + 0.5) / H) * pi,  positive up
//   direction    = (sin(lon) cos(lat), -sin(lat), cos(lon) cos(lat))
// so (lon, lat) = (0, 0) looks down +z and the image row center is the
// horizon. Camera frame: x right, y down, z forward.
Eigen::Vector3d equirect_direction(double lon, double lat);

ImageRaster render_equirect(const SphereField& field, int width, int height);

// Perspective rendering of the field at the given yaw: the analytic ground
// truth the slicing path is compared against.
ImageRaster render_view(const SphereField& field, const CameraParams& params,
                        double yaw_deg);

// Band-limited planar test image (sum of 2-D sinusoids), values in (0, 1).
ImageRaster make_smooth_image(std::uint64_t seed, int size, int channels = 3,
                              double max_cycles = 8.0);

}  // namespace panogeo
