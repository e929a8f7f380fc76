#include "panogeo/synth.hpp"

#include <cmath>

#include "panogeo/rng.hpp"

namespace panogeo {

namespace {

// Keeps field values inside (0, 1) with headroom on both sides.
constexpr double kTotalAmplitude = 0.42;

Eigen::Vector3d random_unit_vector(Rng& rng) {
  // Marsaglia rejection keeps the distribution uniform and the draw count
  // data-dependent but deterministic per rng state.
  for (;;) {
    const double a = rng.uniform(-1.0, 1.0);
    const double b = rng.uniform(-1.0, 1.0);
    const double s = a * a + b * b;
    if (s >= 1.0 || s == 0.0) continue;
    const double r = 2.0 * std::sqrt(1.0 - s);
    return {a * r, b * r, 1.0 - 2.0 * s};
  }
}

}  // namespace

SphereField SphereField::make(std::uint64_t seed, int channels,
                              int waves_per_channel, double max_freq) {
  Rng rng(mix_seed(seed, 0x5f1e1dull));
  SphereField field;
  field.waves.resize(channels);
  for (int c = 0; c < channels; ++c) {
    auto& ws = field.waves[c];
    ws.resize(waves_per_channel);
    double total = 0.0;
    for (auto& w : ws) {
      w.k = random_unit_vector(rng) * (max_freq * rng.uniform(0.25, 1.0));
      w.phase = rng.uniform(0.0, 2.0 * kPi);
      w.amp = rng.uniform(0.5, 1.0);
      total += w.amp;
    }
    for (auto& w : ws) w.amp *= kTotalAmplitude / total;
  }
  return field;
}

double SphereField::eval(const Eigen::Vector3d& unit_dir, int channel) const {
  double v = bias;
  for (const auto& w : waves[channel])
    v += w.amp * std::sin(w.k.dot(unit_dir) + w.phase);
  return v;
}

Eigen::Vector3d equirect_direction(double lon, double lat) {
  const double cl = std::cos(lat);
  return {std::sin(lon) * cl, -std::sin(lat), std::cos(lon) * cl};
}

ImageRaster render_equirect(const SphereField& field, int width, int height) {
  const int channels = static_cast<int>(field.waves.size());
  ImageRaster img = ImageRaster::zeros(width, height, channels);
  for (int y = 0; y < height; ++y) {
    const double lat = (0.5 - (y + 0.5) / height) * kPi;
    for (int x = 0; x < width; ++x) {
      const double lon = ((x + 0.5) / width - 0.5) * 2.0 * kPi;
      const Eigen::Vector3d d = equirect_direction(lon, lat);
      for (int c = 0; c < channels; ++c) img.at(x, y, c) = field.eval(d, c);
    }
  }
  return img;
}

ImageRaster render_view(const SphereField& field, const CameraParams& params,
                        double yaw_deg) {
  const int channels = static_cast<int>(field.waves.size());
  ImageRaster img = ImageRaster::zeros(params.width, params.height, channels);
  const Intrinsics k = intrinsics_from_params(params);
  const Eigen::Matrix3d r = rotation_from_angles(params.phi_deg, params.psi_deg,
                                                 yaw_deg);
  for (int y = 0; y < params.height; ++y) {
    for (int x = 0; x < params.width; ++x) {
      Eigen::Vector3d d_cam((x - k.cx) / k.fx, (y - k.cy) / k.fy, 1.0);
      const Eigen::Vector3d d = (r * d_cam).normalized();
      for (int c = 0; c < channels; ++c) img.at(x, y, c) = field.eval(d, c);
    }
  }
  return img;
}

ImageRaster make_smooth_image(std::uint64_t seed, int size, int channels,
                              double max_cycles) {
  Rng rng(mix_seed(seed, 0x2d51a7ull));
  ImageRaster img = ImageRaster::zeros(size, size, channels);
  const int waves_per_channel = 16;
  for (int c = 0; c < channels; ++c) {
    struct Planar {
      double kx, ky, phase, amp;
    };
    std::vector<Planar> ws(waves_per_channel);
    double total = 0.0;
    for (auto& w : ws) {
      const double ang = rng.uniform(0.0, 2.0 * kPi);
      const double cycles = max_cycles * rng.uniform(0.25, 1.0);
      const double freq = 2.0 * kPi * cycles / size;
      w.kx = freq * std::cos(ang);
      w.ky = freq * std::sin(ang);
      w.phase = rng.uniform(0.0, 2.0 * kPi);
      w.amp = rng.uniform(0.5, 1.0);
      total += w.amp;
    }
    for (auto& w : ws) w.amp *= kTotalAmplitude / total;
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x) {
        double v = 0.5;
        for (const auto& w : ws)
          v += w.amp * std::sin(w.kx * x + w.ky * y + w.phase);
        img.at(x, y, c) = v;
      }
  }
  return img;
}

}  // namespace panogeo
