#pragma once

#include <Eigen/Dense>
#include <optional>

namespace panogeo {

// Camera conventions shared by every module:
//  - Camera frame: x right, y down, z forward along the optical axis.
//  - Pixel coordinates address pixel centers, (0, 0) top-left; the principal
//    point sits at the image center ((w-1)/2, (h-1)/2).
//  - Focal length: fx = fy = (width/2) / tan(fov/2); square pixels, zero skew.
//  - View rotation relative to the canonical camera:
//    R = R_y(theta) * R_x(phi) * R_z(psi), with theta fixed to 0 for
//    single-view work. Positive phi tilts the camera up, so image content
//    moves down; positive psi makes image content rotate counter-clockwise
//    on screen.
//  - A homography built by homography_from_params maps input-view pixel
//    coordinates to canonical-view pixel coordinates. Backward warping
//    samples through its inverse.

inline constexpr double kPi = 3.1415926535897932384626433832795;

inline double deg2rad(double d) { return d * (kPi / 180.0); }
inline double rad2deg(double r) { return r * (180.0 / kPi); }

// The 3-DoF view description: field of view plus x- and z-axis rotations.
struct CameraParams {
  double fov_deg = 90.0;
  double phi_deg = 0.0;
  double psi_deg = 0.0;
  int width = 512;
  int height = 512;

  static CameraParams canonical(int size = 512) {
    return CameraParams{90.0, 0.0, 0.0, size, size};
  }

  bool is_canonical() const {
    return fov_deg == 90.0 && phi_deg == 0.0 && psi_deg == 0.0 && width == 512 &&
           height == 512;
  }

  // Throws std::invalid_argument when outside the valid domain.
  void validate() const;
};

struct Intrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double skew = 0.0;  // always 0

  Eigen::Matrix3d matrix() const;
  // Closed-form inverse; keeps K * K^-1 exact to the last ulp for canonical views.
  Eigen::Matrix3d inverse_matrix() const;
};

Intrinsics intrinsics_from_params(const CameraParams& params);

// R = R_y(theta) * R_x(phi) * R_z(psi); orthogonal with det +1.
Eigen::Matrix3d rotation_from_angles(double phi_deg, double psi_deg, double theta_deg);

// 3x3 projective map between image planes, scaled so h(2,2) = 1 whenever
// h(2,2) != 0. Construction rejects singular matrices.
class Homography {
 public:
  Homography() { h_.setIdentity(); }
  explicit Homography(const Eigen::Matrix3d& h);

  const Eigen::Matrix3d& matrix() const { return h_; }
  double operator()(int r, int c) const { return h_(r, c); }
  Homography inverse() const;

 private:
  Eigen::Matrix3d h_;
};

// H = K_canonical * R(phi, psi, 0) * K_input^-1, input pixels to canonical pixels.
Homography homography_from_params(const CameraParams& input, const CameraParams& canonical);

inline constexpr double kBehindCameraEps = 1e-9;

// Returns nullopt when the point maps behind the camera (w <= kBehindCameraEps).
std::optional<Eigen::Vector2d> project_point(const Homography& h, const Eigen::Vector2d& p);

struct ParamRecovery {
  bool in_family = false;
  // Frobenius distance between the normalized input and the homography rebuilt
  // from the recovered parameters.
  double residual = 0.0;
  CameraParams params;
};

// Inverts homography_from_params for matrices in the 3-DoF family. width and
// height describe the input view the homography was built for.
ParamRecovery params_from_homography(const Homography& h, int width, int height,
                                     const CameraParams& canonical = CameraParams::canonical(),
                                     double tol = 1e-6);

}  // namespace panogeo
