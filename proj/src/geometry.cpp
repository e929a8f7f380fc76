#include "panogeo/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace panogeo {

void CameraParams::validate() const {
  if (!(fov_deg > 0.0 && fov_deg < 180.0)) {
    throw std::invalid_argument("CameraParams: fov_deg must lie in (0, 180)");
  }
  if (width < 2 || height < 2) {
    throw std::invalid_argument("CameraParams: width and height must be >= 2");
  }
  if (!std::isfinite(phi_deg) || !std::isfinite(psi_deg)) {
    throw std::invalid_argument("CameraParams: rotations must be finite");
  }
}

Eigen::Matrix3d Intrinsics::matrix() const {
  Eigen::Matrix3d k;
  k << fx, skew, cx,  //
      0.0, fy, cy,    //
      0.0, 0.0, 1.0;
  return k;
}

Eigen::Matrix3d Intrinsics::inverse_matrix() const {
  Eigen::Matrix3d k;
  k << 1.0 / fx, 0.0, -cx / fx,  //
      0.0, 1.0 / fy, -cy / fy,   //
      0.0, 0.0, 1.0;
  return k;
}

Intrinsics intrinsics_from_params(const CameraParams& params) {
  params.validate();
  const double fov = deg2rad(params.fov_deg);
  // cot(fov/2) through the half-angle identity; unlike tan(fov/2) it yields
  // an exact 1.0 at fov = 90 deg, and it is well conditioned on (0, 180).
  const double cot_half = (1.0 + std::cos(fov)) / std::sin(fov);
  Intrinsics k;
  k.fx = (params.width / 2.0) * cot_half;
  k.fy = k.fx;  // square pixels; the vertical fov is implied
  k.cx = (params.width - 1) / 2.0;
  k.cy = (params.height - 1) / 2.0;
  return k;
}

namespace {

Eigen::Matrix3d rot_x(double rad) {
  const double c = std::cos(rad), s = std::sin(rad);
  Eigen::Matrix3d m;
  m << 1, 0, 0,  //
      0, c, -s,  //
      0, s, c;
  return m;
}

Eigen::Matrix3d rot_z(double rad) {
  const double c = std::cos(rad), s = std::sin(rad);
  Eigen::Matrix3d m;
  m << c, -s, 0,  //
      s, c, 0,    //
      0, 0, 1;
  return m;
}

Eigen::Matrix3d rot_y(double rad) {
  const double c = std::cos(rad), s = std::sin(rad);
  Eigen::Matrix3d m;
  m << c, 0, s,  //
      0, 1, 0,   //
      -s, 0, c;
  return m;
}

}  // namespace

Eigen::Matrix3d rotation_from_angles(double phi_deg, double psi_deg, double theta_deg) {
  return rot_y(deg2rad(theta_deg)) * rot_x(deg2rad(phi_deg)) * rot_z(deg2rad(psi_deg));
}

Homography::Homography(const Eigen::Matrix3d& h) : h_(h) {
  const double det = h_.determinant();
  if (!(std::abs(det) > 0.0) || !std::isfinite(det)) {
    throw std::invalid_argument("Homography: matrix must be invertible");
  }
  // Normalizing by |h22| keeps the projective sign, so the front-side test
  // in project_point survives composition and inversion.
  if (h_(2, 2) != 0.0) {
    h_ /= std::abs(h_(2, 2));
  }
}

Homography Homography::inverse() const { return Homography(h_.inverse().eval()); }

Homography homography_from_params(const CameraParams& input, const CameraParams& canonical) {
  const Intrinsics k1 = intrinsics_from_params(input);
  const Intrinsics k2 = intrinsics_from_params(canonical);
  const Eigen::Matrix3d r = rotation_from_angles(input.phi_deg, input.psi_deg, 0.0);
  return Homography(k2.matrix() * r * k1.inverse_matrix());
}

std::optional<Eigen::Vector2d> project_point(const Homography& h, const Eigen::Vector2d& p) {
  const Eigen::Vector3d q = h.matrix() * Eigen::Vector3d(p.x(), p.y(), 1.0);
  if (q.z() <= kBehindCameraEps) {
    return std::nullopt;
  }
  return Eigen::Vector2d(q.x() / q.z(), q.y() / q.z());
}

ParamRecovery params_from_homography(const Homography& h, int width, int height,
                                     const CameraParams& canonical, double tol) {
  ParamRecovery out;
  out.params.width = width;
  out.params.height = height;

  const Intrinsics k2 = intrinsics_from_params(canonical);
  const double cx1 = (width - 1) / 2.0;
  const double cy1 = (height - 1) / 2.0;

  // M = K2^-1 H = R K1^-1 / k for some scale k. The first two columns are
  // scaled rotation columns; the principal-point combination isolates r3.
  const Eigen::Matrix3d m = k2.inverse_matrix() * h.matrix();
  const Eigen::Vector3d c0 = m.col(0);
  const Eigen::Vector3d c1 = m.col(1);
  const Eigen::Vector3d v3 = m.col(2) + cx1 * c0 + cy1 * c1;

  const double n0 = c0.norm();
  if (!(n0 > 0.0) || !(v3.norm() > 0.0)) {
    out.residual = std::numeric_limits<double>::infinity();
    return out;
  }
  const double focal = v3.norm() / n0;

  Eigen::Vector3d r1 = c0 / n0;
  Eigen::Vector3d r2 = (c1 - c1.dot(r1) * r1).normalized();
  Eigen::Vector3d r3 = r1.cross(r2);
  if (r3.dot(v3) < 0.0) {
    // Negative overall scale: the first two columns carry a flipped sign.
    r1 = -r1;
    r2 = -r2;
  }

  Eigen::Matrix3d r;
  r.col(0) = r1;
  r.col(1) = r2;
  r.col(2) = r3;

  out.params.fov_deg = rad2deg(2.0 * std::atan((width / 2.0) / focal));
  out.params.phi_deg = rad2deg(std::atan2(-r(1, 2), r(2, 2)));
  out.params.psi_deg = rad2deg(std::atan2(-r(0, 1), r(0, 0)));

  if (!(out.params.fov_deg > 0.0 && out.params.fov_deg < 180.0)) {
    out.residual = std::numeric_limits<double>::infinity();
    return out;
  }

  const Homography rebuilt = homography_from_params(out.params, canonical);
  out.residual = (rebuilt.matrix() - h.matrix()).norm();
  out.in_family = out.residual <= tol;
  return out;
}

}  // namespace panogeo
