#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "panogeo/dlt.hpp"
#include "panogeo/geometry.hpp"
#include "panogeo/json_io.hpp"
#include "panogeo/rng.hpp"

using namespace panogeo;

TEST_CASE("canonical intrinsics are exact") {
  const Intrinsics k = intrinsics_from_params(CameraParams::canonical());
  CHECK(k.fx == 256.0);
  CHECK(k.fy == 256.0);
  CHECK(k.cx == 255.5);
  CHECK(k.cy == 255.5);
  CHECK(k.skew == 0.0);
}

TEST_CASE("focal length follows the half-angle cotangent") {
  CameraParams p;
  p.fov_deg = 60.0;
  p.width = p.height = 512;
  const Intrinsics k = intrinsics_from_params(p);
  // (512 / 2) * cot(30 deg) = 256 * sqrt(3)
  CHECK(k.fx == doctest::Approx(256.0 * std::sqrt(3.0)).epsilon(1e-12));
  CHECK(k.cx == 255.5);
}

TEST_CASE("non-square images keep square pixels") {
  CameraParams p;
  p.fov_deg = 80.0;
  p.width = 640;
  p.height = 480;
  const Intrinsics k = intrinsics_from_params(p);
  CHECK(k.fx == k.fy);
  CHECK(k.cx == doctest::Approx(319.5));
  CHECK(k.cy == doctest::Approx(239.5));
}

TEST_CASE("canonical parameters give the identity homography") {
  const CameraParams c = CameraParams::canonical();
  const Homography h = homography_from_params(c, c);
  double max_abs = 0.0;
  for (int r = 0; r < 3; ++r)
    for (int col = 0; col < 3; ++col)
      max_abs = std::max(max_abs, std::abs(h(r, col) - (r == col ? 1.0 : 0.0)));
  CHECK(max_abs <= 1e-12);
}

TEST_CASE("pure fov change rescales around the image center") {
  CameraParams in;
  in.fov_deg = 60.0;
  in.width = in.height = 512;
  const Homography h = homography_from_params(in, CameraParams::canonical());
  const auto p = project_point(h, Eigen::Vector2d(511.0, 255.5));
  REQUIRE(p.has_value());
  // fx_canon / fx_60 = 1/sqrt(3); the offset from center shrinks accordingly
  CHECK(p->x() == doctest::Approx(255.5 + 255.5 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(p->y() == doctest::Approx(255.5).epsilon(1e-12));
  const auto c = project_point(h, Eigen::Vector2d(255.5, 255.5));
  REQUIRE(c.has_value());
  CHECK(c->x() == doctest::Approx(255.5).epsilon(1e-12));
  CHECK(c->y() == doctest::Approx(255.5).epsilon(1e-12));
}

TEST_CASE("rotations are orthonormal and angle recovery matches") {
  Rng rng(0x51f0ull);
  for (int i = 0; i < 50; ++i) {
    const double phi = rng.uniform(-15.0, 15.0);
    const double psi = rng.uniform(-15.0, 15.0);
    const Eigen::Matrix3d r = rotation_from_angles(phi, psi, 0.0);
    CHECK((r * r.transpose() - Eigen::Matrix3d::Identity()).norm() <= 1e-14);
    CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-14));
    // the recovery identities used by params_from_homography
    CHECK(rad2deg(std::atan2(-r(1, 2), r(2, 2))) == doctest::Approx(phi).epsilon(1e-12));
    CHECK(rad2deg(std::atan2(-r(0, 1), r(0, 0))) == doctest::Approx(psi).epsilon(1e-12));
  }
}

TEST_CASE("positive phi points the input camera above the canonical horizon") {
  CameraParams in;
  in.fov_deg = 90.0;
  in.phi_deg = 5.0;
  in.width = in.height = 512;
  const Homography h = homography_from_params(in, CameraParams::canonical());
  // the tilted camera's center ray lands above the canonical center
  const auto p = project_point(h, Eigen::Vector2d(255.5, 255.5));
  REQUIRE(p.has_value());
  CHECK(p->y() < 255.5);
  CHECK(p->x() == doctest::Approx(255.5).epsilon(1e-12));
}

TEST_CASE("positive psi turns the input frame axes clockwise in canonical coordinates") {
  CameraParams in;
  in.fov_deg = 90.0;
  in.psi_deg = 5.0;
  in.width = in.height = 512;
  const Homography h = homography_from_params(in, CameraParams::canonical());
  // clockwise frame rotation reads as counter-clockwise content motion in the warp
  const auto p = project_point(h, Eigen::Vector2d(400.0, 255.5));
  REQUIRE(p.has_value());
  CHECK(p->y() > 255.5);
}

TEST_CASE("parameter round trip over the full grid") {
  double max_err = 0.0;
  for (int fi = 0; fi <= 6; ++fi)
    for (int pi = 0; pi <= 6; ++pi)
      for (int si = 0; si <= 6; ++si) {
        CameraParams p;
        p.fov_deg = 60.0 + fi * (50.0 / 6.0);
        p.phi_deg = -15.0 + pi * 5.0;
        p.psi_deg = -15.0 + si * 5.0;
        p.width = p.height = 512;
        const Homography h = homography_from_params(p, CameraParams::canonical());
        const ParamRecovery rec = params_from_homography(h, 512, 512);
        REQUIRE(rec.in_family);
        max_err = std::max({max_err, std::abs(rec.params.fov_deg - p.fov_deg),
                            std::abs(rec.params.phi_deg - p.phi_deg),
                            std::abs(rec.params.psi_deg - p.psi_deg)});
      }
  CHECK(max_err <= 1e-7);
}

TEST_CASE("round trip survives non-square sizes") {
  CameraParams p;
  p.fov_deg = 72.5;
  p.phi_deg = -9.25;
  p.psi_deg = 13.5;
  p.width = 640;
  p.height = 480;
  const Homography h = homography_from_params(p, CameraParams::canonical());
  const ParamRecovery rec = params_from_homography(h, 640, 480);
  REQUIRE(rec.in_family);
  CHECK(rec.params.fov_deg == doctest::Approx(p.fov_deg).epsilon(1e-9));
  CHECK(rec.params.phi_deg == doctest::Approx(p.phi_deg).epsilon(1e-9));
  CHECK(rec.params.psi_deg == doctest::Approx(p.psi_deg).epsilon(1e-9));
}

TEST_CASE("recovery rejects matrices outside the family") {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(0, 1) = 0.3;  // shear is not in the 3-DoF family
  const ParamRecovery rec = params_from_homography(Homography(m), 512, 512);
  CHECK_FALSE(rec.in_family);
  CHECK(rec.residual > 1e-6);
}

TEST_CASE("project_point reports points behind the camera") {
  const Intrinsics k = intrinsics_from_params(CameraParams::canonical());
  // a 120 degree y-rotation puts the forward ray behind the camera
  const Eigen::Matrix3d ry =
      Eigen::AngleAxisd(deg2rad(120.0), Eigen::Vector3d::UnitY())
          .toRotationMatrix();
  const Homography h(k.matrix() * ry * k.inverse_matrix());
  CHECK_FALSE(project_point(h, Eigen::Vector2d(255.5, 255.5)).has_value());
}

TEST_CASE("homography inverse composes to identity") {
  CameraParams p;
  p.fov_deg = 100.0;
  p.phi_deg = 7.0;
  p.psi_deg = -3.0;
  p.width = p.height = 512;
  const Homography h = homography_from_params(p, CameraParams::canonical());
  const Eigen::Matrix3d prod = h.matrix() * h.inverse().matrix();
  CHECK((prod / prod(2, 2) - Eigen::Matrix3d::Identity()).norm() <= 1e-12);
}

TEST_CASE("DLT from four corners matches the closed form") {
  Rng rng(0xd17aull);
  for (int i = 0; i < 20; ++i) {
    CameraParams p;
    p.fov_deg = rng.uniform(60.0, 110.0);
    p.phi_deg = rng.uniform(-15.0, 15.0);
    p.psi_deg = rng.uniform(-15.0, 15.0);
    p.width = p.height = 512;
    const Homography h = homography_from_params(p, CameraParams::canonical());
    std::vector<Eigen::Vector2d> src, dst;
    for (const auto& c : {Eigen::Vector2d(0, 0), Eigen::Vector2d(511, 0),
                          Eigen::Vector2d(0, 511), Eigen::Vector2d(511, 511)}) {
      const auto q = project_point(h, c);
      REQUIRE(q.has_value());
      src.push_back(c);
      dst.push_back(*q);
    }
    const Homography fit = fit_homography_dlt(src, dst);
    Eigen::Matrix3d a = h.matrix() / h.matrix().norm();
    Eigen::Matrix3d b = fit.matrix() / fit.matrix().norm();
    if ((a - b).norm() > (a + b).norm()) b = -b;
    CHECK((a - b).norm() <= 1e-6);
  }
}

TEST_CASE("DLT needs at least four pairs") {
  std::vector<Eigen::Vector2d> pts = {{0, 0}, {1, 0}, {0, 1}};
  CHECK_THROWS_AS(fit_homography_dlt(pts, pts), std::invalid_argument);
}

TEST_CASE("params sidecar JSON round trip") {
  CameraParams p;
  p.fov_deg = 83.25;
  p.phi_deg = -4.5;
  p.psi_deg = 11.125;
  p.width = 320;
  p.height = 240;
  const CameraParams q = params_from_json(params_to_json(p));
  CHECK(q.fov_deg == p.fov_deg);
  CHECK(q.phi_deg == p.phi_deg);
  CHECK(q.psi_deg == p.psi_deg);
  CHECK(q.width == p.width);
  CHECK(q.height == p.height);

  const auto path = std::filesystem::temp_directory_path() / "pg_params_rt.json";
  save_params_sidecar(path, p);
  const CameraParams r = load_params_sidecar(path);
  CHECK(r.fov_deg == p.fov_deg);
  CHECK(r.psi_deg == p.psi_deg);
  std::filesystem::remove(path);
}

TEST_CASE("homography JSON is h22-normalized and round trips") {
  CameraParams p;
  p.fov_deg = 95.0;
  p.phi_deg = 10.0;
  p.psi_deg = -12.0;
  p.width = p.height = 512;
  const Homography h = homography_from_params(p, CameraParams::canonical());
  const nlohmann::json j = homography_to_json(h);
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 9);
  CHECK(j[8].get<double>() == 1.0);
  const Homography h2 = homography_from_json(j);
  CHECK((h.matrix() - h2.matrix()).norm() <= 1e-12);
}
