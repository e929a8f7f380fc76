#include "panogeo/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace panogeo {

nlohmann::json params_to_json(const CameraParams& p) {
  return nlohmann::json{{"fov_deg", p.fov_deg},
                        {"phi_deg", p.phi_deg},
                        {"psi_deg", p.psi_deg},
                        {"width", p.width},
                        {"height", p.height}};
}

CameraParams params_from_json(const nlohmann::json& j) {
  CameraParams p;
  p.fov_deg = j.at("fov_deg").get<double>();
  p.phi_deg = j.at("phi_deg").get<double>();
  p.psi_deg = j.at("psi_deg").get<double>();
  p.width = j.at("width").get<int>();
  p.height = j.at("height").get<int>();
  p.validate();
  return p;
}

void save_params_sidecar(const std::filesystem::path& path, const CameraParams& p) {
  save_json(path, params_to_json(p));
}

CameraParams load_params_sidecar(const std::filesystem::path& path) {
  return params_from_json(load_json(path));
}

nlohmann::json homography_to_json(const Homography& h) {
  // The wire format fixes h[2][2] = 1; the in-memory sign is a projective
  // orientation detail the format does not carry.
  const double s = h(2, 2) != 0.0 ? h(2, 2) : 1.0;
  nlohmann::json arr = nlohmann::json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      arr.push_back(h(r, c) / s);
    }
  }
  return arr;
}

Homography homography_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 9) {
    throw std::invalid_argument("homography JSON must be an array of 9 numbers");
  }
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      m(r, c) = j.at(static_cast<std::size_t>(r * 3 + c)).get<double>();
    }
  }
  return Homography(m);
}

void save_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream f(path);
  if (!f) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  f << j.dump(2) << "\n";
  if (!f) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) {
    throw std::runtime_error("cannot open: " + path.string());
  }
  nlohmann::json j;
  f >> j;
  return j;
}

}  // namespace panogeo
