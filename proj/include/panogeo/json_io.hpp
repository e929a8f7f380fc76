#pragma once

#include <filesystem>

#include <json.hpp>

#include "panogeo/geometry.hpp"

namespace panogeo {

// Camera-parameter sidecar:
//   {"fov_deg": float, "phi_deg": float, "psi_deg": float, "width": int, "height": int}
nlohmann::json params_to_json(const CameraParams& p);
CameraParams params_from_json(const nlohmann::json& j);

void save_params_sidecar(const std::filesystem::path& path, const CameraParams& p);
CameraParams load_params_sidecar(const std::filesystem::path& path);

// Homographies serialize as a JSON array of 9 numbers, row-major, h(2,2)-normalized.
nlohmann::json homography_to_json(const Homography& h);
Homography homography_from_json(const nlohmann::json& j);

// Shared helpers for reports and resolved-config echoes.
void save_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace panogeo
