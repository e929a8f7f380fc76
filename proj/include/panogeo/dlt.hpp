#pragma once

#include <vector>

#include <Eigen/Dense>

#include "panogeo/geometry.hpp"

namespace panogeo {

// Direct linear transform fit of a homography from >= 4 point pairs, with
// Hartley normalization (centroid to origin, mean distance sqrt(2)) for
// conditioning. Serves as the linear-algebra oracle the closed-form
// construction is checked against; shares no code with it.
Homography fit_homography_dlt(const std::vector<Eigen::Vector2d>& src,
                              const std::vector<Eigen::Vector2d>& dst);

}  // namespace panogeo
