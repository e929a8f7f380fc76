#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "panogeo/pano.hpp"

namespace panogeo {

// Correspondence-aware attention over K x K source neighborhoods. For each
// visible target pixel p_t with source anchor p_s:
//   q = W_Q f(p_t), logits l_n = scale * q . (W_K f(n)) over the valid
//   neighbors n of p_s, M(p_t) = sum_n softmax(l)_n W_V f(n).
// There is no 1/sqrt(d) factor; logit_scale defaults to 1. All reference
// arithmetic is in double precision.
struct CaaTensors {
  int target_width = 0;
  int target_height = 0;
  int source_width = 0;
  int source_height = 0;
  int dim = 0;
  std::vector<double> target_features;  // row-major [y][x][d]
  std::vector<double> source_features;
  Eigen::MatrixXd w_q, w_k, w_v;        // d x d
  int k = 3;                            // odd neighborhood size
  double logit_scale = 1.0;

  void validate(const CorrespondenceMap& map) const;
  const double* target_at(int x, int y) const {
    return target_features.data() +
           (static_cast<std::size_t>(y) * target_width + x) * dim;
  }
  const double* source_at(int x, int y) const {
    return source_features.data() +
           (static_cast<std::size_t>(y) * source_width + x) * dim;
  }
};

struct CaaOutput {
  int width = 0;
  int height = 0;
  int dim = 0;
  std::vector<double> values;          // zero vector where skipped
  std::vector<std::uint8_t> skipped;   // 1 = invisible target, no output

  const double* at(int x, int y) const {
    return values.data() + (static_cast<std::size_t>(y) * width + x) * dim;
  }
};

struct CaaGradients {
  std::vector<double> d_target;  // layout of target_features
  std::vector<double> d_source;  // layout of source_features
  Eigen::MatrixXd d_w_q, d_w_k, d_w_v;
};

// Numerically stable softmax (max subtraction). Exposed so the shift
// invariance of the logit layer is testable in isolation.
std::vector<double> stable_softmax(const std::vector<double>& logits);

CaaOutput caa_forward(const CaaTensors& t, const CorrespondenceMap& map);

// Analytic gradients of sum_pixels upstream(p) . M(p) w.r.t. features and
// weights. Accumulation order is fixed (targets row-major, neighbors in
// gather order) so repeated runs are bit-identical.
CaaGradients caa_backward(const CaaTensors& t, const CorrespondenceMap& map,
                          const std::vector<double>& upstream);

}  // namespace panogeo
