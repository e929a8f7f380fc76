#include "panogeo/caa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace panogeo {

void CaaTensors::validate(const CorrespondenceMap& map) const {
  if (dim < 1) throw std::invalid_argument("caa: dim must be >= 1");
  if (k <= 0 || k % 2 == 0) throw std::invalid_argument("caa: K must be odd");
  if (map.width != target_width || map.height != target_height ||
      map.source_width != source_width || map.source_height != source_height)
    throw std::invalid_argument("caa: map and feature grids disagree");
  const auto tsize = static_cast<std::size_t>(target_width) * target_height * dim;
  const auto ssize = static_cast<std::size_t>(source_width) * source_height * dim;
  if (target_features.size() != tsize || source_features.size() != ssize)
    throw std::invalid_argument("caa: feature buffer size mismatch");
  if (w_q.rows() != dim || w_q.cols() != dim || w_k.rows() != dim ||
      w_k.cols() != dim || w_v.rows() != dim || w_v.cols() != dim)
    throw std::invalid_argument("caa: weight matrices must be dim x dim");
  for (double f : target_features)
    if (!std::isfinite(f)) throw std::invalid_argument("caa: non-finite feature");
  for (double f : source_features)
    if (!std::isfinite(f)) throw std::invalid_argument("caa: non-finite feature");
}

std::vector<double> stable_softmax(const std::vector<double>& logits) {
  std::vector<double> out(logits.size(), 0.0);
  if (logits.empty()) return out;
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

namespace {

using VecMap = Eigen::Map<const Eigen::VectorXd>;

struct NeighborSet {
  std::vector<const double*> feats;       // valid neighbor features
  std::vector<std::size_t> offsets;       // flat feature offsets, for grads
};

NeighborSet valid_neighbors(const CaaTensors& t, const Neighborhood& n) {
  NeighborSet set;
  for (std::size_t j = 0; j < n.positions.size(); ++j) {
    if (!n.valid[j]) continue;
    const int sx = n.positions[j].x();
    const int sy = n.positions[j].y();
    const std::size_t off =
        (static_cast<std::size_t>(sy) * t.source_width + sx) * t.dim;
    set.feats.push_back(t.source_features.data() + off);
    set.offsets.push_back(off);
  }
  return set;
}

}  // namespace

CaaOutput caa_forward(const CaaTensors& t, const CorrespondenceMap& map) {
  t.validate(map);
  CaaOutput out;
  out.width = t.target_width;
  out.height = t.target_height;
  out.dim = t.dim;
  out.values.assign(
      static_cast<std::size_t>(t.target_width) * t.target_height * t.dim, 0.0);
  out.skipped.assign(
      static_cast<std::size_t>(t.target_width) * t.target_height, 0);

  std::vector<double> logits;
  for (int y = 0; y < t.target_height; ++y) {
    for (int x = 0; x < t.target_width; ++x) {
      const std::size_t pi = static_cast<std::size_t>(y) * t.target_width + x;
      const Neighborhood nb = gather_neighborhood(map, x, y, t.k);
      if (!nb.visible) {
        out.skipped[pi] = 1;
        continue;
      }
      const NeighborSet ns = valid_neighbors(t, nb);
      if (ns.feats.empty()) {
        out.skipped[pi] = 1;
        continue;
      }
      const Eigen::VectorXd q = t.w_q * VecMap(t.target_at(x, y), t.dim);
      logits.clear();
      for (const double* f : ns.feats)
        logits.push_back(t.logit_scale * q.dot(t.w_k * VecMap(f, t.dim)));
      const std::vector<double> a = stable_softmax(logits);
      Eigen::Map<Eigen::VectorXd> m(out.values.data() + pi * t.dim, t.dim);
      for (std::size_t j = 0; j < ns.feats.size(); ++j)
        m += a[j] * (t.w_v * VecMap(ns.feats[j], t.dim));
    }
  }
  return out;
}

CaaGradients caa_backward(const CaaTensors& t, const CorrespondenceMap& map,
                          const std::vector<double>& upstream) {
  t.validate(map);
  if (upstream.size() != static_cast<std::size_t>(t.target_width) *
                             t.target_height * t.dim)
    throw std::invalid_argument("caa_backward: upstream size mismatch");

  CaaGradients g;
  g.d_target.assign(t.target_features.size(), 0.0);
  g.d_source.assign(t.source_features.size(), 0.0);
  g.d_w_q = Eigen::MatrixXd::Zero(t.dim, t.dim);
  g.d_w_k = Eigen::MatrixXd::Zero(t.dim, t.dim);
  g.d_w_v = Eigen::MatrixXd::Zero(t.dim, t.dim);

  std::vector<double> logits;
  for (int y = 0; y < t.target_height; ++y) {
    for (int x = 0; x < t.target_width; ++x) {
      const std::size_t pi = static_cast<std::size_t>(y) * t.target_width + x;
      const Neighborhood nb = gather_neighborhood(map, x, y, t.k);
      if (!nb.visible) continue;
      const NeighborSet ns = valid_neighbors(t, nb);
      if (ns.feats.empty()) continue;

      const VecMap ft(t.target_at(x, y), t.dim);
      const VecMap gu(upstream.data() + pi * t.dim, t.dim);
      const Eigen::VectorXd q = t.w_q * ft;
      const std::size_t n = ns.feats.size();

      logits.clear();
      std::vector<Eigen::VectorXd> keys(n), vals(n);
      for (std::size_t j = 0; j < n; ++j) {
        const VecMap fs(ns.feats[j], t.dim);
        keys[j] = t.w_k * fs;
        vals[j] = t.w_v * fs;
        logits.push_back(t.logit_scale * q.dot(keys[j]));
      }
      const std::vector<double> a = stable_softmax(logits);

      // dL/dl_j = a_j (g.v_j - sum_m a_m g.v_m)
      double mean_gv = 0.0;
      std::vector<double> gv(n);
      for (std::size_t j = 0; j < n; ++j) {
        gv[j] = gu.dot(vals[j]);
        mean_gv += a[j] * gv[j];
      }

      Eigen::VectorXd dq = Eigen::VectorXd::Zero(t.dim);
      for (std::size_t j = 0; j < n; ++j) {
        const VecMap fs(ns.feats[j], t.dim);
        const double dl = a[j] * (gv[j] - mean_gv);

        g.d_w_v.noalias() += a[j] * gu * fs.transpose();
        Eigen::Map<Eigen::VectorXd> dsrc(g.d_source.data() + ns.offsets[j],
                                         t.dim);
        dsrc.noalias() += a[j] * (t.w_v.transpose() * gu);

        dq.noalias() += (t.logit_scale * dl) * keys[j];
        g.d_w_k.noalias() += (t.logit_scale * dl) * q * fs.transpose();
        dsrc.noalias() += (t.logit_scale * dl) * (t.w_k.transpose() * q);
      }
      g.d_w_q.noalias() += dq * ft.transpose();
      Eigen::Map<Eigen::VectorXd> dtgt(
          g.d_target.data() +
              (static_cast<std::size_t>(y) * t.target_width + x) * t.dim,
          t.dim);
      dtgt.noalias() += t.w_q.transpose() * dq;
    }
  }
  return g;
}

}  // namespace panogeo
