#include "panogeo/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "panogeo/binio.hpp"
#include "panogeo/rng.hpp"

namespace panogeo {

void BinSpec::validate() const {
  if (step <= 0.0) throw std::invalid_argument("BinSpec: step must be positive");
  if (hi <= lo) throw std::invalid_argument("BinSpec: hi must exceed lo");
  const double n = (hi - lo) / step;
  if (std::abs(n - std::round(n)) > 1e-9)
    throw std::invalid_argument("BinSpec: range not divisible by step");
  if (count() < 2) throw std::invalid_argument("BinSpec: needs >= 2 bins");
}

int BinSpec::count() const {
  return static_cast<int>(std::round((hi - lo) / step)) + 1;
}

int BinSpec::index_of(double value) const {
  const int i = static_cast<int>(std::lround((value - lo) / step));
  return std::clamp(i, 0, count() - 1);
}

BinSpec default_fov_bins() { return {60.0, 110.0, 1.0}; }
BinSpec default_phi_bins() { return {-15.0, 15.0, 1.0}; }
BinSpec default_psi_bins() { return {-15.0, 15.0, 1.0}; }

namespace {

Eigen::MatrixXf silu(const Eigen::MatrixXf& z) {
  return z.array() * (1.0f / (1.0f + (-z.array()).exp()));
}

Eigen::MatrixXf silu_grad(const Eigen::MatrixXf& z) {
  const auto s = 1.0f / (1.0f + (-z.array()).exp());
  return (s * (1.0f + z.array() * (1.0f - s))).matrix();
}

struct ForwardCache {
  std::vector<Eigen::MatrixXf> zs;    // pre-activations per trunk layer
  std::vector<Eigen::MatrixXf> acts;  // acts[0] = input, then activations
};

Eigen::MatrixXf trunk_forward(const MlpParams& mlp, const Eigen::MatrixXf& x,
                              ForwardCache* cache) {
  Eigen::MatrixXf h = x;
  if (cache) cache->acts.push_back(h);
  for (const DenseLayer& layer : mlp.trunk) {
    Eigen::MatrixXf z = (layer.w * h).colwise() + layer.b;
    h = silu(z);
    if (cache) {
      cache->zs.push_back(std::move(z));
      cache->acts.push_back(h);
    }
  }
  return h;
}

Eigen::MatrixXf head_logits(const DenseLayer& head, const Eigen::MatrixXf& h) {
  return (head.w * h).colwise() + head.b;
}

// column-wise softmax with max subtraction
Eigen::MatrixXf softmax_cols(const Eigen::MatrixXf& logits) {
  Eigen::MatrixXf p = logits;
  for (int c = 0; c < p.cols(); ++c) {
    const float m = p.col(c).maxCoeff();
    p.col(c) = (p.col(c).array() - m).exp();
    p.col(c) /= p.col(c).sum();
  }
  return p;
}

int argmax_lowest(const Eigen::VectorXf& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

DenseLayer init_layer(Rng& rng, int rows, int cols, float scale) {
  DenseLayer layer;
  layer.w.resize(rows, cols);
  const float std_w = scale * std::sqrt(2.0f / static_cast<float>(cols));
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      layer.w(r, c) = std_w * static_cast<float>(rng.normal());
  layer.b = Eigen::VectorXf::Zero(rows);
  return layer;
}

struct HeadTargets {
  std::vector<int> bins;      // classification
  std::vector<float> normed;  // regression, in [0, 1]
};

HeadTargets make_targets(const BinSpec& bins, const std::vector<double>& labels) {
  HeadTargets t;
  t.bins.reserve(labels.size());
  t.normed.reserve(labels.size());
  for (double v : labels) {
    if (!bins.contains(v))
      throw std::invalid_argument("train: label outside the bin range");
    t.bins.push_back(bins.index_of(v));
    t.normed.push_back(static_cast<float>((v - bins.lo) / (bins.hi - bins.lo)));
  }
  return t;
}

struct Velocity {
  std::vector<DenseLayer> trunk;
  DenseLayer head_fov, head_phi, head_psi;

  static DenseLayer zero_like(const DenseLayer& l) {
    return {Eigen::MatrixXf::Zero(l.w.rows(), l.w.cols()),
            Eigen::VectorXf::Zero(l.b.size())};
  }
  static Velocity zero_like(const MlpParams& mlp) {
    Velocity v;
    for (const auto& l : mlp.trunk) v.trunk.push_back(zero_like(l));
    v.head_fov = zero_like(mlp.head_fov);
    v.head_phi = zero_like(mlp.head_phi);
    v.head_psi = zero_like(mlp.head_psi);
    return v;
  }
};

void sgd_step(DenseLayer& p, DenseLayer& v, const DenseLayer& g, float lr,
              float momentum) {
  v.w = momentum * v.w + g.w;
  v.b = momentum * v.b + g.b;
  p.w -= lr * v.w;
  p.b -= lr * v.b;
}

struct HeadEval {
  double value = 0.0;
  double confidence = 1.0;
};

HeadEval eval_head(Objective objective, const BinSpec& bins,
                   const DenseLayer& head, const Eigen::VectorXf& h) {
  HeadEval e;
  const Eigen::VectorXf logits = head.w * h + head.b;
  if (objective == Objective::kCrossEntropy) {
    const int idx = argmax_lowest(logits);
    e.value = bins.center(idx);
    const float m = logits.maxCoeff();
    const Eigen::ArrayXf ex = (logits.array() - m).exp();
    e.confidence = ex[idx] / ex.sum();
  } else {
    const float p = std::clamp(logits[0], 0.0f, 1.0f);
    e.value = bins.lo + static_cast<double>(p) * (bins.hi - bins.lo);
    e.confidence = 1.0;
  }
  return e;
}

double head_mae(const EstimatorModel& model, const Eigen::MatrixXf& feats,
                const std::vector<std::size_t>& idx,
                const std::vector<double>& fov, const std::vector<double>& phi,
                const std::vector<double>& psi) {
  double sum = 0.0;
  for (std::size_t i : idx) {
    const Eigen::VectorXf h = trunk_forward(model.mlp, feats.col(i), nullptr);
    sum += std::abs(
        eval_head(model.objective, model.fov_bins, model.mlp.head_fov, h).value -
        fov[i]);
    sum += std::abs(
        eval_head(model.objective, model.phi_bins, model.mlp.head_phi, h).value -
        phi[i]);
    sum += std::abs(
        eval_head(model.objective, model.psi_bins, model.mlp.head_psi, h).value -
        psi[i]);
  }
  return sum / static_cast<double>(idx.size());
}

struct HeadBatchLoss {
  double loss = 0.0;
  Eigen::MatrixXf dlogits;
};

HeadBatchLoss ce_loss(const Eigen::MatrixXf& logits,
                      const std::vector<int>& targets) {
  HeadBatchLoss out;
  const int b = static_cast<int>(logits.cols());
  const Eigen::MatrixXf p = softmax_cols(logits);
  out.dlogits = p;
  for (int c = 0; c < b; ++c) {
    out.loss -= std::log(std::max(p(targets[c], c), 1e-30f));
    out.dlogits(targets[c], c) -= 1.0f;
  }
  out.loss /= b;
  out.dlogits /= static_cast<float>(b);
  return out;
}

HeadBatchLoss mse_loss(const Eigen::MatrixXf& logits,
                       const std::vector<float>& targets) {
  HeadBatchLoss out;
  const int b = static_cast<int>(logits.cols());
  out.dlogits.resize(1, b);
  for (int c = 0; c < b; ++c) {
    const float d = logits(0, c) - targets[c];
    out.loss += static_cast<double>(d) * d;
    out.dlogits(0, c) = 2.0f * d / static_cast<float>(b);
  }
  out.loss /= b;
  return out;
}

}  // namespace

EstimatorModel train(const SampleSource& data, const TrainConfig& config,
                     TrainLog* log) {
  const std::size_t n = data.size();
  if (n == 0) throw std::invalid_argument("train: empty dataset");
  config.fov_bins.validate();
  config.phi_bins.validate();
  config.psi_bins.validate();
  if (config.batch_size <= 0 || config.epochs <= 0)
    throw std::invalid_argument("train: epochs and batch size must be positive");

  EstimatorModel model;
  model.objective = config.objective;
  model.input_size = config.input_size;
  model.fov_bins = config.fov_bins;
  model.phi_bins = config.phi_bins;
  model.psi_bins = config.psi_bins;
  model.extractor =
      FeatureExtractor::create(config.input_size, config.extractor_seed);

  // feature cache and labels
  Eigen::MatrixXf feats(FeatureExtractor::kFeatureDim, n);
  std::vector<double> fov(n), phi(n), psi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Sample s = data.load(i);
    feats.col(i) = model.extractor.extract(s.image);
    fov[i] = s.params.fov_deg;
    phi[i] = s.params.phi_deg;
    psi[i] = s.params.psi_deg;
  }
  const HeadTargets t_fov = make_targets(config.fov_bins, fov);
  const HeadTargets t_phi = make_targets(config.phi_bins, phi);
  const HeadTargets t_psi = make_targets(config.psi_bins, psi);

  // deterministic split: shuffled indices, validation from the tail
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng split_rng(mix_seed(config.seed, 0x51ull));
  split_rng.shuffle(order);
  const std::size_t n_val =
      std::min(n - 1, static_cast<std::size_t>(
                          std::floor(n * std::clamp(config.val_fraction, 0.0, 0.9))));
  std::vector<std::size_t> train_idx(order.begin(), order.end() - n_val);
  std::vector<std::size_t> val_idx(order.end() - n_val, order.end());

  // standardization from the training portion only
  Eigen::VectorXf mean = Eigen::VectorXf::Zero(feats.rows());
  for (std::size_t i : train_idx) mean += feats.col(i);
  mean /= static_cast<float>(train_idx.size());
  Eigen::VectorXf var = Eigen::VectorXf::Zero(feats.rows());
  for (std::size_t i : train_idx)
    var += (feats.col(i) - mean).array().square().matrix();
  var /= static_cast<float>(train_idx.size());
  Eigen::VectorXf stddev = var.array().sqrt().max(1e-6f).matrix();
  model.feat_mean = mean;
  model.feat_std = stddev;
  for (std::size_t i = 0; i < n; ++i)
    feats.col(i) = (feats.col(i) - mean).array() / stddev.array();

  // parameter init
  Rng init_rng(mix_seed(config.seed, 0x52ull));
  int in_dim = FeatureExtractor::kFeatureDim;
  for (int width : config.hidden) {
    model.mlp.trunk.push_back(init_layer(init_rng, width, in_dim, 1.0f));
    in_dim = width;
  }
  const bool ce = config.objective == Objective::kCrossEntropy;
  model.mlp.head_fov =
      init_layer(init_rng, ce ? config.fov_bins.count() : 1, in_dim, 0.01f);
  model.mlp.head_phi =
      init_layer(init_rng, ce ? config.phi_bins.count() : 1, in_dim, 0.01f);
  model.mlp.head_psi =
      init_layer(init_rng, ce ? config.psi_bins.count() : 1, in_dim, 0.01f);

  Velocity vel = Velocity::zero_like(model.mlp);
  const float lr = static_cast<float>(config.learning_rate);
  const float mom = static_cast<float>(config.momentum);

  MlpParams best = model.mlp;
  double best_val = std::numeric_limits<double>::infinity();
  int best_epoch = -1;

  std::vector<std::size_t> epoch_order = train_idx;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng shuffle_rng(mix_seed(config.seed, 0x53ull, epoch));
    shuffle_rng.shuffle(epoch_order);

    double epoch_loss_sum = 0.0;
    std::size_t epoch_count = 0;
    for (std::size_t start = 0; start < epoch_order.size();
         start += config.batch_size) {
      const std::size_t b =
          std::min<std::size_t>(config.batch_size, epoch_order.size() - start);
      Eigen::MatrixXf x(feats.rows(), b);
      std::vector<int> bt_fov(b), bt_phi(b), bt_psi(b);
      std::vector<float> bn_fov(b), bn_phi(b), bn_psi(b);
      for (std::size_t j = 0; j < b; ++j) {
        const std::size_t i = epoch_order[start + j];
        x.col(j) = feats.col(i);
        bt_fov[j] = t_fov.bins[i];
        bt_phi[j] = t_phi.bins[i];
        bt_psi[j] = t_psi.bins[i];
        bn_fov[j] = t_fov.normed[i];
        bn_phi[j] = t_phi.normed[i];
        bn_psi[j] = t_psi.normed[i];
      }

      ForwardCache cache;
      const Eigen::MatrixXf h = trunk_forward(model.mlp, x, &cache);

      std::array<HeadBatchLoss, 3> losses;
      std::array<const DenseLayer*, 3> heads = {
          &model.mlp.head_fov, &model.mlp.head_phi, &model.mlp.head_psi};
      if (ce) {
        losses[0] = ce_loss(head_logits(*heads[0], h), bt_fov);
        losses[1] = ce_loss(head_logits(*heads[1], h), bt_phi);
        losses[2] = ce_loss(head_logits(*heads[2], h), bt_psi);
      } else {
        losses[0] = mse_loss(head_logits(*heads[0], h), bn_fov);
        losses[1] = mse_loss(head_logits(*heads[1], h), bn_phi);
        losses[2] = mse_loss(head_logits(*heads[2], h), bn_psi);
      }
      const double batch_loss = losses[0].loss + losses[1].loss + losses[2].loss;
      epoch_loss_sum += batch_loss * b;
      epoch_count += b;
      if (log && config.record_step_loss) {
        log->step_loss.push_back(batch_loss);
        log->step_head_loss.push_back(
            {losses[0].loss, losses[1].loss, losses[2].loss});
      }

      // heads backward
      Eigen::MatrixXf dh = Eigen::MatrixXf::Zero(h.rows(), h.cols());
      std::array<DenseLayer, 3> head_grads;
      for (int k = 0; k < 3; ++k) {
        head_grads[k].w = losses[k].dlogits * h.transpose();
        head_grads[k].b = losses[k].dlogits.rowwise().sum();
        dh += heads[k]->w.transpose() * losses[k].dlogits;
      }

      // trunk backward
      std::vector<DenseLayer> trunk_grads(model.mlp.trunk.size());
      Eigen::MatrixXf grad = dh;
      for (int l = static_cast<int>(model.mlp.trunk.size()) - 1; l >= 0; --l) {
        const Eigen::MatrixXf dz =
            grad.array() * silu_grad(cache.zs[l]).array();
        trunk_grads[l].w = dz * cache.acts[l].transpose();
        trunk_grads[l].b = dz.rowwise().sum();
        if (l > 0) grad = model.mlp.trunk[l].w.transpose() * dz;
      }

      for (std::size_t l = 0; l < model.mlp.trunk.size(); ++l)
        sgd_step(model.mlp.trunk[l], vel.trunk[l], trunk_grads[l], lr, mom);
      sgd_step(model.mlp.head_fov, vel.head_fov, head_grads[0], lr, mom);
      sgd_step(model.mlp.head_phi, vel.head_phi, head_grads[1], lr, mom);
      sgd_step(model.mlp.head_psi, vel.head_psi, head_grads[2], lr, mom);
    }

    if (log) log->epoch_loss.push_back(epoch_loss_sum / epoch_count);

    if (!val_idx.empty()) {
      const double val_mae = head_mae(model, feats, val_idx, fov, phi, psi);
      if (log) log->val_mae_sum.push_back(val_mae);
      if (val_mae < best_val) {
        best_val = val_mae;
        best = model.mlp;
        best_epoch = epoch;
      }
    }
  }

  if (!val_idx.empty()) {
    model.mlp = best;
  } else {
    best_epoch = config.epochs - 1;
  }
  if (log) log->best_epoch = best_epoch;
  return model;
}

PredictionResult predict(const EstimatorModel& model, const ImageRaster& img) {
  Eigen::VectorXf f = model.extractor.extract(img);
  f = ((f - model.feat_mean).array() / model.feat_std.array()).matrix();
  const Eigen::VectorXf h = trunk_forward(model.mlp, f, nullptr);
  PredictionResult r;
  const HeadEval e_fov =
      eval_head(model.objective, model.fov_bins, model.mlp.head_fov, h);
  const HeadEval e_phi =
      eval_head(model.objective, model.phi_bins, model.mlp.head_phi, h);
  const HeadEval e_psi =
      eval_head(model.objective, model.psi_bins, model.mlp.head_psi, h);
  r.fov_deg = e_fov.value;
  r.phi_deg = e_phi.value;
  r.psi_deg = e_psi.value;
  r.conf_fov = e_fov.confidence;
  r.conf_phi = e_phi.confidence;
  r.conf_psi = e_psi.confidence;
  return r;
}

MaeReport evaluate_mae(const EstimatorModel& model, const SampleSource& data) {
  const std::size_t n = data.size();
  if (n == 0) throw std::invalid_argument("evaluate_mae: empty dataset");
  std::vector<double> e_fov, e_phi, e_psi;
  e_fov.reserve(n);
  e_phi.reserve(n);
  e_psi.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Sample s = data.load(i);
    const PredictionResult p = predict(model, s.image);
    e_fov.push_back(std::abs(p.fov_deg - s.params.fov_deg));
    e_phi.push_back(std::abs(p.phi_deg - s.params.phi_deg));
    e_psi.push_back(std::abs(p.psi_deg - s.params.psi_deg));
  }
  // sorted accumulation: identical result for any dataset permutation
  std::sort(e_fov.begin(), e_fov.end());
  std::sort(e_phi.begin(), e_phi.end());
  std::sort(e_psi.begin(), e_psi.end());
  MaeReport r;
  r.n = n;
  for (double v : e_fov) r.mae_fov += v;
  for (double v : e_phi) r.mae_phi += v;
  for (double v : e_psi) r.mae_psi += v;
  r.mae_fov /= n;
  r.mae_phi /= n;
  r.mae_psi /= n;
  return r;
}

namespace {

void put_layer(std::ostream& os, const DenseLayer& l) {
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(l.w.rows()));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(l.w.cols()));
  for (int r = 0; r < l.w.rows(); ++r)
    for (int c = 0; c < l.w.cols(); ++c) put_le<float>(os, l.w(r, c));
  for (int r = 0; r < l.b.size(); ++r) put_le<float>(os, l.b[r]);
}

DenseLayer get_layer(std::istream& is) {
  const auto rows = get_le<std::uint32_t>(is);
  const auto cols = get_le<std::uint32_t>(is);
  if (rows == 0 || cols == 0 || rows > (1u << 16) || cols > (1u << 16))
    throw std::runtime_error("load_model: implausible layer shape");
  DenseLayer l;
  l.w.resize(rows, cols);
  for (std::uint32_t r = 0; r < rows; ++r)
    for (std::uint32_t c = 0; c < cols; ++c) l.w(r, c) = get_le<float>(is);
  l.b.resize(rows);
  for (std::uint32_t r = 0; r < rows; ++r) l.b[r] = get_le<float>(is);
  return l;
}

void put_bins(std::ostream& os, const BinSpec& b) {
  put_le<double>(os, b.lo);
  put_le<double>(os, b.hi);
  put_le<double>(os, b.step);
}

BinSpec get_bins(std::istream& is) {
  BinSpec b;
  b.lo = get_le<double>(is);
  b.hi = get_le<double>(is);
  b.step = get_le<double>(is);
  b.validate();
  return b;
}

}  // namespace

void save_model(const std::filesystem::path& path, const EstimatorModel& model) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_model: cannot open " + path.string());
  os.write("CFDE", 4);
  put_le<std::uint32_t>(os, 1);
  put_le<std::uint8_t>(os, static_cast<std::uint8_t>(model.objective));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(model.input_size));
  put_bins(os, model.fov_bins);
  put_bins(os, model.phi_bins);
  put_bins(os, model.psi_bins);

  put_le<std::uint64_t>(os, model.extractor.seed());
  put_le<std::uint32_t>(os,
                        static_cast<std::uint32_t>(model.extractor.layers().size()));
  for (const auto& layer : model.extractor.layers()) {
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(layer.in_ch));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(layer.out_ch));
    for (float w : layer.weights) put_le<float>(os, w);
    for (float b : layer.bias) put_le<float>(os, b);
  }

  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(model.feat_mean.size()));
  for (int i = 0; i < model.feat_mean.size(); ++i)
    put_le<float>(os, model.feat_mean[i]);
  for (int i = 0; i < model.feat_std.size(); ++i)
    put_le<float>(os, model.feat_std[i]);

  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(model.mlp.trunk.size()));
  for (const auto& l : model.mlp.trunk) put_layer(os, l);
  put_layer(os, model.mlp.head_fov);
  put_layer(os, model.mlp.head_phi);
  put_layer(os, model.mlp.head_psi);
  if (!os) throw std::runtime_error("save_model: write failed for " + path.string());
}

EstimatorModel load_model(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_model: cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "CFDE", 4) != 0)
    throw std::runtime_error("load_model: bad magic in " + path.string());
  const auto version = get_le<std::uint32_t>(is);
  if (version != 1)
    throw std::runtime_error("load_model: unsupported version in " + path.string());

  EstimatorModel model;
  const auto obj = get_le<std::uint8_t>(is);
  if (obj > 1) throw std::runtime_error("load_model: unknown objective");
  model.objective = static_cast<Objective>(obj);
  model.input_size = static_cast<int>(get_le<std::uint32_t>(is));
  model.fov_bins = get_bins(is);
  model.phi_bins = get_bins(is);
  model.psi_bins = get_bins(is);

  const auto ext_seed = get_le<std::uint64_t>(is);
  const auto n_layers = get_le<std::uint32_t>(is);
  if (n_layers > 16) throw std::runtime_error("load_model: implausible layer count");
  std::vector<FeatureExtractor::ConvLayer> layers(n_layers);
  for (auto& layer : layers) {
    layer.in_ch = static_cast<int>(get_le<std::uint32_t>(is));
    layer.out_ch = static_cast<int>(get_le<std::uint32_t>(is));
    if (layer.in_ch <= 0 || layer.out_ch <= 0 || layer.in_ch > 1024 ||
        layer.out_ch > 1024)
      throw std::runtime_error("load_model: implausible channel count");
    layer.weights.resize(static_cast<std::size_t>(layer.out_ch) * layer.in_ch * 9);
    for (float& w : layer.weights) w = get_le<float>(is);
    layer.bias.resize(layer.out_ch);
    for (float& b : layer.bias) b = get_le<float>(is);
  }
  model.extractor =
      FeatureExtractor::from_parts(model.input_size, ext_seed, std::move(layers));

  const auto dim = get_le<std::uint32_t>(is);
  if (dim != FeatureExtractor::kFeatureDim)
    throw std::runtime_error("load_model: feature dim mismatch");
  model.feat_mean.resize(dim);
  for (std::uint32_t i = 0; i < dim; ++i) model.feat_mean[i] = get_le<float>(is);
  model.feat_std.resize(dim);
  for (std::uint32_t i = 0; i < dim; ++i) model.feat_std[i] = get_le<float>(is);

  const auto n_trunk = get_le<std::uint32_t>(is);
  if (n_trunk > 16) throw std::runtime_error("load_model: implausible trunk size");
  model.mlp.trunk.resize(n_trunk);
  for (auto& l : model.mlp.trunk) l = get_layer(is);
  model.mlp.head_fov = get_layer(is);
  model.mlp.head_phi = get_layer(is);
  model.mlp.head_psi = get_layer(is);
  if (!is) throw std::runtime_error("load_model: truncated file " + path.string());
  return model;
}

}  // namespace panogeo
