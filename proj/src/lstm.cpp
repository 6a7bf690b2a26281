// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

#include "goalpred/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <sstream>

#include "goalpred/error.hpp"

namespace goalpred {

using Matrix = LstmParams::Matrix;
using RowVector = Eigen::RowVectorXd;

// ---- configuration ------------------------------------------------------

void NetworkConfig::validate() const {
  if (input_size < 1) throw Error(ErrorKind::usage, "network input size must be >= 1");
  if (hidden_units < 1) throw Error(ErrorKind::usage, "hidden units must be >= 1");
}

std::size_t NetworkConfig::parameter_count() const noexcept {
  const std::size_t h = hidden_units;
  return 4 * h * input_size + 4 * h * h + 4 * h + kClasses * h + kClasses;
}

std::string_view negative_sampling_name(NegativeSampling n) noexcept {
  return n == NegativeSampling::all ? "all" : "balanced";
}

NegativeSampling negative_sampling_from_name(std::string_view name) {
  if (name == "all") return NegativeSampling::all;
  if (name == "balanced") return NegativeSampling::balanced;
  throw Error(ErrorKind::usage, "unknown negative sampling '" + std::string(name) + "' (all|balanced)");
}

void TrainConfig::validate() const {
  if (epochs < 1) throw Error(ErrorKind::usage, "epochs must be >= 1");
  if (batch_size < 1) throw Error(ErrorKind::usage, "batch size must be >= 1");
  if (!(learning_rate > 0.0)) throw Error(ErrorKind::usage, "learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw Error(ErrorKind::usage, "Adam betas must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw Error(ErrorKind::usage, "Adam epsilon must be positive");
  if (window_stride < 1) throw Error(ErrorKind::usage, "window stride must be >= 1");
}

void EnhancedConfig::validate() const {
  if (!(score_threshold > 0.0 && score_threshold < 1.0)) {
    throw Error(ErrorKind::usage, "score threshold must lie in (0, 1)");
  }
  if (!(gaze_threshold > 0.0)) throw Error(ErrorKind::usage, "gaze threshold must be positive");
}

// ---- parameters ---------------------------------------------------------

namespace {

struct Offsets {
  Eigen::Index wx, wh, b, dense, dense_b, total;
};

Offsets offsets(const NetworkConfig& c) {
  const auto h = static_cast<Eigen::Index>(c.hidden_units);
  const auto f = static_cast<Eigen::Index>(c.input_size);
  const auto k = static_cast<Eigen::Index>(NetworkConfig::kClasses);
  Offsets o{};
  o.wx = 0;
  o.wh = o.wx + 4 * h * f;
  o.b = o.wh + 4 * h * h;
  o.dense = o.b + 4 * h;
  o.dense_b = o.dense + k * h;
  o.total = o.dense_b + k;
  return o;
}

}  // namespace

LstmParams::LstmParams(const NetworkConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  data_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cfg_.parameter_count()));
}

LstmParams LstmParams::initialized(const NetworkConfig& cfg, std::uint64_t seed) {
  LstmParams p(cfg);
  std::mt19937_64 rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(cfg.hidden_units));
  std::uniform_real_distribution<double> uniform(-bound, bound);
  for (Eigen::Index i = 0; i < p.data_.size(); ++i) p.data_[i] = uniform(rng);
  const auto h = static_cast<Eigen::Index>(cfg.hidden_units);
  p.gate_bias().setZero();
  p.gate_bias().segment(h, h).setConstant(1.0);
  p.dense_bias().setZero();
  return p;
}

#define GOALPRED_PARAM_VIEWS(CONST, MAT, VEC)                                                     \
  LstmParams::MAT LstmParams::input_weights() CONST {                                             \
    const Offsets o = offsets(cfg_);                                                              \
    const auto h = static_cast<Eigen::Index>(cfg_.hidden_units);                                  \
    return MAT(data_.data() + o.wx, 4 * h, static_cast<Eigen::Index>(cfg_.input_size));            \
  }                                                                                               \
  LstmParams::MAT LstmParams::recurrent_weights() CONST {                                         \
    const Offsets o = offsets(cfg_);                                                              \
    const auto h = static_cast<Eigen::Index>(cfg_.hidden_units);                                  \
    return MAT(data_.data() + o.wh, 4 * h, h);                                                    \
  }                                                                                               \
  LstmParams::VEC LstmParams::gate_bias() CONST {                                                 \
    const Offsets o = offsets(cfg_);                                                              \
    return VEC(data_.data() + o.b, 4 * static_cast<Eigen::Index>(cfg_.hidden_units));              \
  }                                                                                               \
  LstmParams::MAT LstmParams::dense_weights() CONST {                                             \
    const Offsets o = offsets(cfg_);                                                              \
    return MAT(data_.data() + o.dense, static_cast<Eigen::Index>(NetworkConfig::kClasses),         \
               static_cast<Eigen::Index>(cfg_.hidden_units));                                     \
  }                                                                                               \
  LstmParams::VEC LstmParams::dense_bias() CONST {                                                \
    const Offsets o = offsets(cfg_);                                                              \
    return VEC(data_.data() + o.dense_b, static_cast<Eigen::Index>(NetworkConfig::kClasses));      \
  }

GOALPRED_PARAM_VIEWS(, MatrixMap, VectorMap)
GOALPRED_PARAM_VIEWS(const, ConstMatrixMap, ConstVectorMap)
#undef GOALPRED_PARAM_VIEWS

std::uint64_t LstmParams::fingerprint() const noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* p, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  mix(&cfg_.input_size, sizeof cfg_.input_size);
  mix(&cfg_.hidden_units, sizeof cfg_.hidden_units);
  mix(data_.data(), static_cast<std::size_t>(data_.size()) * sizeof(double));
  return h;
}

bool operator==(const LstmParams& a, const LstmParams& b) {
  return a.cfg_.input_size == b.cfg_.input_size && a.cfg_.hidden_units == b.cfg_.hidden_units &&
         a.data_.size() == b.data_.size() &&
         std::memcmp(a.data_.data(), b.data_.data(), static_cast<std::size_t>(a.data_.size()) * sizeof(double)) == 0;
}

// ---- forward ------------------------------------------------------------

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Vectorized activations; Eigen's exp is SIMD for doubles, its tanh is not.
template <typename Block>
void sigmoid_inplace(Block&& v) {
  v = ((-v.array()).exp() + 1.0).inverse().matrix();
}

template <typename Block>
void tanh_inplace(Block&& v) {
  v = (1.0 - 2.0 * ((2.0 * v.array()).exp() + 1.0).inverse()).matrix();
}

/// Probability of class 1 from two logits, computed without overflow.
inline double class1_probability(double l0, double l1) { return sigmoid(l1 - l0); }

void check_input(const LstmParams& params, const InputBlock& x) {
  if (params.flat().size() == 0) throw Error(ErrorKind::numeric, "uninitialized LSTM parameters");
  if (x.cols() != static_cast<Eigen::Index>(params.config().input_size)) {
    std::ostringstream msg;
    msg << "input has " << x.cols() << " columns, network expects " << params.config().input_size;
    throw Error(ErrorKind::numeric, msg.str());
  }
  if (x.rows() < 1) throw Error(ErrorKind::numeric, "input sequence is empty");
}

/// Runs the recurrence. Calls `on_step(t, gates_row, c, h)` after every step.
template <typename OnStep>
void run(const LstmParams& params, const InputBlock& x, OnStep&& on_step) {
  const auto h = static_cast<Eigen::Index>(params.config().hidden_units);
  const Eigen::Index steps = x.rows();
  // Row-at-a-time input products keep every step's arithmetic independent of
  // the sequence length, so prefix scores match scores of the prefix exactly.
  const auto wx_t = params.input_weights().transpose();
  const auto wh_t = params.recurrent_weights().transpose();
  const auto bias = params.gate_bias().transpose();

  RowVector hidden = RowVector::Zero(h);
  RowVector cell = RowVector::Zero(h);
  RowVector tanh_cell(h);
  RowVector z(4 * h);
  for (Eigen::Index t = 0; t < steps; ++t) {
    z.noalias() = x.row(t) * wx_t;
    z += bias;
    if (t > 0) z.noalias() += hidden * wh_t;
    sigmoid_inplace(z.segment(0, 2 * h));  // input, forget
    tanh_inplace(z.segment(2 * h, h));     // candidate
    sigmoid_inplace(z.segment(3 * h, h));  // output
    cell.array() = z.segment(h, h).array() * cell.array() + z.segment(0, h).array() * z.segment(2 * h, h).array();
    tanh_cell = cell;
    tanh_inplace(tanh_cell);
    hidden.array() = z.segment(3 * h, h).array() * tanh_cell.array();
    on_step(t, z, cell, hidden);
  }
}

Eigen::Vector2d logits(const LstmParams& params, const RowVector& hidden) {
  return params.dense_weights() * hidden.transpose() + params.dense_bias();
}

}  // namespace

namespace {

/// Fills `cache` without stamping the parameter fingerprint. Buffers are
/// reused when the shapes match.
double forward_into(const LstmParams& params, const InputBlock& x, ForwardCache& cache) {
  const auto h = static_cast<Eigen::Index>(params.config().hidden_units);
  const Eigen::Index steps = x.rows();
  cache.inputs = x;
  cache.gates.resize(steps, 4 * h);
  cache.cell.resize(steps, h);
  cache.hidden.resize(steps, h);
  run(params, x, [&](Eigen::Index t, const RowVector& z, const RowVector& c, const RowVector& hid) {
    cache.gates.row(t) = z;
    cache.cell.row(t) = c;
    cache.hidden.row(t) = hid;
  });
  const Eigen::Vector2d l = logits(params, cache.hidden.row(steps - 1));
  const double p1 = class1_probability(l[0], l[1]);
  cache.probs = Eigen::Vector2d(1.0 - p1, p1);
  return p1;
}

}  // namespace

ForwardResult forward(const LstmParams& params, const InputBlock& x) {
  check_input(params, x);
  ForwardResult out;
  out.score = forward_into(params, x, out.cache);
  out.cache.params_fingerprint = params.fingerprint();
  return out;
}

double score(const LstmParams& params, const InputBlock& x) {
  check_input(params, x);
  RowVector last;
  run(params, x, [&](Eigen::Index t, const RowVector&, const RowVector&, const RowVector& hid) {
    if (t == x.rows() - 1) last = hid;
  });
  const Eigen::Vector2d l = logits(params, last);
  return class1_probability(l[0], l[1]);
}

std::vector<double> prefix_scores(const LstmParams& params, const InputBlock& x,
                                  std::span<const std::size_t> steps) {
  check_input(params, x);
  std::vector<double> out;
  out.reserve(steps.size());
  std::size_t next = 0;
  run(params, x, [&](Eigen::Index t, const RowVector&, const RowVector&, const RowVector& hid) {
    while (next < steps.size() && steps[next] == static_cast<std::size_t>(t)) {
      const Eigen::Vector2d l = logits(params, hid);
      out.push_back(class1_probability(l[0], l[1]));
      ++next;
    }
  });
  if (out.size() != steps.size()) {
    throw Error(ErrorKind::numeric, "prefix steps must be ascending and within the sequence");
  }
  return out;
}

double cross_entropy(const ForwardCache& cache, int target) {
  const double p = cache.probs[target == 1 ? 1 : 0];
  return -std::log(std::max(p, std::numeric_limits<double>::min()));
}

// ---- backward -----------------------------------------------------------

namespace {

/// BPTT into `grad`. `dz` is scratch space.
void accumulate_unchecked(const LstmParams& params, const ForwardCache& cache, int target, LstmParams& grad,
                          Matrix& dz) {
  const auto h = static_cast<Eigen::Index>(params.config().hidden_units);
  const Eigen::Index steps = cache.gates.rows();

  Eigen::Vector2d dlogits = cache.probs;
  dlogits[target] -= 1.0;

  const RowVector h_last = cache.hidden.row(steps - 1);
  grad.dense_weights().noalias() += dlogits * h_last;
  grad.dense_bias() += dlogits;

  RowVector dh = dlogits.transpose() * params.dense_weights();
  RowVector dc = RowVector::Zero(h);
  dz.resize(steps, 4 * h);
  const auto wh = params.recurrent_weights();

  RowVector tc(h);
  RowVector d_o(h);
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    const auto gates = cache.gates.row(t).array();
    const auto i = gates.segment(0, h);
    const auto f = gates.segment(h, h);
    const auto g = gates.segment(2 * h, h);
    const auto o = gates.segment(3 * h, h);
    tc = cache.cell.row(t);
    tanh_inplace(tc);
    d_o.array() = dh.array() * tc.array();
    dc.array() += dh.array() * o * (1.0 - tc.array().square());
    dz.row(t).segment(0, h).array() = dc.array() * g * i * (1.0 - i);
    if (t > 0) {
      dz.row(t).segment(h, h).array() = dc.array() * cache.cell.row(t - 1).array() * f * (1.0 - f);
    } else {
      dz.row(t).segment(h, h).setZero();
    }
    dz.row(t).segment(2 * h, h).array() = dc.array() * i * (1.0 - g.square());
    dz.row(t).segment(3 * h, h).array() = d_o.array() * o * (1.0 - o);
    dc.array() *= f;
    if (t > 0) dh.noalias() = dz.row(t) * wh;
  }

  grad.input_weights().noalias() += dz.transpose() * cache.inputs;
  if (steps > 1) {
    grad.recurrent_weights().noalias() += dz.bottomRows(steps - 1).transpose() * cache.hidden.topRows(steps - 1);
  }
  grad.gate_bias() += dz.colwise().sum().transpose();
}

void accumulate_gradient(const LstmParams& params, const ForwardCache& cache, int target, LstmParams& grad) {
  if (cache.gates.rows() == 0) throw Error(ErrorKind::numeric, "empty forward cache");
  if (cache.params_fingerprint != params.fingerprint()) {
    throw Error(ErrorKind::numeric, "stale forward cache: parameters changed since forward()");
  }
  if (target != 0 && target != 1) throw Error(ErrorKind::usage, "target must be 0 or 1");
  Matrix dz;
  accumulate_unchecked(params, cache, target, grad, dz);
}

}  // namespace

LstmParams backward(const LstmParams& params, const ForwardCache& cache, int target) {
  LstmParams grad(params.config());
  accumulate_gradient(params, cache, target, grad);
  return grad;
}

// ---- Adam ---------------------------------------------------------------

AdamState AdamState::zeros(const LstmParams& like) {
  const Eigen::Index n = like.flat().size();
  return AdamState{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), 0};
}

void adam_step(LstmParams& params, const LstmParams& grads, AdamState& state, const TrainConfig& cfg) {
  const Eigen::Index n = params.flat().size();
  if (grads.flat().size() != n || state.m.size() != n || state.v.size() != n) {
    throw Error(ErrorKind::numeric, "Adam: parameter, gradient and moment shapes differ");
  }
  ++state.step;
  const auto t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  const Eigen::VectorXd& g = grads.flat();
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * g;
  state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
  params.flat().array() -=
      cfg.learning_rate * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + cfg.epsilon);
}

// ---- training -----------------------------------------------------------

LstmParams fit_examples(std::span<const TrainingExample> examples, const NetworkConfig& net,
                        const TrainConfig& cfg, TrainReport* report) {
  cfg.validate();
  net.validate();
  if (examples.empty()) throw Error(ErrorKind::usage, "no training examples");

  std::vector<std::size_t> positives;
  std::vector<std::size_t> negatives;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const TrainingExample& ex = examples[i];
    if (ex.label != 0 && ex.label != 1) throw Error(ErrorKind::usage, "example labels must be 0 or 1");
    if (ex.features == nullptr || ex.begin < 0 || ex.end <= ex.begin || ex.end > ex.features->rows() ||
        ex.features->cols() != static_cast<Eigen::Index>(net.input_size)) {
      throw Error(ErrorKind::usage, "training example " + std::to_string(i) + " has an invalid window or width");
    }
    (ex.label == 1 ? positives : negatives).push_back(i);
  }

  std::mt19937_64 rng(cfg.seed);
  LstmParams params = LstmParams::initialized(net, rng());
  AdamState adam = AdamState::zeros(params);
  LstmParams grad(net);
  ForwardCache cache;
  Matrix dz;
  std::vector<double> epoch_loss;

  auto block = [](const TrainingExample& ex) {
    return ex.features->middleRows(ex.begin, ex.end - ex.begin);
  };

  std::vector<std::size_t> order;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    order = positives;
    if (cfg.negative_sampling == NegativeSampling::balanced && negatives.size() > positives.size()) {
      std::vector<std::size_t> neg = negatives;
      std::shuffle(neg.begin(), neg.end(), rng);
      order.insert(order.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(positives.size()));
    } else {
      order.insert(order.end(), negatives.begin(), negatives.end());
    }
    std::shuffle(order.begin(), order.end(), rng);

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      grad.flat().setZero();
      double batch_loss = 0.0;
      for (std::size_t k = start; k < stop; ++k) {
        const TrainingExample& ex = examples[order[k]];
        forward_into(params, block(ex), cache);
        batch_loss += cross_entropy(cache, ex.label);
        accumulate_unchecked(params, cache, ex.label, grad, dz);
      }
      if (!std::isfinite(batch_loss) || !grad.flat().allFinite()) {
        std::ostringstream msg;
        msg << "non-finite loss or gradient at epoch " << epoch + 1 << ", batch " << start / cfg.batch_size
            << " (loss " << batch_loss << ", lr " << cfg.learning_rate << ")";
        throw Error(ErrorKind::training, msg.str());
      }
      grad.flat() /= static_cast<double>(stop - start);
      adam_step(params, grad, adam, cfg);
      loss_sum += batch_loss;
    }
    epoch_loss.push_back(loss_sum / static_cast<double>(order.size()));
  }

  if (report) {
    report->epoch_loss = epoch_loss;
    report->positives = positives.size();
    report->negatives = negatives.size();
    std::size_t correct = 0;
    for (const TrainingExample& ex : examples) {
      const int predicted = score(params, block(ex)) > 0.5 ? 1 : 0;
      if (predicted == ex.label) ++correct;
    }
    report->final_accuracy = static_cast<double>(correct) / static_cast<double>(examples.size());
  }
  return params;
}

TrainedModel train(const Dataset& train_set, const FeatureConfig& features, const TrainConfig& cfg,
                   const NetworkConfig& net, std::optional<std::size_t> buffer_len, TrainReport* report) {
  features.validate();
  cfg.validate();
  net.validate();
  if (net.input_size != features.channels.size()) {
    throw Error(ErrorKind::usage, "network input size " + std::to_string(net.input_size) +
                                      " does not match " + std::to_string(features.channels.size()) +
                                      " feature channels");
  }
  if (buffer_len && *buffer_len < 1) throw Error(ErrorKind::usage, "buffer length must be >= 1");
  if (train_set.segments.empty()) throw Error(ErrorKind::usage, "training set is empty");

  TrainedModel model;
  model.features = features;
  model.buffer_len = buffer_len;
  model.norm = fit_normalizer(train_set, features);

  std::vector<RowMatrix> matrices;
  matrices.reserve(train_set.segments.size() * train_set.goal_set.size());
  std::vector<TrainingExample> examples;
  for (const Segment& seg : train_set.segments) {
    for (std::size_t g = 0; g < train_set.goal_set.size(); ++g) {
      matrices.push_back(apply_normalizer(extract_features(seg, train_set.goal_set[g], features), model.norm).values);
    }
  }
  // Pointers are taken only after `matrices` stops growing.
  std::size_t at = 0;
  for (const Segment& seg : train_set.segments) {
    const std::size_t picked = train_set.goal_set.require_index(seg.picked_goal);
    const auto n = static_cast<Eigen::Index>(seg.frames.size());
    for (std::size_t g = 0; g < train_set.goal_set.size(); ++g, ++at) {
      const int label = g == picked ? 1 : 0;
      if (!buffer_len) {
        examples.push_back({&matrices[at], 0, n, label});
        continue;
      }
      const auto len = static_cast<Eigen::Index>(*buffer_len);
      for (Eigen::Index end = 0; end < n; end += static_cast<Eigen::Index>(cfg.window_stride)) {
        examples.push_back({&matrices[at], std::max<Eigen::Index>(0, end + 1 - len), end + 1, label});
      }
    }
  }

  model.params = fit_examples(examples, net, cfg, report);
  return model;
}

}  // namespace goalpred
