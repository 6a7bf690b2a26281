// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "goalpred/datamodel.hpp"
#include "goalpred/features.hpp"

namespace goalpred {

/// Single-layer LSTM binary classifier: input -> LSTM(H) -> dense(2) -> softmax.
struct NetworkConfig {
  static constexpr std::size_t kClasses = 2;

  std::size_t input_size = 1;
  std::size_t hidden_units = 20;

  void validate() const;
  std::size_t parameter_count() const noexcept;
};

/// All learnable weights, stored in one flat vector so the optimizer and the
/// gradient checker can treat them uniformly. Layout, all row-major:
///   input_weights     4H x F   gate rows ordered (input, forget, cell, output)
///   recurrent_weights 4H x H
///   gate_bias         4H
///   dense_weights     2 x H    row 1 is the "is-goal" class
///   dense_bias        2
/// Gradients use the same type.
class LstmParams {
 public:
  using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using MatrixMap = Eigen::Map<Matrix>;
  using ConstMatrixMap = Eigen::Map<const Matrix>;
  using VectorMap = Eigen::Map<Eigen::VectorXd>;
  using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

  LstmParams() = default;
  /// All-zero parameters.
  explicit LstmParams(const NetworkConfig& cfg);

  /// Uniform in [-1/sqrt(H), 1/sqrt(H)], forget-gate bias +1, dense bias 0.
  static LstmParams initialized(const NetworkConfig& cfg, std::uint64_t seed);

  const NetworkConfig& config() const noexcept { return cfg_; }
  Eigen::VectorXd& flat() noexcept { return data_; }
  const Eigen::VectorXd& flat() const noexcept { return data_; }

  MatrixMap input_weights();
  MatrixMap recurrent_weights();
  VectorMap gate_bias();
  MatrixMap dense_weights();
  VectorMap dense_bias();
  ConstMatrixMap input_weights() const;
  ConstMatrixMap recurrent_weights() const;
  ConstVectorMap gate_bias() const;
  ConstMatrixMap dense_weights() const;
  ConstVectorMap dense_bias() const;

  /// FNV-1a over the raw bytes and shape.
  std::uint64_t fingerprint() const noexcept;

  friend bool operator==(const LstmParams& a, const LstmParams& b);

 private:
  NetworkConfig cfg_;
  Eigen::VectorXd data_;
};

/// Activations kept for backpropagation through time.
struct ForwardCache {
  LstmParams::Matrix inputs;  // T x F
  LstmParams::Matrix gates;   // T x 4H, post-activation (i, f, g, o)
  LstmParams::Matrix cell;    // T x H
  LstmParams::Matrix hidden;  // T x H
  Eigen::Vector2d probs = Eigen::Vector2d::Zero();
  std::uint64_t params_fingerprint = 0;
};

struct ForwardResult {
  double score = 0.5;  // softmax probability of the "is-goal" class
  ForwardCache cache;
};

using InputBlock = Eigen::Ref<const RowMatrix>;

/// Zero initial state, T steps, last hidden state -> dense -> softmax.
/// Throws Error(numeric) on a column-count mismatch or an empty sequence.
ForwardResult forward(const LstmParams& params, const InputBlock& x);

/// Same score as forward() without retaining activations.
double score(const LstmParams& params, const InputBlock& x);

/// Scores of every prefix x[0..t] for t in `steps` (ascending), from a single
/// pass. Equal to calling score() on each prefix.
std::vector<double> prefix_scores(const LstmParams& params, const InputBlock& x,
                                  std::span<const std::size_t> steps);

/// Cross-entropy loss -log p(target) for a cache.
double cross_entropy(const ForwardCache& cache, int target);

/// Exact gradient of the cross-entropy loss. Throws Error(numeric) when the
/// cache was produced with different parameters.
LstmParams backward(const LstmParams& params, const ForwardCache& cache, int target);

enum class NegativeSampling { all, balanced };

std::string_view negative_sampling_name(NegativeSampling n) noexcept;
NegativeSampling negative_sampling_from_name(std::string_view name);

struct TrainConfig {
  std::size_t epochs = 5;
  std::size_t batch_size = 5;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  NegativeSampling negative_sampling = NegativeSampling::all;
  /// Buffered sequences only: spacing of training window end frames.
  std::size_t window_stride = 10;

  void validate() const;
};

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::uint64_t step = 0;

  static AdamState zeros(const LstmParams& like);
};

/// One bias-corrected Adam update in place.
void adam_step(LstmParams& params, const LstmParams& grads, AdamState& state, const TrainConfig& cfg);

/// A labeled window [begin, end) of one per-goal feature matrix.
struct TrainingExample {
  const RowMatrix* features = nullptr;
  Eigen::Index begin = 0;
  Eigen::Index end = 0;
  int label = 0;
};

struct TrainReport {
  std::vector<double> epoch_loss;  // mean cross-entropy per epoch
  double final_accuracy = 0.0;     // threshold 0.5 over every example after training
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

/// Minibatch Adam on prepared examples. Deterministic given cfg.seed.
LstmParams fit_examples(std::span<const TrainingExample> examples, const NetworkConfig& net,
                        const TrainConfig& cfg, TrainReport* report = nullptr);

/// Thresholds of the gaze-enhanced decision rule.
struct EnhancedConfig {
  double score_threshold = 0.49;
  double gaze_threshold = 0.2;

  void validate() const;
};

/// Everything needed to score goals: weights, feature layout, normalizer and
/// sequence mode. `buffer_len` empty means the whole history is fed.
struct TrainedModel {
  std::string variant;
  FeatureConfig features;
  NormStats norm;
  LstmParams params;
  std::optional<std::size_t> buffer_len;
  std::optional<EnhancedConfig> enhanced;

  const NetworkConfig& network() const noexcept { return params.config(); }
};

/// Builds (segment, goal) examples labeled 1 for the picked goal, fits the
/// normalizer on `train_set` and trains one shared classifier. Full-history
/// mode uses each whole segment as one sequence; buffered mode uses windows of
/// `buffer_len` frames ending every `cfg.window_stride` frames.
TrainedModel train(const Dataset& train_set, const FeatureConfig& features, const TrainConfig& cfg,
                   const NetworkConfig& net, std::optional<std::size_t> buffer_len,
                   TrainReport* report = nullptr);

/// Versioned little-endian binary container; see docs/model_format.md.
void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);
std::string serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(std::string_view bytes);

}  // namespace goalpred
