// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "goalpred/datamodel.hpp"
#include "goalpred/features.hpp"
#include "goalpred/lstm.hpp"
#include "goalpred/metrics.hpp"

namespace goalpred {

enum class VariantName { lstm, lstm_select, lstm_buff, enhanced, no_gaze };

std::string_view variant_name(VariantName v) noexcept;
VariantName variant_from_name(std::string_view name);

/// Model roster entry: which channels are fed, how much history, how many
/// hidden units, and whether the gaze-enhanced decision rule is applied.
struct VariantSpec {
  VariantName name = VariantName::lstm_buff;
  std::vector<FeatureChannel> channels;
  std::optional<std::size_t> buffer_len;
  std::size_t hidden_units = 20;
  std::optional<EnhancedConfig> enhanced;

  /// lstm: all channels, whole history. lstm_select: reduced set, whole
  /// history. lstm_buff: reduced set, last 20 frames. enhanced: lstm_buff plus
  /// the gaze rule. no_gaze: hand/head cues, last 20 frames, 40 hidden units.
  static VariantSpec preset(VariantName name);

  void validate() const;
  std::string describe() const;
};

/// Throws Error(usage) unless the model was trained with the variant's
/// channels, buffer length and hidden size.
void check_compatible(const TrainedModel& model, const VariantSpec& variant);

/// One shared classifier applied to every goal's normalized features.
std::vector<double> predict_scores(const Segment& seg_prefix, const GoalSet& goals, const TrainedModel& model,
                                   const VariantSpec& variant);

/// Index of the maximum; ties go to the lowest ordinal.
std::size_t decide_argmax(std::span<const double> scores);

/// argmax(scores) if its value exceeds the score threshold; otherwise the
/// gaze argmin if the closest gaze distance is below the gaze threshold;
/// otherwise argmax(scores).
std::size_t decide_enhanced(std::span<const double> scores, std::span<const double> gaze_dists,
                            const EnhancedConfig& cfg);

/// Classifier scores and raw gaze-ray distances (meters) at each evaluation
/// frame of one segment. Rows are steps, columns goals.
struct SegmentEvidence {
  std::size_t n_frames = 0;
  std::string truth;
  std::vector<std::size_t> frames;
  RowMatrix scores;
  RowMatrix gaze_dists;
};

/// Scores every evaluation frame of `seg`. Equivalent to predict_scores on
/// each prefix but runs the recurrence once per goal for whole-history models.
SegmentEvidence collect_evidence(const Segment& seg, const GoalSet& goals, const TrainedModel& model,
                                 const EvalConfig& eval);

/// Applies argmax, or the enhanced rule when `enhanced` is set.
PredictionTrace make_trace(const SegmentEvidence& ev, const GoalSet& goals,
                           const std::optional<EnhancedConfig>& enhanced);

std::vector<SegmentEvidence> collect_dataset_evidence(const Dataset& d, const TrainedModel& model,
                                                      const EvalConfig& eval);

std::vector<PredictionTrace> predict_traces(const Dataset& d, const TrainedModel& model, const EvalConfig& eval,
                                            const std::optional<EnhancedConfig>& enhanced);

/// 0.40, 0.43, ..., 0.70.
std::vector<double> default_score_grid();
/// 0.05, 0.10, ..., 0.50 meters.
std::vector<double> default_gaze_grid();

struct GridSearchResult {
  EnhancedConfig best;
  double best_auc = 0.0;
  RowMatrix auc;  // score_grid x gaze_grid
};

/// Exhaustive search maximizing AUC on `train`; ties go to the first pair in
/// row-major (score, gaze) order.
GridSearchResult grid_search_thresholds(const Dataset& train, const TrainedModel& model,
                                        std::span<const double> score_grid, std::span<const double> gaze_grid,
                                        const EvalConfig& eval);

/// Same search on precomputed evidence.
GridSearchResult grid_search_thresholds(std::span<const SegmentEvidence> evidence, const GoalSet& goals,
                                        std::span<const double> score_grid, std::span<const double> gaze_grid,
                                        const EvalConfig& eval);

const std::string& macro_of(std::size_t goal_ordinal, const GoalSet& goals);

/// Replaces goal ids with macro ids in both predictions and truth.
PredictionTrace to_macro(const PredictionTrace& trace, const GoalSet& goals);

/// Line-delimited trace dump: `segment frame_index s_0 .. s_{N-1} chosen truth`.
void write_traces(std::ostream& out, std::span<const PredictionTrace> traces, const GoalSet& goals);

}  // namespace goalpred
