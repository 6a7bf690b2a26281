// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "goalpred/datamodel.hpp"
#include "goalpred/features.hpp"

namespace goalpred {

/// Pairwise Pearson coefficients. Rows/columns of zero-variance channels are
/// flagged in `defined` and hold NaN.
struct CorrelationMatrix {
  std::vector<FeatureChannel> channels;
  Eigen::MatrixXd r;
  std::vector<bool> defined;
};

/// Pearson matrix over the columns of `samples` (rows are observations).
/// Throws Error(numeric) with fewer than two rows.
CorrelationMatrix pearson_matrix(const RowMatrix& samples, std::vector<FeatureChannel> channels);

/// Pearson matrix over the pooled (segment, goal, frame) population.
CorrelationMatrix correlation_matrix(const Dataset& d, const FeatureConfig& cfg);

/// CSV with a channel-name header row and a leading channel-name column.
/// Undefined entries are written as `NA`.
void write_correlation_csv(std::ostream& out, const CorrelationMatrix& m);

/// Ordinal selected by a single-cue rule over per-goal values; ties go to the
/// lowest ordinal.
std::size_t select_by_rule(std::span<const double> values, BaselineRule rule);

/// Single-cue baseline: argmin (argmax for cumulative gaze) over goals of the
/// channel value at the last frame of `seg_prefix`. Returns the goal id.
std::string baseline_predict(const Segment& seg_prefix, const GoalSet& goals, FeatureChannel channel,
                             const FeatureConfig& cfg);

}  // namespace goalpred
