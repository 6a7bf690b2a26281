// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace goalpred {

/// Evaluation window and prediction cadence.
struct EvalConfig {
  double window_s = 3.0;
  std::size_t stride_frames = 10;
  double frame_rate_hz = 120.0;

  /// Number of frames in the window, round(window_s * frame_rate_hz).
  std::size_t window_frames() const;
  void validate() const;
};

struct PredictionStep {
  std::size_t frame_index = 0;  // last frame of the observed prefix
  std::vector<double> scores;   // per goal; empty for single-cue baselines
  std::string chosen;
};

/// Predictions for one segment. Each step is valid from its frame until the
/// next step's frame.
struct PredictionTrace {
  std::string truth;
  std::size_t n_frames = 0;
  std::vector<PredictionStep> steps;
};

/// Frame indices at which a streaming predictor is queried: multiples of the
/// stride, starting from the last one at or before the window start so that
/// every frame of the window has a held prediction.
std::vector<std::size_t> evaluation_frames(std::size_t n_frames, const EvalConfig& cfg);

/// Fraction of contributing segments whose held prediction is correct at each
/// window offset t = 1..W, where offset W is the last frame (the grasp).
/// Segments shorter than W contribute only where they have frames. Offsets
/// with no contributing segment are 0. Throws Error(usage) on an empty list.
std::vector<double> accuracy_curve(std::span<const PredictionTrace> traces, const EvalConfig& cfg);

/// Per-frame sum of accuracies.
double auc(std::span<const double> curve) noexcept;

/// CSV `offset_s,accuracy`, offset in seconds from the window start.
void write_curve_csv(std::ostream& out, std::span<const double> curve, const EvalConfig& cfg);

}  // namespace goalpred
