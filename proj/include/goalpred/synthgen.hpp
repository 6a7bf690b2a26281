// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "goalpred/datamodel.hpp"

namespace goalpred {

/// Scenario generator settings. Goals sit in `n_macros` clusters on a ring
/// around the room centre; every segment is one walk-and-pick of a uniformly
/// drawn goal.
struct GenConfig {
  std::size_t n_goals = 10;
  std::size_t n_macros = 3;
  std::size_t segments = 100;
  double duration_min_s = 3.2;
  double duration_max_s = 5.0;
  double frame_rate_hz = 120.0;
  double walk_speed = 1.0;         // m/s
  double position_noise_m = 0.01;  // per-joint, per-frame
  double heading_noise_rad = 0.15;
  double reach_duration_s = 1.0;
  /// Probability that a frame's gaze ray points at the true goal. Otherwise
  /// the ray points into a cone of half-angle `gaze_wander_cone_rad` around
  /// the direction of a uniformly drawn goal (pi: uniform over the sphere).
  double gaze_fixation_prob = 0.7;
  double gaze_wander_cone_rad = 0.1;
  /// Mean length of one gaze episode. Each episode keeps a single target
  /// (the true goal or one wander goal), so the per-frame probability is
  /// still `gaze_fixation_prob`. 0 redraws every frame.
  double gaze_dwell_s = 0.5;
  std::vector<std::string> subjects = {"1", "2", "4", "5", "6", "7"};
  /// Segments per subject; empty splits `segments` evenly (remainder to the
  /// first subjects). When given, must sum to `segments`.
  std::vector<std::size_t> subject_segments;
  std::uint64_t seed = 0;

  void validate() const;
  /// Resolved per-subject counts.
  std::vector<std::size_t> partition() const;
};

/// Deterministic given cfg.seed.
Dataset generate(const GenConfig& cfg);

/// The goal layout alone (depends on n_goals, n_macros and seed).
GoalSet generate_goals(const GenConfig& cfg);

}  // namespace goalpred
