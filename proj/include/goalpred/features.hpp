// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "goalpred/datamodel.hpp"

namespace goalpred {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Scalar cue relating one body signal to one goal. Unqualified "hand" is the
/// right hand. The ordinal is the stable column id used in model files.
enum class FeatureChannel : std::uint8_t {
  hand_euc,
  hand_ori,
  head_ori,
  torso_ori,
  pelvis_ori,
  lshoulder_ori,
  rshoulder_ori,
  lhand_euc,
  lhand_ori,
  gaze,
  cumulative_gaze,
  head_euc,
  torso_euc,
  pelvis_euc,
  lshoulder_euc,
  rshoulder_euc,
};

inline constexpr std::size_t kChannelCount = 16;

/// How a single-cue baseline turns per-goal values into a decision.
enum class BaselineRule { argmin, argmax };

std::string_view channel_name(FeatureChannel c) noexcept;
/// Throws Error(usage) on an unknown name.
FeatureChannel channel_from_name(std::string_view name);
BaselineRule baseline_rule(FeatureChannel c) noexcept;

const std::array<FeatureChannel, kChannelCount>& all_channels() noexcept;
/// gaze, cumulative gaze, head orientation, hand position, hand orientation.
std::vector<FeatureChannel> reduced_channels();
/// Hand and head positions and orientations only.
std::vector<FeatureChannel> no_gaze_channels();

std::vector<FeatureChannel> parse_channel_list(std::string_view comma_separated);
std::string format_channel_list(std::span<const FeatureChannel> channels);

/// Gaze-to-goal distance definition. `ray` is the point-to-half-line distance
/// in meters; `direction` is the chord distance between the gaze direction and
/// the unit vector towards the goal, the same metric used for joint forwards.
enum class GazeDistance : std::uint8_t { ray, direction };

std::string_view gaze_distance_name(GazeDistance g) noexcept;
GazeDistance gaze_distance_from_name(std::string_view name);

struct FeatureConfig {
  std::vector<FeatureChannel> channels;
  double gaze_fix_threshold_m = 0.1;
  GazeDistance gaze_distance = GazeDistance::ray;

  /// Throws Error(usage) on empty or duplicated channels or a non-positive threshold.
  void validate() const;
};

struct FeatureMatrix {
  RowMatrix values;  // T x F
  std::vector<FeatureChannel> channels;
  std::string goal_id;

  Eigen::Index frames() const noexcept { return values.rows(); }
};

/// Per-channel mean over a training set, used as the normalization divisor.
struct NormStats {
  std::vector<FeatureChannel> channels;
  std::vector<double> mean;
};

double euclidean_distance(const Vec3& joint_pos, const Vec3& goal_pos) noexcept;

/// Chord distance ||forward - u|| where u is the unit vector from `from_pos` to
/// `goal_pos`. Range [0, 2]. Throws Error(numeric) when the two points coincide.
double direction_distance(const Vec3& forward, const Vec3& from_pos, const Vec3& goal_pos);

/// Distance from `goal_pos` to the half-line origin + s * dir, s >= 0.
double gaze_ray_distance(const Vec3& origin, const Vec3& dir, const Vec3& goal_pos) noexcept;

/// Gaze distance for one frame under the configured definition.
double gaze_distance(const Frame& f, const Vec3& goal_pos, GazeDistance mode);

/// out[t] = number of k <= t with gaze_dists[k] < threshold.
std::vector<double> cumulative_gaze(std::span<const double> gaze_dists, double threshold_m);

/// Raw (un-normalized) T x F feature matrix of `seg` with respect to `goal`.
FeatureMatrix extract_features(const Segment& seg, const Goal& goal, const FeatureConfig& cfg);

NormStats fit_normalizer(const Dataset& train, const FeatureConfig& cfg);

/// Divides each column by its channel mean. Throws Error(numeric) when the
/// channel lists differ.
FeatureMatrix apply_normalizer(FeatureMatrix m, const NormStats& stats);

/// Debug dump of one segment: header `t,goal_id,<channels...>`, one row per
/// (frame, goal).
void write_features_csv(std::ostream& out, const Segment& seg, const GoalSet& goals,
                        const FeatureConfig& cfg);

}  // namespace goalpred
