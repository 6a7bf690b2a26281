// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

#include "goalpred/features.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "goalpred/error.hpp"

namespace goalpred {

namespace {

enum class Kind { euclidean, orientation, gaze, cumulative_gaze };

struct ChannelInfo {
  std::string_view name;
  Kind kind;
  Joint joint;  // unused for gaze kinds
};

constexpr std::array<ChannelInfo, kChannelCount> kChannels = {{
    {"hand_euc", Kind::euclidean, Joint::right_hand},
    {"hand_ori", Kind::orientation, Joint::right_hand},
    {"head_ori", Kind::orientation, Joint::head},
    {"torso_ori", Kind::orientation, Joint::torso},
    {"pelvis_ori", Kind::orientation, Joint::pelvis},
    {"lshoulder_ori", Kind::orientation, Joint::left_shoulder},
    {"rshoulder_ori", Kind::orientation, Joint::right_shoulder},
    {"lhand_euc", Kind::euclidean, Joint::left_hand},
    {"lhand_ori", Kind::orientation, Joint::left_hand},
    {"gaze", Kind::gaze, Joint::head},
    {"cumulative_gaze", Kind::cumulative_gaze, Joint::head},
    {"head_euc", Kind::euclidean, Joint::head},
    {"torso_euc", Kind::euclidean, Joint::torso},
    {"pelvis_euc", Kind::euclidean, Joint::pelvis},
    {"lshoulder_euc", Kind::euclidean, Joint::left_shoulder},
    {"rshoulder_euc", Kind::euclidean, Joint::right_shoulder},
}};

const ChannelInfo& info(FeatureChannel c) { return kChannels[static_cast<std::size_t>(c)]; }

}  // namespace

std::string_view channel_name(FeatureChannel c) noexcept { return info(c).name; }

FeatureChannel channel_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kChannelCount; ++i) {
    if (kChannels[i].name == name) return static_cast<FeatureChannel>(i);
  }
  throw Error(ErrorKind::usage, "unknown feature channel '" + std::string(name) + "'");
}

BaselineRule baseline_rule(FeatureChannel c) noexcept {
  return c == FeatureChannel::cumulative_gaze ? BaselineRule::argmax : BaselineRule::argmin;
}

const std::array<FeatureChannel, kChannelCount>& all_channels() noexcept {
  static const auto channels = [] {
    std::array<FeatureChannel, kChannelCount> out{};
    for (std::size_t i = 0; i < kChannelCount; ++i) out[i] = static_cast<FeatureChannel>(i);
    return out;
  }();
  return channels;
}

std::vector<FeatureChannel> reduced_channels() {
  return {FeatureChannel::gaze, FeatureChannel::cumulative_gaze, FeatureChannel::head_ori,
          FeatureChannel::hand_euc, FeatureChannel::hand_ori};
}

std::vector<FeatureChannel> no_gaze_channels() {
  return {FeatureChannel::hand_euc, FeatureChannel::hand_ori, FeatureChannel::head_euc,
          FeatureChannel::head_ori};
}

std::vector<FeatureChannel> parse_channel_list(std::string_view text) {
  std::vector<FeatureChannel> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string_view item = text.substr(start, comma - start);
    if (!item.empty()) out.push_back(channel_from_name(item));
    start = comma + 1;
  }
  return out;
}

std::string format_channel_list(std::span<const FeatureChannel> channels) {
  std::string out;
  for (FeatureChannel c : channels) {
    if (!out.empty()) out += ',';
    out += channel_name(c);
  }
  return out;
}

std::string_view gaze_distance_name(GazeDistance g) noexcept {
  return g == GazeDistance::ray ? "ray" : "direction";
}

GazeDistance gaze_distance_from_name(std::string_view name) {
  if (name == "ray") return GazeDistance::ray;
  if (name == "direction") return GazeDistance::direction;
  throw Error(ErrorKind::usage, "unknown gaze distance '" + std::string(name) + "' (ray|direction)");
}

void FeatureConfig::validate() const {
  if (channels.empty()) throw Error(ErrorKind::usage, "feature config has no channels");
  std::array<bool, kChannelCount> seen{};
  for (FeatureChannel c : channels) {
    auto& flag = seen[static_cast<std::size_t>(c)];
    if (flag) throw Error(ErrorKind::usage, "duplicate channel '" + std::string(channel_name(c)) + "'");
    flag = true;
  }
  if (!(gaze_fix_threshold_m > 0.0)) {
    throw Error(ErrorKind::usage, "gaze fixation threshold must be positive");
  }
}

// ---- distances ----------------------------------------------------------

double euclidean_distance(const Vec3& joint_pos, const Vec3& goal_pos) noexcept {
  return (goal_pos - joint_pos).norm();
}

double direction_distance(const Vec3& forward, const Vec3& from_pos, const Vec3& goal_pos) {
  const Vec3 delta = goal_pos - from_pos;
  const double len = delta.norm();
  if (!(len > 1e-12)) throw Error(ErrorKind::numeric, "degenerate direction: goal coincides with joint");
  return (forward - delta / len).norm();
}

double gaze_ray_distance(const Vec3& origin, const Vec3& dir, const Vec3& goal_pos) noexcept {
  const Vec3 delta = goal_pos - origin;
  const double s = delta.dot(dir);
  if (s < 0.0) return delta.norm();
  return (delta - s * dir).norm();
}

double gaze_distance(const Frame& f, const Vec3& goal_pos, GazeDistance mode) {
  if (mode == GazeDistance::ray) return gaze_ray_distance(f.gaze_origin, f.gaze_dir, goal_pos);
  return direction_distance(f.gaze_dir, f.gaze_origin, goal_pos);
}

std::vector<double> cumulative_gaze(std::span<const double> gaze_dists, double threshold_m) {
  std::vector<double> out(gaze_dists.size());
  double count = 0.0;
  for (std::size_t k = 0; k < gaze_dists.size(); ++k) {
    if (gaze_dists[k] < threshold_m) count += 1.0;
    out[k] = count;
  }
  return out;
}

// ---- extraction ---------------------------------------------------------

FeatureMatrix extract_features(const Segment& seg, const Goal& goal, const FeatureConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(seg.frames.size());
  const auto f = static_cast<Eigen::Index>(cfg.channels.size());
  FeatureMatrix out{RowMatrix(n, f), cfg.channels, goal.id};

  const bool needs_gaze = std::any_of(cfg.channels.begin(), cfg.channels.end(), [](FeatureChannel c) {
    return info(c).kind == Kind::gaze || info(c).kind == Kind::cumulative_gaze;
  });
  std::vector<double> gaze;
  std::vector<double> cumulative;
  Eigen::Index t = 0;
  try {
    if (needs_gaze) {
      gaze.resize(seg.frames.size());
      for (t = 0; t < n; ++t) gaze[t] = gaze_distance(seg.frames[t], goal.position, cfg.gaze_distance);
      cumulative = cumulative_gaze(gaze, cfg.gaze_fix_threshold_m);
    }
    for (t = 0; t < n; ++t) {
      const Frame& frame = seg.frames[t];
      for (Eigen::Index c = 0; c < f; ++c) {
        const ChannelInfo& ci = info(cfg.channels[c]);
        double v = 0.0;
        switch (ci.kind) {
          case Kind::euclidean:
            v = euclidean_distance(frame.joint(ci.joint).position, goal.position);
            break;
          case Kind::orientation: {
            const JointPose& pose = frame.joint(ci.joint);
            v = direction_distance(pose.forward, pose.position, goal.position);
            break;
          }
          case Kind::gaze: v = gaze[t]; break;
          case Kind::cumulative_gaze: v = cumulative[t]; break;
        }
        out.values(t, c) = v;
      }
    }
  } catch (const Error& e) {
    throw Error(e.kind(), "goal '" + goal.id + "', frame " + std::to_string(t) + ": " + e.what());
  }
  return out;
}

NormStats fit_normalizer(const Dataset& train, const FeatureConfig& cfg) {
  cfg.validate();
  const std::size_t f = cfg.channels.size();
  std::vector<double> sum(f, 0.0);
  double count = 0.0;
  for (const Segment& seg : train.segments) {
    for (const Goal& goal : train.goal_set) {
      const FeatureMatrix m = extract_features(seg, goal, cfg);
      const Eigen::VectorXd col_sum = m.values.colwise().sum().transpose();
      for (std::size_t c = 0; c < f; ++c) sum[c] += col_sum[static_cast<Eigen::Index>(c)];
      count += static_cast<double>(m.frames());
    }
  }
  if (count == 0.0) throw Error(ErrorKind::numeric, "cannot fit normalizer on an empty training set");
  NormStats stats{cfg.channels, std::vector<double>(f)};
  for (std::size_t c = 0; c < f; ++c) {
    stats.mean[c] = sum[c] / count;
    if (!(stats.mean[c] > 0.0) || !std::isfinite(stats.mean[c])) {
      throw Error(ErrorKind::numeric, "channel '" + std::string(channel_name(cfg.channels[c])) +
                                          "' has zero mean on the training set");
    }
  }
  return stats;
}

FeatureMatrix apply_normalizer(FeatureMatrix m, const NormStats& stats) {
  if (m.channels != stats.channels) {
    throw Error(ErrorKind::numeric, "normalizer channels [" + format_channel_list(stats.channels) +
                                        "] do not match features [" + format_channel_list(m.channels) + "]");
  }
  for (Eigen::Index c = 0; c < m.values.cols(); ++c) {
    m.values.col(c) /= stats.mean[static_cast<std::size_t>(c)];
  }
  return m;
}

void write_features_csv(std::ostream& out, const Segment& seg, const GoalSet& goals,
                        const FeatureConfig& cfg) {
  out << "t,goal_id";
  for (FeatureChannel c : cfg.channels) out << ',' << channel_name(c);
  out << '\n';
  std::vector<FeatureMatrix> per_goal;
  per_goal.reserve(goals.size());
  for (const Goal& g : goals) per_goal.push_back(extract_features(seg, g, cfg));
  const auto old_precision = out.precision(17);
  for (std::size_t t = 0; t < seg.frames.size(); ++t) {
    for (const FeatureMatrix& m : per_goal) {
      out << seg.frames[t].t << ',' << m.goal_id;
      for (Eigen::Index c = 0; c < m.values.cols(); ++c) {
        out << ',' << m.values(static_cast<Eigen::Index>(t), c);
      }
      out << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace goalpred
