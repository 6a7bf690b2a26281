// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

#include "goalpred/synthgen.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>

#include "goalpred/error.hpp"

namespace goalpred {

namespace {

using Rng = std::mt19937_64;

constexpr double kPi = std::numbers::pi;
constexpr double kRingRadius = 2.5;
constexpr double kRoomRadius = 2.2;
constexpr double kStandOff = 0.55;   // stand point distance in front of the goal
constexpr double kGraspGap = 0.03;   // hand stops this far short of the goal centre
constexpr double kGoalSpacing = 0.3;
constexpr double kMinGoalSeparation = 0.15;

// Quantization keeps files compact; unit vectors stay within 1e-6 of norm 1.
double quantize_position(double v) { return std::round(v * 1e6) / 1e6; }

Vec3 quantize_position(const Vec3& v) {
  return Vec3(quantize_position(v.x()), quantize_position(v.y()), quantize_position(v.z()));
}

Vec3 quantize_direction(const Vec3& v) {
  const Vec3 u = v.normalized();
  return Vec3(std::round(u.x() * 1e7) / 1e7, std::round(u.y() * 1e7) / 1e7, std::round(u.z() * 1e7) / 1e7);
}

Vec3 horizontal(double yaw) { return Vec3(std::cos(yaw), std::sin(yaw), 0.0); }

Vec3 random_unit(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(n(rng), n(rng), n(rng));
  } while (v.norm() < 1e-9);
  return v.normalized();
}

/// Uniform direction on the spherical cap of half-angle `half_angle` around `axis`.
Vec3 sample_cone(const Vec3& axis, double half_angle, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double cos_max = std::cos(std::min(half_angle, kPi));
  const double cos_t = 1.0 - u(rng) * (1.0 - cos_max);
  const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
  const double phi = 2.0 * kPi * u(rng);
  const Vec3 a = axis.normalized();
  const Vec3 helper = std::abs(a.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 b1 = a.cross(helper).normalized();
  const Vec3 b2 = a.cross(b1);
  return (cos_t * a + sin_t * (std::cos(phi) * b1 + std::sin(phi) * b2)).normalized();
}

double smoothstep(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * (3.0 - 2.0 * u);
}

std::string macro_name(std::size_t m, std::size_t n_macros) {
  if (n_macros == 3) {
    static const char* names[] = {"table", "shelf_1", "shelf_2"};
    return names[m];
  }
  return "macro_" + std::to_string(m);
}

std::vector<Goal> layout(const GenConfig& cfg, Rng& rng) {
  std::uniform_real_distribution<double> jitter(-0.03, 0.03);
  std::vector<std::size_t> per_macro(cfg.n_macros, 0);
  for (std::size_t i = 0; i < cfg.n_goals; ++i) ++per_macro[i % cfg.n_macros];

  std::vector<Goal> goals;
  std::vector<std::size_t> slot(cfg.n_macros, 0);
  for (std::size_t i = 0; i < cfg.n_goals; ++i) {
    const std::size_t m = i % cfg.n_macros;
    const std::size_t k = slot[m]++;
    const double angle = 2.0 * kPi * static_cast<double>(m) / static_cast<double>(cfg.n_macros) + kPi / 2.0;
    const Vec3 radial = horizontal(angle);
    const Vec3 tangent(-radial.y(), radial.x(), 0.0);
    const double lateral = (static_cast<double>(k) - (static_cast<double>(per_macro[m]) - 1.0) / 2.0) * kGoalSpacing;
    Vec3 p = kRingRadius * radial + lateral * tangent;
    if (m == 0) {
      // Table: one height, alternating depth.
      p += (k % 2 == 0 ? -0.15 : 0.15) * radial;
      p.z() = 0.75;
    } else {
      p.z() = 1.0 + 0.35 * static_cast<double>(k % 2);
    }
    p += Vec3(jitter(rng), jitter(rng), jitter(rng));
    goals.push_back(Goal{"obj" + std::to_string(i), quantize_position(p), macro_name(m, cfg.n_macros)});
  }
  return goals;
}

double min_separation(const std::vector<Goal>& goals) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < goals.size(); ++i) {
    for (std::size_t j = i + 1; j < goals.size(); ++j) {
      best = std::min(best, (goals[i].position - goals[j].position).norm());
    }
  }
  return best;
}

struct SegmentPlan {
  std::size_t goal = 0;
  std::size_t frames = 0;
  Vec3 start = Vec3::Zero();  // floor position
  Vec3 stand = Vec3::Zero();
  double walk_start = 0.0;
  double reach_start = 0.0;
  double initial_yaw = 0.0;
};

Segment make_segment(const GenConfig& cfg, const GoalSet& goals, const std::string& subject, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t n_goals = goals.size();

  SegmentPlan plan;
  const double duration = cfg.duration_min_s + unit(rng) * (cfg.duration_max_s - cfg.duration_min_s);
  plan.frames = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(duration * cfg.frame_rate_hz)));
  plan.goal = std::min(n_goals - 1, static_cast<std::size_t>(unit(rng) * static_cast<double>(n_goals)));
  const Vec3 goal = goals[plan.goal].position;
  const Vec3 goal_floor(goal.x(), goal.y(), 0.0);
  const Vec3 inward = goal_floor.norm() > 1e-9 ? Vec3(-goal_floor / goal_floor.norm()) : Vec3(1.0, 0.0, 0.0);
  plan.stand = goal_floor + kStandOff * inward;

  const double total = static_cast<double>(plan.frames - 1) / cfg.frame_rate_hz;
  plan.reach_start = std::max(0.0, total - cfg.reach_duration_s);
  const double radius = kRoomRadius * std::sqrt(unit(rng));
  const double theta = 2.0 * kPi * unit(rng);
  plan.start = Vec3(radius * std::cos(theta), radius * std::sin(theta), 0.0);
  const double max_walk = cfg.walk_speed * plan.reach_start;
  double walk_len = (plan.stand - plan.start).norm();
  if (walk_len > max_walk) {
    plan.start = plan.stand + (plan.start - plan.stand) * (max_walk / walk_len);
    walk_len = max_walk;
  }
  plan.walk_start = plan.reach_start - walk_len / cfg.walk_speed;
  plan.initial_yaw = 2.0 * kPi * unit(rng);

  const Vec3 walk_dir = walk_len > 1e-9 ? Vec3((plan.stand - plan.start) / walk_len) : inward;
  const double walk_yaw = std::atan2(walk_dir.y(), walk_dir.x());
  const double face_yaw = std::atan2(-inward.y(), -inward.x());

  Segment seg;
  seg.frame_rate_hz = cfg.frame_rate_hz;
  seg.picked_goal = goals[plan.goal].id;
  seg.subject_id = subject;
  seg.frames.resize(plan.frames);

  auto noise = [&](double sigma) -> Vec3 { return Vec3(gauss(rng), gauss(rng), gauss(rng)) * sigma; };
  const double sigma = cfg.position_noise_m;
  const Vec3 up = Vec3::UnitZ();

  // Gaze holds one target for a geometric number of frames.
  const double dwell_frames = cfg.gaze_dwell_s * cfg.frame_rate_hz;
  std::geometric_distribution<std::size_t> dwell(dwell_frames > 0.0 ? 1.0 / (1.0 + dwell_frames) : 1.0);
  std::size_t dwell_left = 0;
  bool on_goal = false;
  std::size_t wander_target = 0;

  for (std::size_t k = 0; k < plan.frames; ++k) {
    Frame& f = seg.frames[k];
    const double t = static_cast<double>(k) / cfg.frame_rate_hz;
    f.t = t;

    const double progress = walk_len > 1e-9 ? std::clamp((t - plan.walk_start) * cfg.walk_speed / walk_len, 0.0, 1.0) : 1.0;
    const Vec3 body = plan.start + (plan.stand - plan.start) * progress;
    double yaw = face_yaw;
    if (t < plan.walk_start) {
      yaw = plan.initial_yaw;
    } else if (progress < 1.0) {
      yaw = walk_yaw;
    }
    const double body_yaw = yaw + cfg.heading_noise_rad * gauss(rng);
    const Vec3 fwd = horizontal(body_yaw);
    const Vec3 right(fwd.y(), -fwd.x(), 0.0);

    const Vec3 pelvis = body + 1.0 * up;
    const Vec3 torso = body + 1.3 * up;
    const Vec3 head = body + 1.65 * up;
    f.joint(Joint::pelvis) = {pelvis + noise(sigma), fwd};
    f.joint(Joint::torso) = {torso + noise(sigma), fwd};
    f.joint(Joint::left_shoulder) = {body + 1.45 * up - 0.18 * right + noise(sigma), fwd};
    f.joint(Joint::right_shoulder) = {body + 1.45 * up + 0.18 * right + noise(sigma), fwd};

    const double head_yaw = body_yaw + cfg.heading_noise_rad * gauss(rng);
    const double head_pitch = 0.1 * gauss(rng);
    const Vec3 head_fwd = std::cos(head_pitch) * horizontal(head_yaw) + std::sin(head_pitch) * up;
    const Vec3 head_pos = head + noise(sigma);
    f.joint(Joint::head) = {head_pos, head_fwd};

    // Right hand rests beside the hip, then converges to the goal.
    const Vec3 rest = body + 0.85 * up + 0.25 * right + 0.1 * fwd;
    const double w = t >= plan.reach_start ? smoothstep((t - plan.reach_start) / cfg.reach_duration_s) : 0.0;
    Vec3 hand = rest;
    Vec3 hand_fwd = fwd;
    if (w > 0.0 || t >= plan.reach_start) {
      const Vec3 approach = (goal - rest).normalized();
      const Vec3 target = goal - kGraspGap * approach;
      hand = rest + (target - rest) * w;
      hand_fwd = approach;
    }
    f.joint(Joint::right_hand) = {hand + noise(sigma) * (1.0 - w), hand_fwd};

    // Left hand carries no goal information.
    f.joint(Joint::left_hand) = {body + 0.85 * up - 0.25 * right + noise(0.1), random_unit(rng)};

    f.gaze_origin = head_pos;
    if (dwell_left == 0) {
      dwell_left = dwell_frames > 0.0 ? 1 + static_cast<std::size_t>(dwell(rng)) : 1;
      on_goal = unit(rng) < cfg.gaze_fixation_prob;
      wander_target = std::min(n_goals - 1, static_cast<std::size_t>(unit(rng) * static_cast<double>(n_goals)));
    }
    --dwell_left;
    if (on_goal) {
      f.gaze_dir = goal - head_pos;
    } else {
      f.gaze_dir = sample_cone(goals[wander_target].position - head_pos, cfg.gaze_wander_cone_rad, rng);
    }

    for (Joint j : all_joints()) {
      JointPose& pose = f.joint(j);
      pose.position = quantize_position(pose.position);
      pose.forward = quantize_direction(pose.forward);
    }
    f.gaze_origin = quantize_position(f.gaze_origin);
    f.gaze_dir = quantize_direction(f.gaze_dir);
  }
  return seg;
}

}  // namespace

void GenConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::usage, "generator: " + msg); };
  if (n_goals < 2) fail("n_goals must be >= 2");
  if (n_macros < 1 || n_macros > n_goals) fail("n_macros must lie in [1, n_goals]");
  if (!(duration_min_s > 0.0) || !(duration_max_s >= duration_min_s)) fail("invalid duration range");
  if (!(frame_rate_hz > 0.0)) fail("frame rate must be positive");
  if (!(walk_speed > 0.0)) fail("walk speed must be positive");
  if (!(position_noise_m >= 0.0)) fail("position noise must be >= 0");
  if (!(heading_noise_rad >= 0.0)) fail("heading noise must be >= 0");
  if (!(reach_duration_s > 0.0)) fail("reach duration must be positive");
  if (!(gaze_fixation_prob >= 0.0 && gaze_fixation_prob <= 1.0)) fail("gaze fixation probability must lie in [0, 1]");
  if (!(gaze_wander_cone_rad > 0.0)) fail("gaze wander cone must be positive");
  if (!(gaze_dwell_s >= 0.0)) fail("gaze dwell must be >= 0");
  if (subjects.empty()) fail("at least one subject is required");
  if (!subject_segments.empty()) {
    if (subject_segments.size() != subjects.size()) fail("subject_segments must match subjects in length");
    std::size_t sum = 0;
    for (std::size_t c : subject_segments) sum += c;
    if (sum != segments) fail("subject_segments must sum to segments");
  }
}

std::vector<std::size_t> GenConfig::partition() const {
  if (!subject_segments.empty()) return subject_segments;
  std::vector<std::size_t> out(subjects.size(), segments / subjects.size());
  for (std::size_t i = 0; i < segments % subjects.size(); ++i) ++out[i];
  return out;
}

GoalSet generate_goals(const GenConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  constexpr int kAttempts = 10;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::vector<Goal> goals = layout(cfg, rng);
    const double sep = min_separation(goals);
    if (sep >= kMinGoalSeparation) return GoalSet(std::move(goals));
    std::cerr << "warning: generator: goal layout attempt " << attempt + 1 << " has separation " << sep
              << " m < " << kMinGoalSeparation << " m, regenerating\n";
  }
  throw Error(ErrorKind::numeric, "generator: could not place " + std::to_string(cfg.n_goals) + " goals on " +
                                      std::to_string(cfg.n_macros) + " macro locations without overlap");
}

Dataset generate(const GenConfig& cfg) {
  cfg.validate();
  Dataset d;
  d.goal_set = generate_goals(cfg);
  // Segment stream is seeded separately from the layout.
  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  const std::vector<std::size_t> counts = cfg.partition();
  d.segments.reserve(cfg.segments);
  for (std::size_t s = 0; s < cfg.subjects.size(); ++s) {
    for (std::size_t i = 0; i < counts[s]; ++i) {
      d.segments.push_back(make_segment(cfg, d.goal_set, cfg.subjects[s], rng));
    }
  }
  validate_dataset(d);
  return d;
}

}  // namespace goalpred
