// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "../common/oracles.hpp"
#include "goalpred/error.hpp"
#include "goalpred/features.hpp"
#include "goalpred/selection.hpp"
#include "test_util.hpp"

namespace goalpred {
namespace {

using testing::random_segment;
using testing::random_unit;
using testing::random_vec;
using testing::ring_goals;

FeatureConfig all_features() {
  FeatureConfig c;
  c.channels.assign(all_channels().begin(), all_channels().end());
  return c;
}

TEST(Distances, EuclideanExample) { EXPECT_DOUBLE_EQ(euclidean_distance(Vec3(0, 0, 0), Vec3(3, 4, 0)), 5.0); }

TEST(Distances, DirectionExamples) {
  EXPECT_NEAR(direction_distance(Vec3::UnitX(), Vec3::Zero(), Vec3(4, 0, 0)), 0.0, 1e-15);
  EXPECT_NEAR(direction_distance(Vec3::UnitX(), Vec3::Zero(), Vec3(-4, 0, 0)), 2.0, 1e-15);
  EXPECT_NEAR(direction_distance(Vec3::UnitX(), Vec3::Zero(), Vec3(0, 3, 0)), std::sqrt(2.0), 1e-15);
}

TEST(Distances, DirectionToCoincidentGoalIsNumericError) {
  try {
    direction_distance(Vec3::UnitX(), Vec3(1, 2, 3), Vec3(1, 2, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::numeric);
  }
}

TEST(Distances, RayExamples) {
  // On the ray, beside it, and behind the origin.
  EXPECT_NEAR(gaze_ray_distance(Vec3::Zero(), Vec3::UnitX(), Vec3(5, 0, 0)), 0.0, 1e-15);
  EXPECT_NEAR(gaze_ray_distance(Vec3::Zero(), Vec3::UnitX(), Vec3(5, 0.3, 0)), 0.3, 1e-15);
  EXPECT_NEAR(gaze_ray_distance(Vec3::Zero(), Vec3::UnitX(), Vec3(-3, 4, 0)), 5.0, 1e-15);
}

TEST(Distances, CumulativeExample) {
  const std::vector<double> d = {0.05, 0.2, 0.05, 0.1, 0.0};
  EXPECT_EQ(cumulative_gaze(d, 0.1), (std::vector<double>{1, 1, 2, 2, 3}));
}

TEST(Distances, MatchBruteForceOracles) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 a = random_vec(rng);
    const Vec3 goal = random_vec(rng);
    const Vec3 dir = random_unit(rng);
    ASSERT_NEAR(euclidean_distance(a, goal), oracle::euclidean(a, goal), 1e-9);
    ASSERT_NEAR(direction_distance(dir, a, goal), oracle::direction(dir, a, goal), 1e-9);
    ASSERT_NEAR(gaze_ray_distance(a, dir, goal), oracle::ray(a, dir, goal), 1e-9);
  }
}

TEST(Distances, CumulativeMatchesRecountAndIsMonotone) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 0.4);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> d(1 + rng() % 60);
    for (double& v : d) v = u(rng);
    const auto got = cumulative_gaze(d, 0.1);
    ASSERT_EQ(got, oracle::cumulative(d, 0.1));
    for (std::size_t k = 1; k < got.size(); ++k) ASSERT_GE(got[k], got[k - 1]);
  }
}

TEST(Channels, NamesRoundTrip) {
  for (FeatureChannel c : all_channels()) EXPECT_EQ(channel_from_name(channel_name(c)), c);
  EXPECT_EQ(parse_channel_list("gaze,hand_euc"),
            (std::vector<FeatureChannel>{FeatureChannel::gaze, FeatureChannel::hand_euc}));
  EXPECT_EQ(format_channel_list(reduced_channels()), "gaze,cumulative_gaze,head_ori,hand_euc,hand_ori");
  EXPECT_THROW(channel_from_name("elbow_euc"), Error);
}

TEST(Channels, OnlyCumulativeGazeIsArgmax) {
  for (FeatureChannel c : all_channels()) {
    EXPECT_EQ(baseline_rule(c) == BaselineRule::argmax, c == FeatureChannel::cumulative_gaze) << channel_name(c);
  }
}

TEST(FeatureConfig, RejectsEmptyDuplicateAndBadThreshold) {
  FeatureConfig c;
  EXPECT_THROW(c.validate(), Error);
  c.channels = {FeatureChannel::gaze, FeatureChannel::gaze};
  EXPECT_THROW(c.validate(), Error);
  c.channels = {FeatureChannel::gaze};
  c.gaze_fix_threshold_m = 0.0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Extract, ColumnsMatchPerChannelOps) {
  std::mt19937_64 rng(13);
  const GoalSet goals = ring_goals(4);
  const Segment seg = random_segment(rng, 30, goals);
  const FeatureConfig cfg = all_features();
  const Goal& goal = goals[2];
  const FeatureMatrix m = extract_features(seg, goal, cfg);
  ASSERT_EQ(m.frames(), 30);
  ASSERT_EQ(m.values.cols(), 16);
  std::vector<double> gaze;
  for (const Frame& f : seg.frames) gaze.push_back(oracle::ray(f.gaze_origin, f.gaze_dir, goal.position));
  const auto cum = oracle::cumulative(gaze, cfg.gaze_fix_threshold_m);
  auto col = [&](FeatureChannel c) {
    for (std::size_t k = 0; k < cfg.channels.size(); ++k) {
      if (cfg.channels[k] == c) return static_cast<Eigen::Index>(k);
    }
    return Eigen::Index{-1};
  };
  for (Eigen::Index t = 0; t < m.frames(); ++t) {
    const Frame& f = seg.frames[static_cast<std::size_t>(t)];
    const auto& rh = f.joint(Joint::right_hand);
    const auto& head = f.joint(Joint::head);
    const auto& lh = f.joint(Joint::left_hand);
    EXPECT_NEAR(m.values(t, col(FeatureChannel::hand_euc)), oracle::euclidean(rh.position, goal.position), 1e-9);
    EXPECT_NEAR(m.values(t, col(FeatureChannel::hand_ori)), oracle::direction(rh.forward, rh.position, goal.position),
                1e-9);
    EXPECT_NEAR(m.values(t, col(FeatureChannel::head_ori)),
                oracle::direction(head.forward, head.position, goal.position), 1e-9);
    EXPECT_NEAR(m.values(t, col(FeatureChannel::lhand_euc)), oracle::euclidean(lh.position, goal.position), 1e-9);
    EXPECT_NEAR(m.values(t, col(FeatureChannel::gaze)), gaze[static_cast<std::size_t>(t)], 1e-9);
    EXPECT_EQ(m.values(t, col(FeatureChannel::cumulative_gaze)), cum[static_cast<std::size_t>(t)]);
  }
}

TEST(Extract, DirectionModeUsesChordDistance) {
  std::mt19937_64 rng(14);
  const GoalSet goals = ring_goals(3);
  const Segment seg = random_segment(rng, 5, goals);
  FeatureConfig cfg;
  cfg.channels = {FeatureChannel::gaze};
  cfg.gaze_distance = GazeDistance::direction;
  const FeatureMatrix m = extract_features(seg, goals[1], cfg);
  for (Eigen::Index t = 0; t < 5; ++t) {
    const Frame& f = seg.frames[static_cast<std::size_t>(t)];
    EXPECT_NEAR(m.values(t, 0), oracle::direction(f.gaze_dir, f.gaze_origin, goals[1].position), 1e-9);
  }
}

TEST(Normalizer, ArgminIsInvariant) {
  // Dividing every goal's column by the same positive mean cannot change the
  // per-frame ordering of goals.
  std::mt19937_64 rng(15);
  const GoalSet goals = ring_goals(5);
  Dataset train{goals, {}};
  for (int i = 0; i < 10; ++i) train.segments.push_back(random_segment(rng, 12, goals));
  FeatureConfig cfg = all_features();
  cfg.gaze_fix_threshold_m = 3.0;  // random rays rarely pass within 0.1 m of a goal
  const NormStats stats = fit_normalizer(train, cfg);
  for (double m : stats.mean) ASSERT_GT(m, 0.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Segment seg = random_segment(rng, 8, goals);
    std::vector<FeatureMatrix> raw;
    std::vector<FeatureMatrix> norm;
    for (const Goal& g : goals) {
      raw.push_back(extract_features(seg, g, cfg));
      norm.push_back(apply_normalizer(raw.back(), stats));
    }
    for (Eigen::Index t = 0; t < 8; ++t) {
      for (Eigen::Index c = 0; c < 16; ++c) {
        std::vector<double> a;
        std::vector<double> b;
        for (std::size_t g = 0; g < goals.size(); ++g) {
          a.push_back(raw[g].values(t, c));
          b.push_back(norm[g].values(t, c));
        }
        ASSERT_EQ(select_by_rule(a, BaselineRule::argmin), select_by_rule(b, BaselineRule::argmin));
      }
    }
  }
}

TEST(Normalizer, MeanIsPooledOverSegmentsGoalsAndFrames) {
  std::mt19937_64 rng(16);
  const GoalSet goals = ring_goals(3);
  Dataset train{goals, {random_segment(rng, 4, goals), random_segment(rng, 7, goals)}};
  FeatureConfig cfg;
  cfg.channels = {FeatureChannel::hand_euc};
  double sum = 0.0;
  int n = 0;
  for (const Segment& s : train.segments) {
    for (const Goal& g : goals) {
      for (const Frame& f : s.frames) {
        sum += oracle::euclidean(f.joint(Joint::right_hand).position, g.position);
        ++n;
      }
    }
  }
  EXPECT_NEAR(fit_normalizer(train, cfg).mean[0], sum / n, 1e-12);
}

TEST(Normalizer, ZeroMeanIsNumericError) {
  std::mt19937_64 rng(17);
  const GoalSet goals = ring_goals(3);
  Dataset train{goals, {random_segment(rng, 4, goals)}};
  FeatureConfig cfg;
  cfg.channels = {FeatureChannel::cumulative_gaze};
  cfg.gaze_fix_threshold_m = 1e-9;  // no frame ever counts
  try {
    fit_normalizer(train, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::numeric);
  }
}

TEST(Normalizer, ChannelMismatchIsNumericError) {
  std::mt19937_64 rng(18);
  const GoalSet goals = ring_goals(3);
  Dataset train{goals, {random_segment(rng, 4, goals)}};
  FeatureConfig a;
  a.channels = {FeatureChannel::hand_euc};
  FeatureConfig b;
  b.channels = {FeatureChannel::head_euc};
  const NormStats stats = fit_normalizer(train, a);
  EXPECT_THROW(apply_normalizer(extract_features(train.segments[0], goals[0], b), stats), Error);
}

TEST(FeaturesCsv, HeaderAndRowCount) {
  std::mt19937_64 rng(19);
  const GoalSet goals = ring_goals(3);
  const Segment seg = random_segment(rng, 4, goals);
  FeatureConfig cfg;
  cfg.channels = {FeatureChannel::gaze, FeatureChannel::hand_euc};
  std::ostringstream out;
  write_features_csv(out, seg, goals, cfg);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,goal_id,gaze,hand_euc");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 12);
}

}  // namespace
}  // namespace goalpred
