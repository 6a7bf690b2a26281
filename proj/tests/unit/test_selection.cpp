// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "goalpred/error.hpp"
#include "goalpred/selection.hpp"
#include "test_util.hpp"

namespace goalpred {
namespace {

using testing::random_segment;
using testing::ring_goals;

const std::vector<FeatureChannel> kThree = {FeatureChannel::hand_euc, FeatureChannel::head_euc,
                                            FeatureChannel::gaze};

TEST(Pearson, PerfectAndInverseCorrelation) {
  RowMatrix s(5, 3);
  for (int i = 0; i < 5; ++i) s.row(i) << i, 2.0 * i + 1.0, -3.0 * i;
  const CorrelationMatrix m = pearson_matrix(s, kThree);
  EXPECT_NEAR(m.r(0, 1), 1.0, 1e-12);
  EXPECT_NEAR(m.r(0, 2), -1.0, 1e-12);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(m.r(i, i), 1.0);
}

TEST(Pearson, SymmetricBoundedAndAffineInvariant) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    RowMatrix s(40, 3);
    for (Eigen::Index i = 0; i < s.size(); ++i) s.data()[i] = n(rng);
    s.col(1) += 0.7 * s.col(0);
    const CorrelationMatrix m = pearson_matrix(s, kThree);
    RowMatrix t = s;
    for (Eigen::Index c = 0; c < 3; ++c) t.col(c) = (t.col(c) * scale(rng)).array() + n(rng);
    const CorrelationMatrix mt = pearson_matrix(t, kThree);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        ASSERT_EQ(m.r(i, j), m.r(j, i));
        ASSERT_LE(std::abs(m.r(i, j)), 1.0);
        ASSERT_NEAR(m.r(i, j), mt.r(i, j), 1e-10);
      }
    }
  }
}

TEST(Pearson, ConstantColumnIsUndefined) {
  RowMatrix s(4, 3);
  s << 1, 5, 2, 2, 5, 1, 3, 5, 4, 4, 5, 3;
  const CorrelationMatrix m = pearson_matrix(s, kThree);
  EXPECT_TRUE(m.defined[0]);
  EXPECT_FALSE(m.defined[1]);
  EXPECT_TRUE(std::isnan(m.r(0, 1)));
  std::ostringstream out;
  write_correlation_csv(out, m);
  EXPECT_NE(out.str().find("NA"), std::string::npos);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "channel,hand_euc,head_euc,gaze");
}

TEST(Pearson, NeedsTwoRows) {
  RowMatrix s(1, 3);
  s.setOnes();
  EXPECT_THROW(pearson_matrix(s, kThree), Error);
}

TEST(Correlation, PoolsDatasetFeatures) {
  std::mt19937_64 rng(22);
  const GoalSet goals = ring_goals(4);
  Dataset d{goals, {random_segment(rng, 20, goals), random_segment(rng, 15, goals)}};
  FeatureConfig cfg;
  cfg.channels = kThree;
  const CorrelationMatrix m = correlation_matrix(d, cfg);
  EXPECT_EQ(m.r.rows(), 3);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(m.r(i, i), 1.0);
}

TEST(SelectByRule, TiesGoToLowestOrdinal) {
  const std::vector<double> v = {3.0, 1.0, 1.0, 5.0, 5.0};
  EXPECT_EQ(select_by_rule(v, BaselineRule::argmin), 1u);
  EXPECT_EQ(select_by_rule(v, BaselineRule::argmax), 3u);
}

TEST(Baseline, GazeAtGoalPicksIt) {
  std::mt19937_64 rng(23);
  const GoalSet goals = ring_goals(6);
  Segment seg = random_segment(rng, 3, goals);
  Frame& last = seg.frames.back();
  last.gaze_dir = (goals[4].position - last.gaze_origin).normalized();
  FeatureConfig cfg;
  cfg.channels = {FeatureChannel::gaze};
  EXPECT_EQ(baseline_predict(seg, goals, FeatureChannel::gaze, cfg), "g4");
}

TEST(Baseline, CumulativeGazeUsesArgmax) {
  std::mt19937_64 rng(24);
  const GoalSet goals = ring_goals(4);
  Segment seg = random_segment(rng, 6, goals);
  for (std::size_t k = 0; k < 6; ++k) {
    Frame& f = seg.frames[k];
    const std::size_t target = k < 4 ? 2 : 3;  // looks at g2 four times, g3 twice
    f.gaze_dir = (goals[target].position - f.gaze_origin).normalized();
  }
  FeatureConfig cfg;
  cfg.channels = {FeatureChannel::cumulative_gaze};
  EXPECT_EQ(baseline_predict(seg, goals, FeatureChannel::cumulative_gaze, cfg), "g2");
  EXPECT_EQ(baseline_predict(seg, goals, FeatureChannel::gaze, cfg), "g3");
}

}  // namespace
}  // namespace goalpred
