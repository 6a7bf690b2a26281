// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "goalpred/ensemble.hpp"
#include "goalpred/error.hpp"
#include "goalpred/synthgen.hpp"
#include "test_util.hpp"

namespace goalpred {
namespace {

TEST(Decide, ArgmaxTiesGoLow) {
  const std::vector<double> s = {0.2, 0.9, 0.9};
  EXPECT_EQ(decide_argmax(s), 1u);
}

TEST(Decide, EnhancedRuleCases) {
  const EnhancedConfig cfg{0.5, 0.2};
  // Confident classifier wins even when gaze points elsewhere.
  EXPECT_EQ(decide_enhanced(std::vector<double>{0.8, 0.1, 0.1}, std::vector<double>{1.0, 0.05, 1.0}, cfg), 0u);
  // Unsure classifier, gaze fixating goal 2.
  EXPECT_EQ(decide_enhanced(std::vector<double>{0.4, 0.3, 0.1}, std::vector<double>{1.0, 0.9, 0.1}, cfg), 2u);
  // Unsure classifier, no fixation: fall back to argmax.
  EXPECT_EQ(decide_enhanced(std::vector<double>{0.4, 0.3, 0.1}, std::vector<double>{1.0, 0.9, 0.5}, cfg), 0u);
  // Exactly at the score threshold is not "above" it.
  EXPECT_EQ(decide_enhanced(std::vector<double>{0.5, 0.3, 0.1}, std::vector<double>{1.0, 0.9, 0.1}, cfg), 2u);
}

TEST(Decide, EnhancedIsPermutationEquivariant) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const EnhancedConfig cfg{0.49, 0.2};
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng() % 8;
    std::vector<double> s(n);
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = u(rng);
      g[i] = 0.5 * u(rng);
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> ps(n);
    std::vector<double> pg(n);
    for (std::size_t i = 0; i < n; ++i) {
      ps[i] = s[perm[i]];
      pg[i] = g[perm[i]];
    }
    // Continuous draws make ties vanishingly unlikely.
    ASSERT_EQ(perm[decide_enhanced(ps, pg, cfg)], decide_enhanced(s, g, cfg));
  }
}

TEST(Decide, ZeroScoreThresholdIsPlainArgmax) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(1e-9, 1.0);
  const EnhancedConfig cfg{0.0, 0.5};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s(2 + rng() % 8);
    std::vector<double> g(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = u(rng);
      g[i] = 0.1 * u(rng);
    }
    ASSERT_EQ(decide_enhanced(s, g, cfg), decide_argmax(s));
  }
}

TEST(Decide, DuplicateGoalKeepsTheMaximumValue) {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s(2 + rng() % 8);
    for (double& v : s) v = u(rng);
    const double before = s[decide_argmax(s)];
    s.push_back(s[rng() % s.size()]);
    ASSERT_EQ(s[decide_argmax(s)], before);
  }
}

TEST(Decide, SizeMismatchIsRejected) {
  EXPECT_THROW(decide_enhanced(std::vector<double>{0.1, 0.2}, std::vector<double>{0.1}, EnhancedConfig{}), Error);
  EXPECT_THROW(decide_argmax(std::vector<double>{}), Error);
}

TEST(Presets, MatchVariantDefinitions) {
  const VariantSpec lstm = VariantSpec::preset(VariantName::lstm);
  EXPECT_EQ(lstm.channels.size(), all_channels().size());
  EXPECT_FALSE(lstm.buffer_len);
  const VariantSpec select = VariantSpec::preset(VariantName::lstm_select);
  EXPECT_EQ(select.channels, reduced_channels());
  EXPECT_FALSE(select.buffer_len);
  const VariantSpec buff = VariantSpec::preset(VariantName::lstm_buff);
  EXPECT_EQ(buff.buffer_len, 20u);
  EXPECT_EQ(buff.hidden_units, 20u);
  const VariantSpec enh = VariantSpec::preset(VariantName::enhanced);
  EXPECT_TRUE(enh.enhanced);
  EXPECT_EQ(enh.channels, buff.channels);
  const VariantSpec ng = VariantSpec::preset(VariantName::no_gaze);
  EXPECT_EQ(ng.hidden_units, 40u);
  for (FeatureChannel c : ng.channels) {
    EXPECT_NE(c, FeatureChannel::gaze);
    EXPECT_NE(c, FeatureChannel::cumulative_gaze);
  }
  for (VariantName v : {VariantName::lstm, VariantName::lstm_select, VariantName::lstm_buff, VariantName::enhanced,
                        VariantName::no_gaze}) {
    EXPECT_EQ(variant_from_name(variant_name(v)), v);
  }
  EXPECT_THROW(variant_from_name("gru"), Error);
}

struct Fixture : ::testing::Test {
  static void SetUpTestSuite() {
    data = new Dataset(generate(testing::small_gen(3, 12)));
    VariantSpec spec = VariantSpec::preset(VariantName::lstm_buff);
    spec.hidden_units = 4;
    FeatureConfig f;
    f.channels = spec.channels;
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.window_stride = 30;
    NetworkConfig net;
    net.input_size = spec.channels.size();
    net.hidden_units = 4;
    model = new TrainedModel(train(*data, f, cfg, net, spec.buffer_len));
    model->variant = "lstm_buff";
    full = new TrainedModel(train(*data, f, cfg, net, std::nullopt));
  }
  static void TearDownTestSuite() {
    delete data;
    delete model;
    delete full;
  }
  static VariantSpec buff_spec() {
    VariantSpec s = VariantSpec::preset(VariantName::lstm_buff);
    s.hidden_units = 4;
    return s;
  }
  static VariantSpec full_spec() {
    VariantSpec s = buff_spec();
    s.buffer_len.reset();
    return s;
  }
  static Segment prefix(const Segment& s, std::size_t frame) {
    Segment p = s;
    p.frames.resize(frame + 1);
    return p;
  }

  static Dataset* data;
  static TrainedModel* model;
  static TrainedModel* full;
};
Dataset* Fixture::data = nullptr;
TrainedModel* Fixture::model = nullptr;
TrainedModel* Fixture::full = nullptr;

TEST_F(Fixture, EvidenceMatchesPerPrefixPrediction) {
  const EvalConfig eval;
  for (const auto& [m, spec] : {std::pair{model, buff_spec()}, std::pair{full, full_spec()}}) {
    for (std::size_t si = 0; si < 3; ++si) {
      const Segment& seg = data->segments[si];
      const SegmentEvidence ev = collect_evidence(seg, data->goal_set, *m, eval);
      ASSERT_EQ(ev.frames, evaluation_frames(seg.frames.size(), eval));
      for (std::size_t k = 0; k < ev.frames.size(); k += 7) {
        const auto want = predict_scores(prefix(seg, ev.frames[k]), data->goal_set, *m, spec);
        for (std::size_t g = 0; g < want.size(); ++g) {
          ASSERT_NEAR(ev.scores(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(g)), want[g], 1e-12);
        }
      }
    }
  }
}

TEST_F(Fixture, ScoresArePermutationEquivariant) {
  std::vector<Goal> shuffled(data->goal_set.begin(), data->goal_set.end());
  std::mt19937_64 rng(42);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const GoalSet perm(shuffled);
  const Segment& seg = data->segments[0];
  const auto a = predict_scores(seg, data->goal_set, *model, buff_spec());
  const auto b = predict_scores(seg, perm, *model, buff_spec());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    EXPECT_EQ(b[i], a[*data->goal_set.index_of(perm[i].id)]);
  }
}

TEST_F(Fixture, IncompatibleVariantIsRejected) {
  EXPECT_NO_THROW(check_compatible(*model, buff_spec()));
  EXPECT_THROW(check_compatible(*model, full_spec()), Error);
  VariantSpec wide = buff_spec();
  wide.hidden_units = 20;
  EXPECT_THROW(check_compatible(*model, wide), Error);
  EXPECT_THROW(check_compatible(*model, VariantSpec::preset(VariantName::no_gaze)), Error);
}

TEST_F(Fixture, GridSearchPicksFirstBest) {
  const EvalConfig eval;
  const auto ev = collect_dataset_evidence(*data, *model, eval);
  const auto sg = default_score_grid();
  const auto gg = default_gaze_grid();
  ASSERT_EQ(sg.size(), 11u);
  ASSERT_EQ(gg.size(), 10u);
  EXPECT_NEAR(sg.back(), 0.70, 1e-12);
  EXPECT_NEAR(gg.back(), 0.50, 1e-12);
  const GridSearchResult r = grid_search_thresholds(ev, data->goal_set, sg, gg, eval);
  double best = -1.0;
  Eigen::Index bi = 0;
  Eigen::Index bj = 0;
  for (Eigen::Index i = 0; i < r.auc.rows(); ++i) {
    for (Eigen::Index j = 0; j < r.auc.cols(); ++j) {
      std::vector<PredictionTrace> traces;
      const EnhancedConfig c{sg[static_cast<std::size_t>(i)], gg[static_cast<std::size_t>(j)]};
      for (const auto& e : ev) traces.push_back(make_trace(e, data->goal_set, c));
      const double a = auc(accuracy_curve(traces, eval));
      ASSERT_NEAR(r.auc(i, j), a, 1e-9);
      if (a > best) {
        best = a;
        bi = i;
        bj = j;
      }
    }
  }
  EXPECT_EQ(r.best.score_threshold, sg[static_cast<std::size_t>(bi)]);
  EXPECT_EQ(r.best.gaze_threshold, gg[static_cast<std::size_t>(bj)]);
  EXPECT_EQ(r.best_auc, best);
}

TEST_F(Fixture, MacroAccuracyDominatesObjectAccuracy) {
  const EvalConfig eval;
  const auto traces = predict_traces(*data, *model, eval, std::nullopt);
  std::vector<PredictionTrace> macro;
  for (const auto& t : traces) macro.push_back(to_macro(t, data->goal_set));
  const auto obj = accuracy_curve(traces, eval);
  const auto mac = accuracy_curve(macro, eval);
  for (std::size_t o = 0; o < obj.size(); ++o) ASSERT_GE(mac[o], obj[o]);
}

TEST_F(Fixture, TraceDumpFormat) {
  const EvalConfig eval;
  const auto traces = predict_traces(*data, *model, eval, std::nullopt);
  std::ostringstream out;
  write_traces(out, std::span(traces).first(1), data->goal_set);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# segment frame_index score:", 0), 0u);
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string s; fields >> s;) tok.push_back(s);
    ASSERT_EQ(tok.size(), 2 + data->goal_set.size() + 2);
    EXPECT_EQ(tok[0], "0");
    EXPECT_EQ(tok.back(), traces[0].truth);
    ++lines;
  }
  EXPECT_EQ(lines, traces[0].steps.size());
}

TEST(Macro, CoarseningMapsBothSides) {
  const GoalSet goals = testing::ring_goals(4, 2);
  PredictionTrace t;
  t.truth = "g0";
  t.n_frames = 10;
  t.steps.push_back({0, {}, "g2"});
  const PredictionTrace m = to_macro(t, goals);
  EXPECT_EQ(m.truth, "m0");
  EXPECT_EQ(m.steps[0].chosen, "m0");
  EXPECT_EQ(macro_of(3, goals), "m1");
}

}  // namespace
}  // namespace goalpred
