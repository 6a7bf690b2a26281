// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

#include "goalpred/ensemble.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <sstream>

#include "goalpred/error.hpp"
#include "goalpred/selection.hpp"

namespace goalpred {

namespace {

constexpr std::array<std::string_view, 5> kVariantNames = {"lstm", "lstm_select", "lstm_buff", "enhanced",
                                                           "no_gaze"};

bool has_gaze(std::span<const FeatureChannel> channels) {
  return std::any_of(channels.begin(), channels.end(), [](FeatureChannel c) {
    return c == FeatureChannel::gaze || c == FeatureChannel::cumulative_gaze;
  });
}

}  // namespace

std::string_view variant_name(VariantName v) noexcept { return kVariantNames[static_cast<std::size_t>(v)]; }

VariantName variant_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kVariantNames.size(); ++i) {
    if (kVariantNames[i] == name) return static_cast<VariantName>(i);
  }
  throw Error(ErrorKind::usage, "unknown variant '" + std::string(name) +
                                    "' (lstm|lstm_select|lstm_buff|enhanced|no_gaze)");
}

VariantSpec VariantSpec::preset(VariantName name) {
  VariantSpec v;
  v.name = name;
  switch (name) {
    case VariantName::lstm:
      v.channels.assign(all_channels().begin(), all_channels().end());
      break;
    case VariantName::lstm_select:
      v.channels = reduced_channels();
      break;
    case VariantName::lstm_buff:
      v.channels = reduced_channels();
      v.buffer_len = 20;
      break;
    case VariantName::enhanced:
      v.channels = reduced_channels();
      v.buffer_len = 20;
      v.enhanced = EnhancedConfig{};
      break;
    case VariantName::no_gaze:
      v.channels = no_gaze_channels();
      v.buffer_len = 20;
      v.hidden_units = 40;
      break;
  }
  return v;
}

void VariantSpec::validate() const {
  FeatureConfig{channels}.validate();
  if (hidden_units < 1) throw Error(ErrorKind::usage, "variant hidden units must be >= 1");
  if (buffer_len && *buffer_len < 1) throw Error(ErrorKind::usage, "variant buffer length must be >= 1");
  if (enhanced.has_value() != (name == VariantName::enhanced)) {
    throw Error(ErrorKind::usage, "enhanced thresholds are only valid for the enhanced variant");
  }
  if (enhanced) enhanced->validate();
  if (name == VariantName::no_gaze && has_gaze(channels)) {
    throw Error(ErrorKind::usage, "no_gaze variant must not use gaze channels");
  }
}

std::string VariantSpec::describe() const {
  std::ostringstream out;
  out << variant_name(name) << "[channels=" << format_channel_list(channels)
      << ",buffer=" << (buffer_len ? std::to_string(*buffer_len) : std::string("all"))
      << ",hidden=" << hidden_units;
  if (enhanced) out << ",score_thr=" << enhanced->score_threshold << ",gaze_thr=" << enhanced->gaze_threshold;
  out << ']';
  return out.str();
}

void check_compatible(const TrainedModel& model, const VariantSpec& variant) {
  if (model.features.channels != variant.channels) {
    throw Error(ErrorKind::usage, "model channels [" + format_channel_list(model.features.channels) +
                                      "] do not match variant channels [" +
                                      format_channel_list(variant.channels) + "]");
  }
  if (model.buffer_len != variant.buffer_len) {
    throw Error(ErrorKind::usage, "model and variant disagree on the history buffer length");
  }
  if (model.network().hidden_units != variant.hidden_units) {
    throw Error(ErrorKind::usage, "model and variant disagree on hidden units");
  }
}

namespace {

/// Normalized full-segment features per goal.
std::vector<RowMatrix> normalized_features(const Segment& seg, const GoalSet& goals, const TrainedModel& model) {
  std::vector<RowMatrix> out;
  out.reserve(goals.size());
  for (const Goal& g : goals) {
    out.push_back(apply_normalizer(extract_features(seg, g, model.features), model.norm).values);
  }
  return out;
}

InputBlock window(const RowMatrix& m, std::size_t frame, const std::optional<std::size_t>& buffer_len) {
  const auto end = static_cast<Eigen::Index>(frame) + 1;
  const Eigen::Index begin = buffer_len ? std::max<Eigen::Index>(0, end - static_cast<Eigen::Index>(*buffer_len)) : 0;
  return m.middleRows(begin, end - begin);
}

}  // namespace

std::vector<double> predict_scores(const Segment& seg_prefix, const GoalSet& goals, const TrainedModel& model,
                                   const VariantSpec& variant) {
  check_compatible(model, variant);
  if (seg_prefix.frames.empty()) throw Error(ErrorKind::usage, "prediction needs at least one frame");
  const std::vector<RowMatrix> features = normalized_features(seg_prefix, goals, model);
  std::vector<double> scores(goals.size());
  const std::size_t last = seg_prefix.frames.size() - 1;
  for (std::size_t g = 0; g < goals.size(); ++g) {
    scores[g] = score(model.params, window(features[g], last, model.buffer_len));
  }
  return scores;
}

std::size_t decide_argmax(std::span<const double> scores) {
  if (scores.empty()) throw Error(ErrorKind::usage, "no goal scores to decide between");
  return select_by_rule(scores, BaselineRule::argmax);
}

std::size_t decide_enhanced(std::span<const double> scores, std::span<const double> gaze_dists,
                            const EnhancedConfig& cfg) {
  if (scores.size() != gaze_dists.size()) {
    throw Error(ErrorKind::usage, "scores and gaze distances differ in length");
  }
  const std::size_t best = decide_argmax(scores);
  if (scores[best] > cfg.score_threshold) return best;
  const std::size_t looked_at = select_by_rule(gaze_dists, BaselineRule::argmin);
  if (gaze_dists[looked_at] < cfg.gaze_threshold) return looked_at;
  return best;
}

SegmentEvidence collect_evidence(const Segment& seg, const GoalSet& goals, const TrainedModel& model,
                                 const EvalConfig& eval) {
  SegmentEvidence ev;
  ev.n_frames = seg.frames.size();
  ev.truth = seg.picked_goal;
  ev.frames = evaluation_frames(seg.frames.size(), eval);
  const auto steps = static_cast<Eigen::Index>(ev.frames.size());
  const auto n_goals = static_cast<Eigen::Index>(goals.size());
  ev.scores.resize(steps, n_goals);
  ev.gaze_dists.resize(steps, n_goals);

  const std::vector<RowMatrix> features = normalized_features(seg, goals, model);
  for (Eigen::Index g = 0; g < n_goals; ++g) {
    const Goal& goal = goals[static_cast<std::size_t>(g)];
    if (model.buffer_len) {
      for (Eigen::Index s = 0; s < steps; ++s) {
        ev.scores(s, g) = score(model.params, window(features[g], ev.frames[s], model.buffer_len));
      }
    } else {
      const std::vector<double> sc = prefix_scores(model.params, features[g], ev.frames);
      for (Eigen::Index s = 0; s < steps; ++s) ev.scores(s, g) = sc[s];
    }
    for (Eigen::Index s = 0; s < steps; ++s) {
      const Frame& f = seg.frames[ev.frames[s]];
      ev.gaze_dists(s, g) = gaze_ray_distance(f.gaze_origin, f.gaze_dir, goal.position);
    }
  }
  return ev;
}

PredictionTrace make_trace(const SegmentEvidence& ev, const GoalSet& goals,
                           const std::optional<EnhancedConfig>& enhanced) {
  PredictionTrace tr;
  tr.truth = ev.truth;
  tr.n_frames = ev.n_frames;
  tr.steps.reserve(ev.frames.size());
  const auto n = static_cast<std::size_t>(ev.scores.cols());
  for (std::size_t s = 0; s < ev.frames.size(); ++s) {
    const auto row = static_cast<Eigen::Index>(s);
    const std::span<const double> sc(ev.scores.row(row).data(), n);
    const std::span<const double> gz(ev.gaze_dists.row(row).data(), n);
    const std::size_t chosen = enhanced ? decide_enhanced(sc, gz, *enhanced) : decide_argmax(sc);
    tr.steps.push_back({ev.frames[s], std::vector<double>(sc.begin(), sc.end()), goals[chosen].id});
  }
  return tr;
}

std::vector<SegmentEvidence> collect_dataset_evidence(const Dataset& d, const TrainedModel& model,
                                                      const EvalConfig& eval) {
  std::vector<SegmentEvidence> out;
  out.reserve(d.segments.size());
  for (const Segment& seg : d.segments) out.push_back(collect_evidence(seg, d.goal_set, model, eval));
  return out;
}

std::vector<PredictionTrace> predict_traces(const Dataset& d, const TrainedModel& model, const EvalConfig& eval,
                                            const std::optional<EnhancedConfig>& enhanced) {
  std::vector<PredictionTrace> out;
  out.reserve(d.segments.size());
  for (const Segment& seg : d.segments) {
    out.push_back(make_trace(collect_evidence(seg, d.goal_set, model, eval), d.goal_set, enhanced));
  }
  return out;
}

std::vector<double> default_score_grid() {
  std::vector<double> out;
  for (int k = 0; k <= 10; ++k) out.push_back(0.40 + 0.03 * k);
  return out;
}

std::vector<double> default_gaze_grid() {
  std::vector<double> out;
  for (int k = 1; k <= 10; ++k) out.push_back(0.05 * k);
  return out;
}

GridSearchResult grid_search_thresholds(std::span<const SegmentEvidence> evidence, const GoalSet& goals,
                                        std::span<const double> score_grid, std::span<const double> gaze_grid,
                                        const EvalConfig& eval) {
  if (score_grid.empty() || gaze_grid.empty()) throw Error(ErrorKind::usage, "threshold grids must be non-empty");
  GridSearchResult result;
  result.auc.resize(static_cast<Eigen::Index>(score_grid.size()), static_cast<Eigen::Index>(gaze_grid.size()));
  bool first = true;
  std::vector<PredictionTrace> traces(evidence.size());
  for (std::size_t i = 0; i < score_grid.size(); ++i) {
    for (std::size_t j = 0; j < gaze_grid.size(); ++j) {
      const EnhancedConfig cfg{score_grid[i], gaze_grid[j]};
      for (std::size_t s = 0; s < evidence.size(); ++s) traces[s] = make_trace(evidence[s], goals, cfg);
      const double value = auc(accuracy_curve(traces, eval));
      result.auc(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
      if (first || value > result.best_auc) {
        result.best = cfg;
        result.best_auc = value;
        first = false;
      }
    }
  }
  return result;
}

GridSearchResult grid_search_thresholds(const Dataset& train, const TrainedModel& model,
                                        std::span<const double> score_grid, std::span<const double> gaze_grid,
                                        const EvalConfig& eval) {
  if (score_grid.empty() || gaze_grid.empty()) throw Error(ErrorKind::usage, "threshold grids must be non-empty");
  const std::vector<SegmentEvidence> evidence = collect_dataset_evidence(train, model, eval);
  return grid_search_thresholds(evidence, train.goal_set, score_grid, gaze_grid, eval);
}

const std::string& macro_of(std::size_t goal_ordinal, const GoalSet& goals) {
  if (goal_ordinal >= goals.size()) throw Error(ErrorKind::usage, "goal ordinal out of range");
  return goals[goal_ordinal].macro_id;
}

PredictionTrace to_macro(const PredictionTrace& trace, const GoalSet& goals) {
  PredictionTrace out = trace;
  out.truth = macro_of(goals.require_index(trace.truth), goals);
  for (PredictionStep& s : out.steps) s.chosen = macro_of(goals.require_index(s.chosen), goals);
  return out;
}

void write_traces(std::ostream& out, std::span<const PredictionTrace> traces, const GoalSet& goals) {
  out << "# segment frame_index";
  for (const Goal& g : goals) out << " score:" << g.id;
  out << " chosen truth\n";
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < traces.size(); ++i) {
    for (const PredictionStep& s : traces[i].steps) {
      out << i << ' ' << s.frame_index;
      for (double v : s.scores) out << ' ' << v;
      out << ' ' << s.chosen << ' ' << traces[i].truth << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace goalpred
