// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

#include "goalpred/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "goalpred/error.hpp"
#include "goalpred/selection.hpp"

namespace goalpred {

namespace {

constexpr const char* kReferenceLabel = "reference (MoGaze, published)";

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string format_grid(std::span<const double> grid) {
  std::ostringstream out;
  for (std::size_t i = 0; i < grid.size(); ++i) out << (i ? "," : "") << grid[i];
  return out.str();
}

void add_common_fingerprint(ExperimentReport& r, const ExperimentConfig& cfg) {
  r.fingerprint.emplace_back("window_s", std::to_string(cfg.eval.window_s));
  r.fingerprint.emplace_back("stride_frames", std::to_string(cfg.eval.stride_frames));
  r.fingerprint.emplace_back("frame_rate_hz", std::to_string(cfg.eval.frame_rate_hz));
  r.fingerprint.emplace_back("gaze_distance", std::string(gaze_distance_name(cfg.gaze_distance)));
  r.fingerprint.emplace_back("gaze_fix_threshold_m", std::to_string(cfg.gaze_fix_threshold_m));
}

void add_train_fingerprint(ExperimentReport& r, const ExperimentConfig& cfg) {
  const TrainConfig& t = cfg.train;
  r.fingerprint.emplace_back("train_seed", std::to_string(t.seed));
  r.fingerprint.emplace_back("epochs", std::to_string(t.epochs));
  r.fingerprint.emplace_back("batch_size", std::to_string(t.batch_size));
  std::ostringstream lr;
  lr << t.learning_rate;
  r.fingerprint.emplace_back("learning_rate", lr.str());
  r.fingerprint.emplace_back("negative_sampling", std::string(negative_sampling_name(t.negative_sampling)));
  r.fingerprint.emplace_back("window_stride", std::to_string(t.window_stride));
}

void require_non_empty(const Dataset& d, const char* what) {
  if (d.segments.empty()) throw Error(ErrorKind::usage, std::string(what) + " dataset has no segments");
}

void require_disjoint_subjects(const Dataset& train, const Dataset& test) {
  std::set<std::string> seen;
  for (const Segment& s : train.segments) seen.insert(s.subject_id);
  for (const Segment& s : test.segments) {
    if (seen.count(s.subject_id)) {
      throw Error(ErrorKind::usage, "subject '" + s.subject_id + "' appears in both train and test");
    }
  }
  if (!(train.goal_set == test.goal_set)) throw Error(ErrorKind::usage, "train and test goal sets differ");
}

/// Key for sharing a trained classifier between roster entries.
std::string classifier_key(const VariantSpec& s) {
  return format_channel_list(s.channels) + "|" + (s.buffer_len ? std::to_string(*s.buffer_len) : "all") + "|" +
         std::to_string(s.hidden_units);
}

}  // namespace

const MethodResult& ExperimentReport::method(std::string_view name) const {
  for (const MethodResult& m : methods) {
    if (m.name == name) return m;
  }
  throw Error(ErrorKind::usage, "report '" + suite + "' has no method '" + std::string(name) + "'");
}

FeatureConfig ExperimentConfig::features(std::vector<FeatureChannel> channels) const {
  FeatureConfig f;
  f.channels = std::move(channels);
  f.gaze_fix_threshold_m = gaze_fix_threshold_m;
  f.gaze_distance = gaze_distance;
  return f;
}

void ExperimentConfig::validate() const {
  train.validate();
  eval.validate();
  features({FeatureChannel::gaze}).validate();
  if (score_grid.empty() || gaze_grid.empty()) throw Error(ErrorKind::usage, "threshold grids must be non-empty");
}

std::vector<FeatureChannel> default_baseline_channels() {
  return {FeatureChannel::hand_euc, FeatureChannel::head_ori, FeatureChannel::hand_ori,
          FeatureChannel::cumulative_gaze, FeatureChannel::gaze};
}

std::vector<ReferenceValue> reference_values(std::string_view suite) {
  if (suite == "baselines") {
    return {{"hand_euc", 83.63}, {"head_ori", 71.39}, {"hand_ori", 83.47}, {"cumulative_gaze", 103.37},
            {"gaze", 155.02}};
  }
  if (suite == "variants") {
    return {{"lstm", 134.24}, {"lstm_select", 134.43}, {"lstm_buff", 151.98}, {"enhanced", 159.01},
            {"gaze", 155.02}};
  }
  if (suite == "macro") return {{"lstm_buff", 266.31}, {"gaze", 251.31}};
  if (suite == "nogaze") return {{"no_gaze", 118.60}, {"hand_euc", 83.63}, {"head_ori", 71.39}};
  throw Error(ErrorKind::usage, "unknown suite '" + std::string(suite) + "' (baselines|variants|macro|nogaze)");
}

MethodResult evaluate_traces(std::string name, std::span<const PredictionTrace> traces, const EvalConfig& eval) {
  MethodResult m;
  m.name = std::move(name);
  m.curve = accuracy_curve(traces, eval);
  m.auc = auc(m.curve);
  return m;
}

std::vector<PredictionTrace> baseline_traces(const Dataset& d, FeatureChannel channel, const ExperimentConfig& cfg) {
  const FeatureConfig fc = cfg.features({channel});
  const BaselineRule rule = baseline_rule(channel);
  const std::size_t n_goals = d.goal_set.size();
  std::vector<PredictionTrace> out;
  out.reserve(d.segments.size());
  std::vector<RowMatrix> per_goal(n_goals);
  std::vector<double> values(n_goals);
  for (const Segment& seg : d.segments) {
    // All channels are causal, so full-segment features equal prefix features.
    for (std::size_t g = 0; g < n_goals; ++g) per_goal[g] = extract_features(seg, d.goal_set[g], fc).values;
    PredictionTrace tr;
    tr.truth = seg.picked_goal;
    tr.n_frames = seg.frames.size();
    for (std::size_t frame : evaluation_frames(seg.frames.size(), cfg.eval)) {
      for (std::size_t g = 0; g < n_goals; ++g) values[g] = per_goal[g](static_cast<Eigen::Index>(frame), 0);
      tr.steps.push_back({frame, {}, d.goal_set[select_by_rule(values, rule)].id});
    }
    out.push_back(std::move(tr));
  }
  return out;
}

ExperimentReport run_baselines(const Dataset& test, const ExperimentConfig& cfg,
                               std::span<const FeatureChannel> channels) {
  cfg.validate();
  require_non_empty(test, "test");
  ExperimentReport r;
  r.suite = "baselines";
  add_common_fingerprint(r, cfg);
  r.fingerprint.emplace_back("test_hash", hex64(dataset_hash(test)));
  for (FeatureChannel c : channels) {
    const auto traces = baseline_traces(test, c, cfg);
    r.methods.push_back(evaluate_traces(std::string(channel_name(c)), traces, cfg.eval));
  }
  r.reference = reference_values("baselines");
  return r;
}

TrainedModel train_variant(const Dataset& train_set, const VariantSpec& spec, const ExperimentConfig& cfg,
                           TrainReport* report) {
  spec.validate();
  cfg.validate();
  NetworkConfig net;
  net.input_size = spec.channels.size();
  net.hidden_units = spec.hidden_units;
  TrainedModel model = train(train_set, cfg.features(spec.channels), cfg.train, net, spec.buffer_len, report);
  model.variant = std::string(variant_name(spec.name));
  if (spec.name == VariantName::enhanced) {
    const GridSearchResult gs = grid_search_thresholds(train_set, model, cfg.score_grid, cfg.gaze_grid, cfg.eval);
    model.enhanced = gs.best;
  }
  return model;
}

ExperimentReport run_variants(const Dataset& train_set, const Dataset& test, std::span<const VariantSpec> roster,
                              const ExperimentConfig& cfg, std::vector<VariantRun>* runs) {
  cfg.validate();
  require_non_empty(train_set, "train");
  require_non_empty(test, "test");
  require_disjoint_subjects(train_set, test);
  if (roster.empty()) throw Error(ErrorKind::usage, "variant roster is empty");

  ExperimentReport r;
  r.suite = "variants";
  add_common_fingerprint(r, cfg);
  add_train_fingerprint(r, cfg);
  r.fingerprint.emplace_back("train_hash", hex64(dataset_hash(train_set)));
  r.fingerprint.emplace_back("test_hash", hex64(dataset_hash(test)));

  struct Shared {
    TrainedModel model;
    std::vector<SegmentEvidence> test_evidence;
  };
  std::map<std::string, Shared> shared;
  if (runs) runs->clear();

  for (const VariantSpec& spec : roster) {
    spec.validate();
    const std::string key = classifier_key(spec);
    auto it = shared.find(key);
    if (it == shared.end()) {
      VariantSpec plain = spec;
      plain.name = spec.name == VariantName::enhanced ? VariantName::lstm_buff : spec.name;
      plain.enhanced.reset();
      Shared s;
      s.model = train_variant(train_set, plain, cfg);
      s.test_evidence = collect_dataset_evidence(test, s.model, cfg.eval);
      it = shared.emplace(key, std::move(s)).first;
    }
    TrainedModel model = it->second.model;
    model.variant = std::string(variant_name(spec.name));
    std::optional<EnhancedConfig> rule;
    if (spec.name == VariantName::enhanced) {
      const GridSearchResult gs = grid_search_thresholds(train_set, model, cfg.score_grid, cfg.gaze_grid, cfg.eval);
      rule = gs.best;
      model.enhanced = gs.best;
      r.fingerprint.emplace_back("enhanced_thresholds", std::to_string(gs.best.score_threshold) + "," +
                                                            std::to_string(gs.best.gaze_threshold));
      r.fingerprint.emplace_back("score_grid", format_grid(cfg.score_grid));
      r.fingerprint.emplace_back("gaze_grid", format_grid(cfg.gaze_grid));
    }
    std::vector<PredictionTrace> traces;
    traces.reserve(it->second.test_evidence.size());
    for (const SegmentEvidence& ev : it->second.test_evidence) traces.push_back(make_trace(ev, test.goal_set, rule));
    r.fingerprint.emplace_back("variant:" + std::string(variant_name(spec.name)), spec.describe());
    r.fingerprint.emplace_back("model:" + std::string(variant_name(spec.name)), hex64(model.params.fingerprint()));
    r.methods.push_back(evaluate_traces(std::string(variant_name(spec.name)), traces, cfg.eval));
    if (runs) runs->push_back({spec, std::move(model), std::move(traces)});
  }
  const auto gaze = baseline_traces(test, FeatureChannel::gaze, cfg);
  r.methods.push_back(evaluate_traces("gaze", gaze, cfg.eval));
  r.reference = reference_values("variants");
  return r;
}

ExperimentReport run_macro(const Dataset& test,
                           std::span<const std::pair<std::string, std::vector<PredictionTrace>>> traces,
                           const ExperimentConfig& cfg) {
  cfg.validate();
  require_non_empty(test, "test");
  if (traces.empty()) throw Error(ErrorKind::usage, "macro evaluation needs at least one method's traces");
  ExperimentReport r;
  r.suite = "macro";
  add_common_fingerprint(r, cfg);
  r.fingerprint.emplace_back("test_hash", hex64(dataset_hash(test)));
  for (const auto& [name, object_traces] : traces) {
    std::vector<PredictionTrace> macro;
    macro.reserve(object_traces.size());
    for (const PredictionTrace& t : object_traces) macro.push_back(to_macro(t, test.goal_set));
    r.methods.push_back(evaluate_traces(name, macro, cfg.eval));
  }
  r.reference = reference_values("macro");
  return r;
}

ExperimentReport run_macro_suite(const Dataset& train_set, const Dataset& test, const ExperimentConfig& cfg) {
  const VariantSpec buff = VariantSpec::preset(VariantName::lstm_buff);
  std::vector<VariantRun> runs;
  const ExperimentReport object = run_variants(train_set, test, std::span(&buff, 1), cfg, &runs);
  std::vector<std::pair<std::string, std::vector<PredictionTrace>>> traces;
  traces.emplace_back("lstm_buff", std::move(runs.front().traces));
  traces.emplace_back("gaze", baseline_traces(test, FeatureChannel::gaze, cfg));
  ExperimentReport r = run_macro(test, traces, cfg);
  add_train_fingerprint(r, cfg);
  r.fingerprint.emplace_back("train_hash", hex64(dataset_hash(train_set)));
  r.fingerprint.emplace_back("variant:lstm_buff", buff.describe());
  for (const MethodResult& m : object.methods) {
    r.fingerprint.emplace_back("object_auc:" + m.name, std::to_string(m.auc));
  }
  return r;
}

ExperimentReport run_nogaze(const Dataset& train_set, const Dataset& test, const ExperimentConfig& cfg) {
  const VariantSpec spec = VariantSpec::preset(VariantName::no_gaze);
  ExperimentReport r = run_variants(train_set, test, std::span(&spec, 1), cfg);
  r.suite = "nogaze";
  // run_variants appends the gaze baseline; this suite compares against the
  // gaze-free cues instead.
  r.methods.erase(std::remove_if(r.methods.begin(), r.methods.end(),
                                 [](const MethodResult& m) { return m.name == "gaze"; }),
                  r.methods.end());
  for (FeatureChannel c : {FeatureChannel::hand_euc, FeatureChannel::head_ori}) {
    const auto traces = baseline_traces(test, c, cfg);
    r.methods.push_back(evaluate_traces(std::string(channel_name(c)), traces, cfg.eval));
  }
  r.reference = reference_values("nogaze");
  return r;
}

void write_report_json(std::ostream& out, const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["suite"] = report.suite;
  nlohmann::ordered_json fp = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.fingerprint) fp[k] = v;
  j["fingerprint"] = fp;
  nlohmann::ordered_json methods = nlohmann::ordered_json::object();
  for (const MethodResult& m : report.methods) methods[m.name] = {{"auc", m.auc}, {"curve", m.curve}};
  j["this_run"] = methods;
  nlohmann::ordered_json ref = nlohmann::ordered_json::object();
  for (const ReferenceValue& v : report.reference) ref[v.name] = v.auc;
  j[kReferenceLabel] = ref;
  out << j.dump(2) << '\n';
}

void write_summary_json(std::ostream& out, const ExperimentReport& report) {
  nlohmann::ordered_json methods = nlohmann::ordered_json::object();
  for (const MethodResult& m : report.methods) methods[m.name] = {{"auc", m.auc}};
  nlohmann::ordered_json j;
  j["suite"] = report.suite;
  j["methods"] = methods;
  out << j.dump(2) << '\n';
}

void write_report_text(std::ostream& out, const ExperimentReport& report) {
  char line[160];
  out << "suite: " << report.suite << '\n';
  std::snprintf(line, sizeof line, "%-18s %12s %32s\n", "method", "this run", kReferenceLabel);
  out << line;
  for (const MethodResult& m : report.methods) {
    std::string ref = "-";
    for (const ReferenceValue& v : report.reference) {
      if (v.name == m.name) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v.auc);
        ref = buf;
      }
    }
    std::snprintf(line, sizeof line, "%-18s %12.2f %32s\n", m.name.c_str(), m.auc, ref.c_str());
    out << line;
  }
}

}  // namespace goalpred
