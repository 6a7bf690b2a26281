// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

#include "goalpred/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "goalpred/datamodel.hpp"
#include "goalpred/ensemble.hpp"
#include "goalpred/experiments.hpp"
#include "goalpred/features.hpp"
#include "goalpred/lstm.hpp"
#include "goalpred/metrics.hpp"
#include "goalpred/selection.hpp"
#include "goalpred/synthgen.hpp"

namespace goalpred {

namespace fs = std::filesystem;

namespace {

constexpr const char* kExitCodeHelp =
    "Exit codes: 0 ok, 1 internal error, 2 usage, 3 i/o, 4 parse, 5 invariant, 6 numeric, 7 training.\n"
    "Errors are printed as one line: goalpred: error[<kind>]: <message>";

struct Options {
  std::string out = ".";

  // generate
  GenConfig gen;
  std::string subjects = "1,2,4,5,6,7";
  std::string subject_segments;
  std::string train_subjects = "1,2,4,5";

  // data / model inputs
  std::string data;
  std::string train_data;
  std::string test_data;
  std::string model;

  // features
  std::string channels;
  double gaze_threshold = 0.1;
  std::string gaze_distance = "ray";
  std::size_t segment_index = 0;

  // training
  std::string variant = "lstm_buff";
  TrainConfig train;
  std::string negatives = "all";
  std::size_t hidden = 0;
  std::size_t buffer = 0;
  bool full_history = false;
  std::string score_grid;
  std::string gaze_grid;

  // evaluation
  double window_s = 3.0;
  std::size_t stride = 10;
  double frame_rate = 0.0;
  std::string suite;
  std::string roster = "lstm,lstm_select,lstm_buff,enhanced";
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
std::vector<T> parse_numbers(const std::string& s, const char* what) {
  std::vector<T> out;
  for (const std::string& item : split_list(s)) {
    std::istringstream in(item);
    T v{};
    if (!(in >> v) || !in.eof()) throw Error(ErrorKind::usage, std::string("bad number '") + item + "' in " + what);
    out.push_back(v);
  }
  return out;
}

void add_output(CLI::App* app, Options& o) {
  app->add_option("--out", o.out, "Output directory (created if missing)")->capture_default_str();
}

void add_feature_flags(CLI::App* app, Options& o) {
  app->add_option("--gaze-threshold", o.gaze_threshold, "Gaze fixation threshold in meters for cumulative gaze")
      ->capture_default_str();
  app->add_option("--gaze-distance", o.gaze_distance, "Gaze-goal distance: ray (meters) or direction")
      ->capture_default_str();
}

void add_eval_flags(CLI::App* app, Options& o) {
  app->add_option("--window", o.window_s, "Evaluation window before the grasp, seconds")->capture_default_str();
  app->add_option("--stride", o.stride, "Frames between predictions")->capture_default_str();
  app->add_option("--frame-rate", o.frame_rate, "Frame rate in Hz (default: taken from the dataset)");
}

void add_train_flags(CLI::App* app, Options& o) {
  app->add_option("--epochs", o.train.epochs, "Training epochs")->capture_default_str();
  app->add_option("--batch-size", o.train.batch_size, "Minibatch size")->capture_default_str();
  app->add_option("--lr", o.train.learning_rate, "Adam learning rate")->capture_default_str();
  app->add_option("--beta1", o.train.beta1, "Adam beta1")->capture_default_str();
  app->add_option("--beta2", o.train.beta2, "Adam beta2")->capture_default_str();
  app->add_option("--adam-eps", o.train.epsilon, "Adam epsilon")->capture_default_str();
  app->add_option("--seed", o.train.seed, "Training seed")->capture_default_str();
  app->add_option("--negatives", o.negatives, "Negative sampling: all or balanced")->capture_default_str();
  app->add_option("--window-stride", o.train.window_stride, "Frames between buffered training windows")
      ->capture_default_str();
  app->add_option("--score-grid", o.score_grid, "Comma-separated score thresholds searched for the enhanced rule");
  app->add_option("--gaze-grid", o.gaze_grid, "Comma-separated gaze thresholds (m) searched for the enhanced rule");
}

void add_variant_overrides(CLI::App* app, Options& o) {
  app->add_option("--channels", o.channels, "Comma-separated feature channels (default: the variant's)");
  app->add_option("--hidden", o.hidden, "Hidden units (default: the variant's)");
  app->add_option("--buffer", o.buffer, "History buffer length in frames (default: the variant's)");
  app->add_flag("--full-history", o.full_history, "Feed the whole history instead of a buffer");
}

void build(CLI::App& app, Options& o) {
  app.require_subcommand(1);
  app.footer(kExitCodeHelp);

  auto* gen = app.add_subcommand("generate", "Write a synthetic dataset split into train and test files");
  gen->add_option("--seed", o.gen.seed, "Generator seed")->capture_default_str();
  gen->add_option("--goals", o.gen.n_goals, "Number of goals")->capture_default_str();
  gen->add_option("--macros", o.gen.n_macros, "Number of macro locations")->capture_default_str();
  gen->add_option("--segments", o.gen.segments, "Total number of segments")->capture_default_str();
  gen->add_option("--duration-min", o.gen.duration_min_s, "Shortest segment, seconds")->capture_default_str();
  gen->add_option("--duration-max", o.gen.duration_max_s, "Longest segment, seconds")->capture_default_str();
  gen->add_option("--frame-rate", o.gen.frame_rate_hz, "Frame rate in Hz")->capture_default_str();
  gen->add_option("--walk-speed", o.gen.walk_speed, "Walking speed, m/s")->capture_default_str();
  gen->add_option("--position-noise", o.gen.position_noise_m, "Joint position noise, m")->capture_default_str();
  gen->add_option("--heading-noise", o.gen.heading_noise_rad, "Body and head heading noise, rad")
      ->capture_default_str();
  gen->add_option("--reach-duration", o.gen.reach_duration_s, "Duration of the final reach, seconds")
      ->capture_default_str();
  gen->add_option("--gaze-prob", o.gen.gaze_fixation_prob, "Per-frame probability of looking at the true goal")
      ->capture_default_str();
  gen->add_option("--gaze-cone", o.gen.gaze_wander_cone_rad,
                  "Half-angle of the cone around a random goal when the gaze wanders, rad")
      ->capture_default_str();
  gen->add_option("--gaze-dwell", o.gen.gaze_dwell_s, "Mean duration of one gaze episode, seconds (0: per frame)")
      ->capture_default_str();
  gen->add_option("--subjects", o.subjects, "Comma-separated subject ids")->capture_default_str();
  gen->add_option("--subject-segments", o.subject_segments,
                  "Comma-separated segment count per subject (default: even split)");
  gen->add_option("--train-subjects", o.train_subjects, "Subjects written to the train file; the rest go to test")
      ->capture_default_str();
  add_output(gen, o);

  auto* train = app.add_subcommand("train", "Train one model variant and write <out>/<variant>.model");
  train->add_option("--data", o.data, "Training dataset file")->required();
  train->add_option("--variant", o.variant, "lstm, lstm_select, lstm_buff, enhanced or no_gaze")
      ->capture_default_str();
  add_variant_overrides(train, o);
  add_train_flags(train, o);
  add_feature_flags(train, o);
  add_eval_flags(train, o);
  add_output(train, o);

  auto* predict = app.add_subcommand("predict", "Score every evaluation frame and write <out>/predictions.txt");
  predict->add_option("--model", o.model, "Model file")->required();
  predict->add_option("--data", o.data, "Dataset file")->required();
  add_eval_flags(predict, o);
  add_output(predict, o);

  auto* baselines = app.add_subcommand("baselines", "Single-cue baseline AUCs on a dataset");
  baselines->add_option("--data", o.data, "Test dataset file")->required();
  baselines->add_option("--channels", o.channels, "Comma-separated channels (default: the standard five)");
  add_feature_flags(baselines, o);
  add_eval_flags(baselines, o);
  add_output(baselines, o);

  auto* correlate = app.add_subcommand("correlate", "Pearson matrix of feature channels, <out>/correlation.csv");
  correlate->add_option("--data", o.data, "Dataset file")->required();
  correlate->add_option("--channels", o.channels, "Comma-separated channels (default: all)");
  add_feature_flags(correlate, o);
  add_output(correlate, o);

  auto* eval = app.add_subcommand("eval", "Run an experiment suite and write report.json, summary.json and curves");
  eval->add_option("--suite", o.suite, "baselines, variants, macro or nogaze")
      ->required()
      ->check(CLI::IsMember({"baselines", "variants", "macro", "nogaze"}));
  eval->add_option("--train", o.train_data, "Training dataset file (all suites but baselines)");
  eval->add_option("--test", o.test_data, "Test dataset file")->required();
  eval->add_option("--variants", o.roster, "Roster for the variants suite")->capture_default_str();
  add_train_flags(eval, o);
  add_feature_flags(eval, o);
  add_eval_flags(eval, o);
  add_output(eval, o);

  auto* features = app.add_subcommand("features", "Dump raw features of one segment, <out>/features.csv");
  features->add_option("--data", o.data, "Dataset file")->required();
  features->add_option("--segment", o.segment_index, "Segment index")->capture_default_str();
  features->add_option("--channels", o.channels, "Comma-separated channels (default: all)");
  add_feature_flags(features, o);
  add_output(features, o);
}

fs::path prepare_out(const Options& o) {
  const fs::path dir(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorKind::io, "cannot create output directory '" + o.out + "'");
  }
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::io, "cannot write '" + path.string() + "'");
  return f;
}

std::vector<FeatureChannel> channels_or(const Options& o, std::vector<FeatureChannel> fallback) {
  return o.channels.empty() ? fallback : parse_channel_list(o.channels);
}

FeatureConfig feature_config(const Options& o, std::vector<FeatureChannel> channels) {
  FeatureConfig f;
  f.channels = std::move(channels);
  f.gaze_fix_threshold_m = o.gaze_threshold;
  f.gaze_distance = gaze_distance_from_name(o.gaze_distance);
  f.validate();
  return f;
}

EvalConfig eval_config(const Options& o, const Dataset& d) {
  EvalConfig e;
  e.window_s = o.window_s;
  e.stride_frames = o.stride;
  if (o.frame_rate > 0.0) {
    e.frame_rate_hz = o.frame_rate;
  } else if (!d.segments.empty()) {
    e.frame_rate_hz = d.segments.front().frame_rate_hz;
  }
  e.validate();
  return e;
}

ExperimentConfig experiment_config(const Options& o, const Dataset& d) {
  ExperimentConfig c;
  c.train = o.train;
  c.train.negative_sampling = negative_sampling_from_name(o.negatives);
  c.eval = eval_config(o, d);
  c.gaze_fix_threshold_m = o.gaze_threshold;
  c.gaze_distance = gaze_distance_from_name(o.gaze_distance);
  if (!o.score_grid.empty()) c.score_grid = parse_numbers<double>(o.score_grid, "--score-grid");
  if (!o.gaze_grid.empty()) c.gaze_grid = parse_numbers<double>(o.gaze_grid, "--gaze-grid");
  c.validate();
  return c;
}

void write_text(const fs::path& path, const std::string& content, std::ostream& out) {
  std::ofstream f = open_out(path);
  f << content;
  if (!f) throw Error(ErrorKind::io, "write failed for '" + path.string() + "'");
  out << "wrote " << path.string() << '\n';
}

int cmd_generate(const Options& o, std::ostream& out) {
  GenConfig g = o.gen;
  g.subjects = split_list(o.subjects);
  if (!o.subject_segments.empty()) g.subject_segments = parse_numbers<std::size_t>(o.subject_segments, "--subject-segments");
  g.validate();
  std::set<std::string> train_ids;
  for (const std::string& s : split_list(o.train_subjects)) train_ids.insert(s);
  std::set<std::string> test_ids;
  for (const std::string& s : g.subjects) {
    if (!train_ids.count(s)) test_ids.insert(s);
  }
  for (const std::string& s : train_ids) {
    if (std::find(g.subjects.begin(), g.subjects.end(), s) == g.subjects.end()) {
      throw Error(ErrorKind::usage, "train subject '" + s + "' is not in --subjects");
    }
  }
  const fs::path dir = prepare_out(o);
  const Dataset all = generate(g);
  const auto [train_set, test_set] = split_by_subject(all, train_ids, test_ids);
  save_dataset(dir / "all", all);
  save_dataset(dir / "train", train_set);
  save_dataset(dir / "test", test_set);
  out << "wrote " << (dir / "all").string() << " (" << all.segments.size() << " segments), "
      << (dir / "train").string() << " (" << train_set.segments.size() << "), " << (dir / "test").string() << " ("
      << test_set.segments.size() << ")\n";
  return kExitOk;
}

VariantSpec variant_spec(const Options& o) {
  VariantSpec v = VariantSpec::preset(variant_from_name(o.variant));
  if (!o.channels.empty()) v.channels = parse_channel_list(o.channels);
  if (o.hidden > 0) v.hidden_units = o.hidden;
  if (o.full_history && o.buffer > 0) throw Error(ErrorKind::usage, "--buffer and --full-history are exclusive");
  if (o.buffer > 0) v.buffer_len = o.buffer;
  if (o.full_history) v.buffer_len.reset();
  v.validate();
  return v;
}

int cmd_train(const Options& o, std::ostream& out) {
  const VariantSpec spec = variant_spec(o);
  const Dataset d = load_dataset(o.data);
  const ExperimentConfig cfg = experiment_config(o, d);
  const fs::path dir = prepare_out(o);
  TrainReport report;
  const TrainedModel model = train_variant(d, spec, cfg, &report);
  const fs::path path = dir / (std::string(variant_name(spec.name)) + ".model");
  save_model(path, model);
  out << "variant " << spec.describe() << '\n';
  for (std::size_t e = 0; e < report.epoch_loss.size(); ++e) {
    out << "epoch " << e + 1 << " loss " << report.epoch_loss[e] << '\n';
  }
  out << "examples " << report.positives << " positive, " << report.negatives << " negative; train accuracy "
      << report.final_accuracy << '\n';
  if (model.enhanced) {
    out << "enhanced thresholds score " << model.enhanced->score_threshold << " gaze " << model.enhanced->gaze_threshold
        << '\n';
  }
  out << "wrote " << path.string() << '\n';
  return kExitOk;
}

int cmd_predict(const Options& o, std::ostream& out) {
  const TrainedModel model = load_model(o.model);
  const Dataset d = load_dataset(o.data);
  const EvalConfig eval = eval_config(o, d);
  const fs::path dir = prepare_out(o);
  const auto traces = predict_traces(d, model, eval, model.enhanced);
  std::ostringstream text;
  write_traces(text, traces, d.goal_set);
  write_text(dir / "predictions.txt", text.str(), out);
  return kExitOk;
}

void write_report_files(const fs::path& dir, const ExperimentReport& r, const EvalConfig& eval, std::ostream& out) {
  std::ostringstream report;
  write_report_json(report, r);
  write_text(dir / "report.json", report.str(), out);
  std::ostringstream summary;
  write_summary_json(summary, r);
  write_text(dir / "summary.json", summary.str(), out);
  std::ostringstream all;
  all << "method,offset_s,accuracy\n";
  for (const MethodResult& m : r.methods) {
    std::ostringstream one;
    write_curve_csv(one, m.curve, eval);
    write_text(dir / ("curve_" + m.name + ".csv"), one.str(), out);
    std::istringstream lines(one.str());
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) all << m.name << ',' << line << '\n';
  }
  write_text(dir / "curve.csv", all.str(), out);
  std::ostringstream table;
  write_report_text(table, r);
  write_text(dir / "report.txt", table.str(), out);
  out << table.str();
}

int cmd_baselines(const Options& o, std::ostream& out) {
  const std::vector<FeatureChannel> channels = channels_or(o, default_baseline_channels());
  const Dataset d = load_dataset(o.data);
  const ExperimentConfig cfg = experiment_config(o, d);
  const fs::path dir = prepare_out(o);
  write_report_files(dir, run_baselines(d, cfg, channels), cfg.eval, out);
  return kExitOk;
}

int cmd_correlate(const Options& o, std::ostream& out) {
  const auto all = all_channels();
  const FeatureConfig fc = feature_config(o, channels_or(o, {all.begin(), all.end()}));
  const Dataset d = load_dataset(o.data);
  const fs::path dir = prepare_out(o);
  std::ostringstream csv;
  write_correlation_csv(csv, correlation_matrix(d, fc));
  write_text(dir / "correlation.csv", csv.str(), out);
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
  if (o.suite != "baselines" && o.train_data.empty()) {
    throw Error(ErrorKind::usage, "--train is required for suite '" + o.suite + "'");
  }
  std::vector<VariantSpec> roster;
  if (o.suite == "variants") {
    for (const std::string& name : split_list(o.roster)) roster.push_back(VariantSpec::preset(variant_from_name(name)));
  }
  const Dataset test = load_dataset(o.test_data);
  const Dataset train_set = o.train_data.empty() ? Dataset{} : load_dataset(o.train_data);
  const ExperimentConfig cfg = experiment_config(o, test);
  const fs::path dir = prepare_out(o);
  ExperimentReport r;
  if (o.suite == "baselines") {
    r = run_baselines(test, cfg, default_baseline_channels());
  } else if (o.suite == "variants") {
    r = run_variants(train_set, test, roster, cfg);
  } else if (o.suite == "macro") {
    r = run_macro_suite(train_set, test, cfg);
  } else {
    r = run_nogaze(train_set, test, cfg);
  }
  write_report_files(dir, r, cfg.eval, out);
  return kExitOk;
}

int cmd_features(const Options& o, std::ostream& out) {
  const auto all = all_channels();
  const FeatureConfig fc = feature_config(o, channels_or(o, {all.begin(), all.end()}));
  const Dataset d = load_dataset(o.data);
  if (o.segment_index >= d.segments.size()) {
    throw Error(ErrorKind::usage, "segment " + std::to_string(o.segment_index) + " out of range (dataset has " +
                                      std::to_string(d.segments.size()) + ")");
  }
  const fs::path dir = prepare_out(o);
  std::ostringstream csv;
  write_features_csv(csv, d.segments[o.segment_index], d.goal_set, fc);
  write_text(dir / "features.csv", csv.str(), out);
  return kExitOk;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

CLI::App* find_subcommand(CLI::App& app, std::string_view name) {
  for (CLI::App* sub : app.get_subcommands({})) {
    if (sub->get_name() == name) return sub;
  }
  throw Error(ErrorKind::usage, "unknown subcommand '" + std::string(name) + "'");
}

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::usage:
      return kExitUsage;
    case ErrorKind::io:
      return kExitIo;
    case ErrorKind::parse:
      return kExitParse;
    case ErrorKind::invariant:
      return kExitInvariant;
    case ErrorKind::numeric:
      return kExitNumeric;
    case ErrorKind::training:
      return kExitTraining;
  }
  return kExitInternal;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app("Goal prediction from body and gaze cues", "goalpred");
  Options o;
  build(app, o);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help and friends.
      return app.exit(e, out, err);
    }
    err << "goalpred: error[usage]: " << one_line(e.what()) << '\n';
    return kExitUsage;
  }
  try {
    const std::string sub = app.get_subcommands().front()->get_name();
    if (sub == "generate") return cmd_generate(o, out);
    if (sub == "train") return cmd_train(o, out);
    if (sub == "predict") return cmd_predict(o, out);
    if (sub == "baselines") return cmd_baselines(o, out);
    if (sub == "correlate") return cmd_correlate(o, out);
    if (sub == "eval") return cmd_eval(o, out);
    if (sub == "features") return cmd_features(o, out);
    throw Error(ErrorKind::usage, "unknown subcommand '" + sub + "'");
  } catch (const Error& e) {
    err << "goalpred: error[" << error_kind_name(e.kind()) << "]: " << one_line(e.what()) << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "goalpred: error[internal]: " << one_line(e.what()) << '\n';
    return kExitInternal;
  }
}

std::vector<std::string> subcommand_names() {
  CLI::App app;
  Options o;
  build(app, o);
  std::vector<std::string> out;
  for (CLI::App* sub : app.get_subcommands({})) out.push_back(sub->get_name());
  return out;
}

std::vector<std::string> subcommand_flags(std::string_view subcommand) {
  CLI::App app;
  Options o;
  build(app, o);
  std::vector<std::string> out;
  for (const CLI::Option* opt : find_subcommand(app, subcommand)->get_options()) {
    for (const std::string& name : opt->get_lnames()) out.push_back("--" + name);
  }
  return out;
}

std::string subcommand_help(std::string_view subcommand) {
  CLI::App app("Goal prediction from body and gaze cues", "goalpred");
  Options o;
  build(app, o);
  CLI::App* sub = find_subcommand(app, subcommand);
  return sub->help();
}

}  // namespace goalpred
