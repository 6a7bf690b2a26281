// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "goalpred/datamodel.hpp"
#include "goalpred/ensemble.hpp"
#include "goalpred/features.hpp"
#include "goalpred/lstm.hpp"
#include "goalpred/metrics.hpp"

namespace goalpred {

struct MethodResult {
  std::string name;
  double auc = 0.0;
  std::vector<double> curve;
};

/// Published MoGaze AUC for a method; display only.
struct ReferenceValue {
  std::string name;
  double auc = 0.0;
};

struct ExperimentReport {
  std::string suite;
  std::vector<MethodResult> methods;
  /// Seeds, variant descriptions and dataset hashes, in insertion order.
  std::vector<std::pair<std::string, std::string>> fingerprint;
  std::vector<ReferenceValue> reference;

  /// Throws Error(usage) when absent.
  const MethodResult& method(std::string_view name) const;
};

/// Shared settings for the experiment runners.
struct ExperimentConfig {
  TrainConfig train;
  EvalConfig eval;
  double gaze_fix_threshold_m = 0.1;
  GazeDistance gaze_distance = GazeDistance::ray;
  std::vector<double> score_grid = default_score_grid();
  std::vector<double> gaze_grid = default_gaze_grid();

  FeatureConfig features(std::vector<FeatureChannel> channels) const;
  void validate() const;
};

/// Channels evaluated by run_baselines by default.
std::vector<FeatureChannel> default_baseline_channels();

/// Published values for a suite (`baselines`, `variants`, `macro`, `nogaze`).
std::vector<ReferenceValue> reference_values(std::string_view suite);

MethodResult evaluate_traces(std::string name, std::span<const PredictionTrace> traces, const EvalConfig& eval);

/// Single-cue predictions at every evaluation frame of every segment.
std::vector<PredictionTrace> baseline_traces(const Dataset& d, FeatureChannel channel, const ExperimentConfig& cfg);

ExperimentReport run_baselines(const Dataset& test, const ExperimentConfig& cfg,
                               std::span<const FeatureChannel> channels);

/// Model for one roster entry. The enhanced variant trains its underlying
/// classifier and then grid-searches its thresholds on `train`.
TrainedModel train_variant(const Dataset& train, const VariantSpec& spec, const ExperimentConfig& cfg,
                           TrainReport* report = nullptr);

struct VariantRun {
  VariantSpec spec;
  TrainedModel model;
  std::vector<PredictionTrace> traces;
};

/// Trains and evaluates every roster entry, plus the gaze baseline for
/// comparison. Entries with identical classifier settings share one trained
/// model. Fills `runs` (one per roster entry) when given.
ExperimentReport run_variants(const Dataset& train, const Dataset& test, std::span<const VariantSpec> roster,
                              const ExperimentConfig& cfg, std::vector<VariantRun>* runs = nullptr);

/// Macro-location AUCs of already computed object-level traces.
ExperimentReport run_macro(const Dataset& test,
                           std::span<const std::pair<std::string, std::vector<PredictionTrace>>> traces,
                           const ExperimentConfig& cfg);

/// LSTM Buff and gaze baseline at macro level.
ExperimentReport run_macro_suite(const Dataset& train, const Dataset& test, const ExperimentConfig& cfg);

/// No-gaze variant against the hand and head baselines.
ExperimentReport run_nogaze(const Dataset& train, const Dataset& test, const ExperimentConfig& cfg);

/// Structured report: suite, fingerprint, per-method auc and curve, reference.
void write_report_json(std::ostream& out, const ExperimentReport& report);
/// `{"methods": {"<name>": {"auc": x}, ...}}`.
void write_summary_json(std::ostream& out, const ExperimentReport& report);
/// Aligned text table of this run next to the published reference.
void write_report_text(std::ostream& out, const ExperimentReport& report);

}  // namespace goalpred
