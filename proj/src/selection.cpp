// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

#include "goalpred/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "goalpred/error.hpp"

namespace goalpred {

CorrelationMatrix pearson_matrix(const RowMatrix& samples, std::vector<FeatureChannel> channels) {
  const Eigen::Index n = samples.rows();
  const Eigen::Index f = samples.cols();
  if (n < 2) throw Error(ErrorKind::numeric, "correlation needs at least 2 samples per channel");

  // Two-pass: center first, then accumulate cross products.
  const Eigen::RowVectorXd mean = samples.colwise().mean();
  const Eigen::MatrixXd centered = samples.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered;

  CorrelationMatrix out{std::move(channels), Eigen::MatrixXd(f, f), std::vector<bool>(f)};
  Eigen::VectorXd scale(f);
  for (Eigen::Index i = 0; i < f; ++i) {
    const double var = cov(i, i);
    // Spread below round-off of the column magnitude counts as constant.
    const double spread = centered.col(i).cwiseAbs().maxCoeff();
    out.defined[i] = var > 0.0 && spread > 1e-12 * std::max(1.0, std::abs(mean[i]));
    scale[i] = std::sqrt(var);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (Eigen::Index i = 0; i < f; ++i) {
    for (Eigen::Index j = 0; j < f; ++j) {
      if (!out.defined[i] || !out.defined[j]) {
        out.r(i, j) = nan;
      } else if (i == j) {
        out.r(i, j) = 1.0;
      } else {
        out.r(i, j) = std::clamp(cov(i, j) / (scale[i] * scale[j]), -1.0, 1.0);
      }
    }
  }
  return out;
}

CorrelationMatrix correlation_matrix(const Dataset& d, const FeatureConfig& cfg) {
  cfg.validate();
  Eigen::Index rows = 0;
  for (const Segment& seg : d.segments) rows += static_cast<Eigen::Index>(seg.frames.size());
  rows *= static_cast<Eigen::Index>(d.goal_set.size());
  RowMatrix pooled(rows, static_cast<Eigen::Index>(cfg.channels.size()));
  Eigen::Index at = 0;
  for (const Segment& seg : d.segments) {
    for (const Goal& goal : d.goal_set) {
      const FeatureMatrix m = extract_features(seg, goal, cfg);
      pooled.middleRows(at, m.frames()) = m.values;
      at += m.frames();
    }
  }
  return pearson_matrix(pooled, cfg.channels);
}

void write_correlation_csv(std::ostream& out, const CorrelationMatrix& m) {
  out << "channel";
  for (FeatureChannel c : m.channels) out << ',' << channel_name(c);
  out << '\n';
  const auto old_precision = out.precision(12);
  for (std::size_t i = 0; i < m.channels.size(); ++i) {
    out << channel_name(m.channels[i]);
    for (std::size_t j = 0; j < m.channels.size(); ++j) {
      const double v = m.r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      out << ',';
      if (std::isnan(v)) {
        out << "NA";
      } else {
        out << v;
      }
    }
    out << '\n';
  }
  out.precision(old_precision);
}

std::size_t select_by_rule(std::span<const double> values, BaselineRule rule) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const bool better = rule == BaselineRule::argmin ? values[i] < values[best] : values[i] > values[best];
    if (better) best = i;
  }
  return best;
}

std::string baseline_predict(const Segment& seg_prefix, const GoalSet& goals, FeatureChannel channel,
                             const FeatureConfig& cfg) {
  if (seg_prefix.frames.empty()) throw Error(ErrorKind::usage, "baseline needs at least one frame");
  FeatureConfig single = cfg;
  single.channels = {channel};
  std::vector<double> last(goals.size());
  for (std::size_t g = 0; g < goals.size(); ++g) {
    const FeatureMatrix m = extract_features(seg_prefix, goals[g], single);
    last[g] = m.values(m.frames() - 1, 0);
  }
  return goals[select_by_rule(last, baseline_rule(channel))].id;
}

}  // namespace goalpred
