// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

#include "goalpred/metrics.hpp"

#include <cmath>
#include <numeric>
#include <ostream>

#include "goalpred/error.hpp"

namespace goalpred {

std::size_t EvalConfig::window_frames() const {
  return static_cast<std::size_t>(std::llround(window_s * frame_rate_hz));
}

void EvalConfig::validate() const {
  if (!(window_s > 0.0)) throw Error(ErrorKind::usage, "evaluation window must be positive");
  if (stride_frames < 1) throw Error(ErrorKind::usage, "evaluation stride must be >= 1");
  if (!(frame_rate_hz > 0.0)) throw Error(ErrorKind::usage, "frame rate must be positive");
}

std::vector<std::size_t> evaluation_frames(std::size_t n_frames, const EvalConfig& cfg) {
  std::vector<std::size_t> out;
  if (n_frames == 0) return out;
  const std::size_t w = cfg.window_frames();
  const std::size_t window_start = n_frames > w ? n_frames - w : 0;
  const std::size_t first = window_start - window_start % cfg.stride_frames;
  for (std::size_t f = first; f < n_frames; f += cfg.stride_frames) out.push_back(f);
  return out;
}

std::vector<double> accuracy_curve(std::span<const PredictionTrace> traces, const EvalConfig& cfg) {
  cfg.validate();
  if (traces.empty()) throw Error(ErrorKind::usage, "accuracy curve needs at least one trace");
  const std::size_t w = cfg.window_frames();
  std::vector<double> correct(w, 0.0);
  std::vector<double> contributing(w, 0.0);

  for (const PredictionTrace& tr : traces) {
    const std::size_t n = tr.n_frames;
    // Offset index o (0-based) maps to frame n - w + o.
    const std::size_t first_offset = n >= w ? 0 : w - n;
    std::size_t step = 0;
    bool have = false;
    for (std::size_t o = first_offset; o < w; ++o) {
      const std::size_t frame = o + n - w;
      while (step < tr.steps.size() && tr.steps[step].frame_index <= frame) {
        ++step;
        have = true;
      }
      contributing[o] += 1.0;
      if (have && tr.steps[step - 1].chosen == tr.truth) correct[o] += 1.0;
    }
  }

  std::vector<double> curve(w, 0.0);
  for (std::size_t o = 0; o < w; ++o) {
    if (contributing[o] > 0.0) curve[o] = correct[o] / contributing[o];
  }
  return curve;
}

double auc(std::span<const double> curve) noexcept {
  return std::accumulate(curve.begin(), curve.end(), 0.0);
}

void write_curve_csv(std::ostream& out, std::span<const double> curve, const EvalConfig& cfg) {
  out << "offset_s,accuracy\n";
  const auto old_precision = out.precision(12);
  for (std::size_t o = 0; o < curve.size(); ++o) {
    out << static_cast<double>(o + 1) / cfg.frame_rate_hz << ',' << curve[o] << '\n';
  }
  out.precision(old_precision);
}

}  // namespace goalpred
