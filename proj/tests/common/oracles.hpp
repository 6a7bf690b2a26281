// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

// Independent reference computations used by unit and acceptance tests. They
// deliberately avoid the library's formulas.

#pragma once

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "goalpred/datamodel.hpp"
#include "goalpred/lstm.hpp"

namespace goalpred::oracle {

inline double euclidean(const Vec3& a, const Vec3& b) {
  double sum = 0.0;
  for (int k = 0; k < 3; ++k) sum += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(sum);
}

/// Chord length 2 sin(theta / 2) from the angle between `forward` and the
/// direction towards the goal.
inline double direction(const Vec3& forward, const Vec3& from, const Vec3& goal) {
  const Vec3 to = goal - from;
  const double theta = std::atan2(forward.cross(to).norm(), forward.dot(to));
  return 2.0 * std::sin(theta / 2.0);
}

/// Minimizes |origin + s dir - goal| over s >= 0 by golden-section search.
inline double ray(const Vec3& origin, const Vec3& dir, const Vec3& goal) {
  auto dist = [&](double s) { return euclidean(origin + s * dir, goal); };
  double lo = 0.0;
  double hi = euclidean(origin, goal) + 1.0;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - phi * (hi - lo);
  double b = lo + phi * (hi - lo);
  double fa = dist(a);
  double fb = dist(b);
  for (int it = 0; it < 200; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - phi * (hi - lo);
      fa = dist(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + phi * (hi - lo);
      fb = dist(b);
    }
  }
  return std::min({dist(0.0), dist((lo + hi) / 2.0)});
}

/// out[t] recounted from scratch for every t.
inline std::vector<double> cumulative(std::span<const double> d, double threshold) {
  std::vector<double> out(d.size());
  for (std::size_t t = 0; t < d.size(); ++t) {
    out[t] = static_cast<double>(std::count_if(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(t) + 1,
                                               [&](double v) { return v < threshold; }));
  }
  return out;
}

/// Cross-entropy of `target` for a parameter vector, via the public forward.
inline double loss_at(const LstmParams& like, const Eigen::VectorXd& flat, const RowMatrix& x, int target) {
  LstmParams p = like;
  p.flat() = flat;
  return cross_entropy(forward(p, x).cache, target);
}

/// Central finite-difference gradient with step h.
inline Eigen::VectorXd numeric_gradient(const LstmParams& params, const RowMatrix& x, int target, double h) {
  const Eigen::VectorXd base = params.flat();
  Eigen::VectorXd g(base.size());
  Eigen::VectorXd probe = base;
  for (Eigen::Index i = 0; i < base.size(); ++i) {
    probe[i] = base[i] + h;
    const double up = loss_at(params, probe, x, target);
    probe[i] = base[i] - h;
    const double down = loss_at(params, probe, x, target);
    probe[i] = base[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// max_i |a_i - n_i| / max(|a_i|, |n_i|, floor). The floor keeps components
/// whose true value is ~0 from dividing round-off by round-off.
inline double max_relative_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric,
                                 double floor = 1e-6) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    const double scale = std::max({std::abs(analytic[i]), std::abs(numeric[i]), floor});
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / scale);
  }
  return worst;
}

}  // namespace goalpred::oracle
