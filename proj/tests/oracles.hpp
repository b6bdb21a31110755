// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

// Independent reference implementations used to check the library. They
// favour the most literal formulation over speed.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace oracle {

struct Metrics {
  double rmse, mae, r2, mape;
  std::size_t excluded;
};

// Two-pass textbook formulas in long double.
inline Metrics metrics(const std::vector<double>& a, const std::vector<double>& p,
                       double eps = 1e-9) {
  const std::size_t n = a.size();
  long double mean_a = 0;
  for (double v : a) mean_a += v;
  mean_a /= n;
  long double sq = 0, ab = 0, tot = 0, pct = 0;
  std::size_t kept = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const long double d = (long double)a[i] - p[i];
    sq += d * d;
    ab += std::fabs(d);
    tot += ((long double)a[i] - mean_a) * ((long double)a[i] - mean_a);
    if (std::fabs(a[i]) > eps) {
      pct += std::fabs(d) / std::fabs((long double)a[i]);
      ++kept;
    }
  }
  return {double(std::sqrt(sq / n)), double(ab / n), double(1 - sq / tot),
          kept ? double(100 * pct / kept) : std::numeric_limits<double>::quiet_NaN(),
          n - kept};
}

// O(n^2) dominance scan, result sorted by energy then input position.
struct Point {
  double energy, score;
};
inline std::vector<std::size_t> frontier(const std::vector<Point>& pts) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
      const bool weakly = pts[j].energy <= pts[i].energy && pts[j].score >= pts[i].score;
      const bool strictly = pts[j].energy < pts[i].energy || pts[j].score > pts[i].score;
      dominated = weakly && strictly;
    }
    if (!dominated) keep.push_back(i);
  }
  std::stable_sort(keep.begin(), keep.end(), [&](std::size_t x, std::size_t y) {
    return pts[x].energy < pts[y].energy;
  });
  return keep;
}

// Every (feature, midpoint) split scored by the summed squared error of the
// two children, computed directly from the member rows.
struct Split {
  std::size_t feature;
  double threshold;
  double sse;
};
inline Split best_split(const std::vector<std::vector<double>>& x,
                        const std::vector<double>& y, std::size_t min_leaf) {
  Split best{0, 0, std::numeric_limits<double>::infinity()};
  const std::size_t p = x.front().size();
  for (std::size_t f = 0; f < p; ++f) {
    std::vector<double> values;
    for (const auto& row : x) values.push_back(row[f]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      const double t = (values[k] + values[k + 1]) / 2;
      std::vector<double> left, right;
      for (std::size_t i = 0; i < x.size(); ++i) {
        (x[i][f] <= t ? left : right).push_back(y[i]);
      }
      if (left.size() < min_leaf || right.size() < min_leaf) continue;
      auto sse = [](const std::vector<double>& v) {
        double m = 0;
        for (double e : v) m += e;
        m /= v.size();
        double s = 0;
        for (double e : v) s += (e - m) * (e - m);
        return s;
      };
      const double total = sse(left) + sse(right);
      if (total < best.sse) best = {f, t, total};
    }
  }
  return best;
}

// Hyndman-Fan type 7 quantile straight from the definition.
inline double quantile7(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = (v.size() - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - lo) * (v[hi] - v[lo]);
}

}  // namespace oracle
