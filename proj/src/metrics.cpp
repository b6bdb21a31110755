// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptpower/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "promptpower/csv.hpp"
#include "promptpower/error.hpp"

namespace promptpower {
namespace {

MetricsReport point_metrics(std::span<const double> a,
                            std::span<const double> p, double eps,
                            bool strict) {
  if (a.size() != p.size() || a.empty()) {
    throw Error(ErrorCode::kLengthMismatch,
                "actual has " + std::to_string(a.size()) +
                    " values, predicted has " + std::to_string(p.size()));
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(p[i])) {
      throw Error(ErrorCode::kInvalidValue,
                  "non-finite value at row " + std::to_string(i));
    }
  }
  const double n = static_cast<double>(a.size());
  const double a_mean = mean(a);

  double sse = 0.0, sst = 0.0, sae = 0.0, ape = 0.0;
  std::size_t ape_rows = 0;
  MetricsReport m;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double e = a[i] - p[i];
    sse += e * e;
    sae += std::abs(e);
    sst += (a[i] - a_mean) * (a[i] - a_mean);
    if (std::abs(a[i]) > eps) {
      ape += std::abs(e) / std::abs(a[i]);
      ++ape_rows;
    } else {
      ++m.excluded_mape_rows;
    }
  }
  if (sst == 0.0) {
    if (strict) {
      throw Error(ErrorCode::kZeroVariance,
                  "all actual values are equal; r2 is undefined");
    }
    m.r2 = std::numeric_limits<double>::quiet_NaN();
  } else {
    m.r2 = 1.0 - sse / sst;
  }
  m.rmse = std::sqrt(sse / n);
  m.mae = sae / n;
  m.mape_percent = ape_rows == 0
                       ? std::numeric_limits<double>::quiet_NaN()
                       : 100.0 * ape / static_cast<double>(ape_rows);
  return m;
}

}  // namespace

MetricsReport compute_metrics(std::span<const double> actual,
                              std::span<const double> predicted,
                              double mape_epsilon) {
  return point_metrics(actual, predicted, mape_epsilon, true);
}

MetricsReport compute_metrics_lenient(std::span<const double> actual,
                                      std::span<const double> predicted,
                                      double mape_epsilon) {
  return point_metrics(actual, predicted, mape_epsilon, false);
}

std::string metrics_csv_row(std::string_view label, const MetricsReport& m) {
  using csv::format_double;
  return csv::join_line({std::string(label), format_double(m.rmse),
                         format_double(m.rmse_sd), format_double(m.r2),
                         format_double(m.r2_sd), format_double(m.mae),
                         format_double(m.mae_sd), format_double(m.mape_percent),
                         format_double(m.mape_sd),
                         std::to_string(m.excluded_mape_rows)});
}

std::pair<std::string, MetricsReport> parse_metrics_csv_row(std::string_view line) {
  const auto f = csv::split_line(line);
  if (f.size() != 10) {
    throw Error(ErrorCode::kParse, "metrics row needs 10 fields");
  }
  MetricsReport m;
  m.rmse = csv::parse_double(f[1], "RMSE");
  m.rmse_sd = csv::parse_double(f[2], "RMSESD");
  m.r2 = csv::parse_double(f[3], "R2");
  m.r2_sd = csv::parse_double(f[4], "R2SD");
  m.mae = csv::parse_double(f[5], "MAE");
  m.mae_sd = csv::parse_double(f[6], "MAESD");
  m.mape_percent = csv::parse_double(f[7], "MAPE");
  m.mape_sd = csv::parse_double(f[8], "MAPESD");
  m.excluded_mape_rows =
      static_cast<std::size_t>(csv::parse_integer(f[9], "MAPE_excluded"));
  return {f[0], m};
}

std::string holdout_csv_row(std::string_view label, const MetricsReport& m) {
  using csv::format_double;
  return csv::join_line({std::string(label), format_double(m.r2),
                         format_double(m.rmse), format_double(m.mae),
                         format_double(m.mape_percent)});
}

double mean(std::span<const double> values) {
  double s = 0.0;
  for (double v : values) s += v;
  return values.empty() ? 0.0 : s / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace promptpower
