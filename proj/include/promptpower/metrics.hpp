// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>

namespace promptpower {

inline constexpr double kDefaultMapeEpsilon = 1e-9;

// Point metrics for one evaluation, or fold-aggregated means with sample
// standard deviations. Point reports carry zero SDs.
struct MetricsReport {
  double rmse = 0.0;
  double r2 = 0.0;
  double mae = 0.0;
  double mape_percent = 0.0;  // NaN when every row fell under the epsilon
  double rmse_sd = 0.0;
  double r2_sd = 0.0;
  double mae_sd = 0.0;
  double mape_sd = 0.0;
  std::size_t excluded_mape_rows = 0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

// Throws LengthMismatch for unequal or empty inputs, InvalidValue for
// non-finite values and ZeroVariance when all actuals are equal.
MetricsReport compute_metrics(std::span<const double> actual,
                              std::span<const double> predicted,
                              double mape_epsilon = kDefaultMapeEpsilon);

// Same as compute_metrics, but a constant `actual` yields r2 = NaN instead
// of throwing. Used for cross-validation folds.
MetricsReport compute_metrics_lenient(std::span<const double> actual,
                                      std::span<const double> predicted,
                                      double mape_epsilon = kDefaultMapeEpsilon);

// Cross-validation table, one row per model family. Numbers use the
// shortest round-trip form, so a parsed row equals the report it came from.
inline constexpr std::string_view kMetricsCsvHeader =
    "model,RMSE,RMSESD,R2,R2SD,MAE,MAESD,MAPE,MAPESD,MAPE_excluded";
std::string metrics_csv_row(std::string_view label, const MetricsReport& m);
std::pair<std::string, MetricsReport> parse_metrics_csv_row(std::string_view line);

// Held-out table: point metrics only.
inline constexpr std::string_view kHoldoutCsvHeader = "model,R2,RMSE,MAE,MAPE";
std::string holdout_csv_row(std::string_view label, const MetricsReport& m);

double mean(std::span<const double> values);
// Sample (n - 1) standard deviation; 0 for fewer than two values.
double sample_sd(std::span<const double> values);

}  // namespace promptpower
