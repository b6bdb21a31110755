// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptpower/importance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "promptpower/error.hpp"
#include "promptpower/metrics.hpp"
#include "promptpower/rng.hpp"

namespace promptpower {
namespace {

double rmse_of(const TrainedEstimator& model, const FeatureMatrix& x,
               std::span<const double> y) {
  double sse = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double e = y[i] - model.predict(x.row(i));
    sse += e * e;
  }
  return std::sqrt(sse / static_cast<double>(x.rows()));
}

}  // namespace

ImportanceReport permutation_importance(const TrainedEstimator& model,
                                        const TrainingData& data,
                                        std::uint64_t seed) {
  if (data.rows() < 10) {
    throw Error(ErrorCode::kTooFewRows, "importance needs at least 10 rows");
  }
  if (data.x.cols() != model.feature_count()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "model has " + std::to_string(model.feature_count()) +
                    " features, data has " + std::to_string(data.x.cols()));
  }
  const std::size_t n = data.rows();
  const double baseline = rmse_of(model, data.x, data.y);

  ImportanceReport report;
  FeatureMatrix permuted = data.x;
  std::vector<double> column(n);
  for (std::size_t f = 0; f < data.x.cols(); ++f) {
    std::vector<double> deltas;
    for (std::size_t k = 0; k < kImportancePermutations; ++k) {
      for (std::size_t i = 0; i < n; ++i) column[i] = data.x(i, f);
      SplitMix64 rng(seed + k);
      rng.shuffle(std::span<double>(column));
      for (std::size_t i = 0; i < n; ++i) permuted(i, f) = column[i];
      deltas.push_back(rmse_of(model, permuted, data.y) - baseline);
    }
    for (std::size_t i = 0; i < n; ++i) permuted(i, f) = data.x(i, f);
    ImportanceEntry e;
    e.feature = f < data.feature_names.size() ? data.feature_names[f]
                                              : "x" + std::to_string(f);
    e.index = f;
    e.score = mean(deltas);
    e.sd = sample_sd(deltas);
    report.entries.push_back(std::move(e));
  }
  std::stable_sort(report.entries.begin(), report.entries.end(),
                   [](const ImportanceEntry& a, const ImportanceEntry& b) {
                     return a.score > b.score;
                   });
  return report;
}

}  // namespace promptpower
