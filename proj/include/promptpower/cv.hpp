// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

// Repeated k-fold cross-validation with grid search, and held-out-model
// evaluation.

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "promptpower/dataset.hpp"
#include "promptpower/estimator.hpp"
#include "promptpower/features.hpp"
#include "promptpower/metrics.hpp"

namespace promptpower {

struct CvConfig {
  std::size_t folds = 5;
  std::size_t repeats = 5;
  std::uint64_t seed = 0;
  std::vector<Hyper> hyper_grid;  // empty: default_grid(family, columns)
  TargetTransform transform = TargetTransform::kLog;
  double mape_epsilon = kDefaultMapeEpsilon;
};

// Fold index of each of n rows for one repeat: rows are shuffled with
// SplitMix64(seed) and dealt round-robin, so fold sizes differ by at most
// one. Repeat r uses seed = base + r.
std::vector<std::size_t> fold_assignment(std::size_t n, std::size_t folds,
                                         std::uint64_t seed);

struct FoldResult {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  std::vector<std::size_t> test_rows;
  MetricsReport metrics;  // r2 is NaN for a constant test fold
};

struct GridScore {
  Hyper hyper;
  double mean_rmse = 0.0;
};

struct CvResult {
  Family family = Family::kLinear;
  Hyper best_hyper;
  MetricsReport report;  // means and sample SDs over the best hyper's folds
  std::vector<FoldResult> folds;
  std::vector<GridScore> grid;
};

// Throws InvalidValue for a bad config and TooFewRows when n < folds.
CvResult repeated_cv(const TrainingData& data, Family family,
                     const CvConfig& cfg);
// Applies training_filter before building features.
CvResult repeated_cv(const MeasurementSet& set, Family family,
                     const CvConfig& cfg, const FeatureContext& ctx);

struct TrainResult {
  TrainedEstimator model;
  CvResult cv;
};

// Grid search by repeated CV, then one fit of the best hyper on every row
// with seed cfg.seed.
TrainResult train_with_cv(const TrainingData& data, Family family,
                          const CvConfig& cfg);

struct HoldoutResult {
  MetricsReport metrics;  // point metrics; SDs are zero
  Hyper hyper;
  std::size_t train_rows = 0;
  std::vector<std::size_t> eval_rows;  // indices into the input data
  std::vector<double> actual;
  std::vector<double> predicted;
  TrainedEstimator model;  // fitted on the training rows
  std::vector<std::size_t> train_row_indices;
};

// Trains on rows whose group differs from `held_out` and evaluates on the
// rest. Throws UnknownModelId when no row carries that group.
HoldoutResult holdout_by_group(const TrainingData& data,
                               std::string_view held_out, Family family,
                               const CvConfig& cfg);
// Both the training and the evaluation records pass training_filter first.
HoldoutResult holdout_by_model(const MeasurementSet& set,
                               std::string_view held_out_model_id,
                               Family family, const CvConfig& cfg,
                               const FeatureContext& ctx);

}  // namespace promptpower
