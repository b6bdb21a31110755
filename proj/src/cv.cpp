// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptpower/cv.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "promptpower/error.hpp"
#include "promptpower/rng.hpp"

namespace promptpower {
namespace {

void validate(const CvConfig& cfg) {
  if (cfg.folds < 2) throw Error(ErrorCode::kInvalidValue, "folds must be >= 2");
  if (cfg.repeats < 1) {
    throw Error(ErrorCode::kInvalidValue, "repeats must be >= 1");
  }
}

MetricsReport aggregate(const std::vector<FoldResult>& folds) {
  std::vector<double> rmse, r2, mae, mape;
  MetricsReport out;
  for (const FoldResult& f : folds) {
    rmse.push_back(f.metrics.rmse);
    mae.push_back(f.metrics.mae);
    if (!std::isnan(f.metrics.r2)) r2.push_back(f.metrics.r2);
    if (!std::isnan(f.metrics.mape_percent)) mape.push_back(f.metrics.mape_percent);
    out.excluded_mape_rows += f.metrics.excluded_mape_rows;
  }
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  out.rmse = mean(rmse);
  out.rmse_sd = sample_sd(rmse);
  out.mae = mean(mae);
  out.mae_sd = sample_sd(mae);
  out.r2 = r2.empty() ? kNaN : mean(r2);
  out.r2_sd = r2.empty() ? kNaN : sample_sd(r2);
  out.mape_percent = mape.empty() ? kNaN : mean(mape);
  out.mape_sd = mape.empty() ? kNaN : sample_sd(mape);
  return out;
}

std::vector<FoldResult> run_folds(const TrainingData& data, Family family,
                                  const Hyper& hyper, const CvConfig& cfg,
                                  const std::vector<std::vector<std::size_t>>& assignments) {
  std::vector<FoldResult> out;
  const std::size_t n = data.rows();
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    for (std::size_t k = 0; k < cfg.folds; ++k) {
      std::vector<std::size_t> train, test;
      for (std::size_t i = 0; i < n; ++i) {
        (assignments[r][i] == k ? test : train).push_back(i);
      }
      const TrainingData tr = data.subset(train);
      const TrainedEstimator model = fit(family, tr.x, tr.y, hyper, cfg.seed,
                                         FitOptions{cfg.transform, data.schema_version});
      std::vector<double> actual, predicted;
      for (std::size_t i : test) {
        actual.push_back(data.y[i]);
        predicted.push_back(model.predict(data.x.row(i)));
      }
      out.push_back({r, k, std::move(test),
                     compute_metrics_lenient(actual, predicted, cfg.mape_epsilon)});
    }
  }
  return out;
}

}  // namespace

std::vector<std::size_t> fold_assignment(std::size_t n, std::size_t folds,
                                         std::uint64_t seed) {
  if (folds < 1) throw Error(ErrorCode::kInvalidValue, "folds must be >= 1");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  SplitMix64 rng(seed);
  rng.shuffle(std::span<std::size_t>(perm));
  std::vector<std::size_t> fold(n);
  for (std::size_t i = 0; i < n; ++i) fold[perm[i]] = i % folds;
  return fold;
}

CvResult repeated_cv(const TrainingData& data, Family family,
                     const CvConfig& cfg) {
  validate(cfg);
  if (data.rows() < cfg.folds) {
    throw Error(ErrorCode::kTooFewRows,
                std::to_string(data.rows()) + " rows cannot fill " +
                    std::to_string(cfg.folds) + " folds");
  }
  std::vector<std::vector<std::size_t>> assignments;
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    assignments.push_back(fold_assignment(data.rows(), cfg.folds, cfg.seed + r));
  }
  const std::vector<Hyper> grid = cfg.hyper_grid.empty()
                                      ? default_grid(family, data.x.cols())
                                      : cfg.hyper_grid;
  CvResult result;
  result.family = family;
  bool have_best = false;
  double best_rmse = 0.0;
  for (const Hyper& h : grid) {
    std::vector<FoldResult> folds = run_folds(data, family, h, cfg, assignments);
    const MetricsReport report = aggregate(folds);
    result.grid.push_back({h, report.rmse});
    if (!have_best || report.rmse < best_rmse) {
      have_best = true;
      best_rmse = report.rmse;
      result.best_hyper = h;
      result.report = report;
      result.folds = std::move(folds);
    }
  }
  return result;
}

CvResult repeated_cv(const MeasurementSet& set, Family family,
                     const CvConfig& cfg, const FeatureContext& ctx) {
  return repeated_cv(build_training_data(training_filter(set).set, ctx), family,
                     cfg);
}

TrainResult train_with_cv(const TrainingData& data, Family family,
                          const CvConfig& cfg) {
  CvResult cv = repeated_cv(data, family, cfg);
  TrainedEstimator model = fit(family, data.x, data.y, cv.best_hyper, cfg.seed,
                               FitOptions{cfg.transform, data.schema_version});
  return {std::move(model), std::move(cv)};
}

HoldoutResult holdout_by_group(const TrainingData& data,
                               std::string_view held_out, Family family,
                               const CvConfig& cfg) {
  if (data.groups.size() != data.rows()) {
    throw Error(ErrorCode::kLengthMismatch, "every row needs a group label");
  }
  HoldoutResult out;
  std::vector<std::size_t> train;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    (data.groups[i] == held_out ? out.eval_rows : train).push_back(i);
  }
  if (out.eval_rows.empty()) {
    throw Error(ErrorCode::kUnknownModelId,
                "no rows for held-out model '" + std::string(held_out) + "'");
  }
  if (train.empty()) {
    throw Error(ErrorCode::kEmptyDataset,
                "nothing left to train on after holding out '" +
                    std::string(held_out) + "'");
  }
  TrainResult trained = train_with_cv(data.subset(train), family, cfg);
  out.hyper = trained.cv.best_hyper;
  out.train_rows = train.size();
  for (std::size_t i : out.eval_rows) {
    out.actual.push_back(data.y[i]);
    out.predicted.push_back(trained.model.predict(data.x.row(i)));
  }
  out.metrics = compute_metrics(out.actual, out.predicted, cfg.mape_epsilon);
  out.model = std::move(trained.model);
  out.train_row_indices = std::move(train);
  return out;
}

HoldoutResult holdout_by_model(const MeasurementSet& set,
                               std::string_view held_out_model_id,
                               Family family, const CvConfig& cfg,
                               const FeatureContext& ctx) {
  bool present = false;
  for (const MeasurementRecord& r : set.records) {
    present = present || r.model_id == held_out_model_id;
  }
  if (!present) {
    throw Error(ErrorCode::kUnknownModelId,
                "no records for '" + std::string(held_out_model_id) + "'");
  }
  const MeasurementSet filtered = training_filter(set).set;
  bool survives = false;
  for (const MeasurementRecord& r : filtered.records) {
    survives = survives || r.model_id == held_out_model_id;
  }
  if (!survives) {
    throw Error(ErrorCode::kEmptySelection,
                "every record of '" + std::string(held_out_model_id) +
                    "' has batch_size <= 5");
  }
  return holdout_by_group(build_training_data(filtered, ctx), held_out_model_id,
                          family, cfg);
}

}  // namespace promptpower
