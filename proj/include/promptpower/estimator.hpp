// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "promptpower/features.hpp"
#include "promptpower/matrix.hpp"
#include "promptpower/tree.hpp"

namespace promptpower {

enum class Family {
  kLinear,
  kElasticNet,
  kCart,
  kRandomForest,
  kGbtTree,
  kGbtLinear,
};

inline constexpr std::array<Family, 6> kAllFamilies = {
    Family::kLinear,       Family::kElasticNet, Family::kCart,
    Family::kRandomForest, Family::kGbtTree,    Family::kGbtLinear,
};

std::string_view to_string(Family f);
Family parse_family(std::string_view text);

enum class TargetTransform { kIdentity, kLog };
std::string_view to_string(TargetTransform t);
TargetTransform parse_transform(std::string_view text);

// Union of every family's knobs; each family reads only its own.
struct Hyper {
  // elastic_net: lambda * (alpha * |b|_1 + (1 - alpha) / 2 * |b|^2)
  double alpha = 0.5;
  double lambda = 1e-2;
  // trees
  std::size_t min_leaf = 1;
  std::size_t max_depth = 0;  // 0 = unlimited
  // random_forest
  std::size_t trees = 500;
  std::size_t mtry = 0;  // 0 = every feature
  bool bootstrap = true;
  // gbt_tree, gbt_linear
  std::size_t stages = 100;
  double learning_rate = 0.1;
  double ridge_lambda = 1.0;  // gbt_linear only

  friend bool operator==(const Hyper&, const Hyper&) = default;
};

// Throws InvalidHyper for out-of-range knobs of `family`.
void validate_hyper(Family family, const Hyper& hyper);
nlohmann::json hyper_to_json(Family family, const Hyper& hyper);
Hyper hyper_from_json(Family family, const nlohmann::json& j);
std::string describe_hyper(Family family, const Hyper& hyper);

// Grid searched by cross-validation for `family` on `feature_count`
// columns.
std::vector<Hyper> default_grid(Family family, std::size_t feature_count);

inline constexpr int kArtifactFormatVersion = 1;

struct FitOptions {
  TargetTransform transform = TargetTransform::kLog;
  int schema_version = kFeatureSchemaVersion;
};

// Immutable fitted model. Predictions are in Wh (the target transform is
// inverted) and are pure, so one instance may be shared across threads.
class TrainedEstimator {
 public:
  Family family() const { return family_; }
  int schema_version() const { return schema_version_; }
  std::size_t feature_count() const { return feature_count_; }
  std::uint64_t train_seed() const { return train_seed_; }
  TargetTransform transform() const { return transform_; }
  const Hyper& hyper() const { return hyper_; }

  // Throws SchemaMismatch on a schema version or length mismatch.
  double predict(const FeatureVector& x) const;
  double predict(std::span<const double> x) const;
  std::vector<double> predict(const FeatureMatrix& x) const;

  // Linear families: coefficients and intercept on the raw feature scale,
  // in the transformed target space.
  std::vector<double> raw_coefficients() const;
  double raw_intercept() const;

  const std::vector<RegressionTree>& trees() const { return trees_; }
  // Per-tree outputs; a forest predicts their mean.
  std::vector<double> tree_outputs(std::span<const double> x) const;

  nlohmann::json to_json() const;
  static TrainedEstimator from_json(const nlohmann::json& j);
  static TrainedEstimator load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  // FNV-1a hash of the serialized artifact, as 16 hex digits.
  const std::string& artifact_id() const { return id_; }

  friend bool operator==(const TrainedEstimator&,
                         const TrainedEstimator&) = default;

 private:
  friend TrainedEstimator fit(Family, const FeatureMatrix&,
                              std::span<const double>, const Hyper&,
                              std::uint64_t, const FitOptions&);

  double predict_transformed(std::span<const double> x) const;
  std::string compute_id() const;
  double standardized(std::span<const double> x, std::size_t j) const {
    return (x[j] - center_[j]) / scale_[j];
  }

  Family family_ = Family::kLinear;
  int schema_version_ = kFeatureSchemaVersion;
  std::size_t feature_count_ = 0;
  std::uint64_t train_seed_ = 0;
  TargetTransform transform_ = TargetTransform::kLog;
  Hyper hyper_;

  // linear, elastic_net, gbt_linear
  std::vector<double> center_;
  std::vector<double> scale_;
  std::vector<double> coef_;
  double intercept_ = 0.0;
  std::vector<double> stage_intercepts_;
  std::vector<std::vector<double>> stage_coefs_;

  // cart, random_forest, gbt_tree
  std::vector<RegressionTree> trees_;
  double base_ = 0.0;
  double shrinkage_ = 1.0;
  std::string id_;
};

// Throws TooFewRows (< 2 rows), LengthMismatch, InvalidValue (non-finite y,
// or y <= 0 under the log transform), InvalidHyper, and SingularDesign for
// the linear family on a rank-deficient design.
TrainedEstimator fit(Family family, const FeatureMatrix& x,
                     std::span<const double> y, const Hyper& hyper,
                     std::uint64_t seed, const FitOptions& options = {});

inline TrainedEstimator fit(Family family, const TrainingData& data,
                            const Hyper& hyper, std::uint64_t seed,
                            TargetTransform transform = TargetTransform::kLog) {
  return fit(family, data.x, data.y, hyper, seed,
             FitOptions{transform, data.schema_version});
}

}  // namespace promptpower
