// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <filesystem>

#include "promptpower/error.hpp"
#include "promptpower/estimator.hpp"
#include "promptpower/json_format.hpp"
#include "promptpower/rng.hpp"

namespace pp = promptpower;

namespace {

struct Xy {
  pp::FeatureMatrix x;
  std::vector<double> y;
};

// Positive targets with an interaction, so every family has work to do.
Xy smooth_data(std::uint64_t seed, std::size_t n, std::size_t p) {
  pp::SplitMix64 rng(seed);
  Xy d;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(p);
    for (double& v : row) v = rng.uniform01() * 4.0;
    d.x.append_row(row);
    d.y.push_back(std::exp(0.3 * row[0] + 0.1 * row[1] * row[p - 1]) +
                  0.05 * rng.uniform01());
  }
  return d;
}

pp::Hyper small_hyper(pp::Family f) {
  pp::Hyper h;
  switch (f) {
    case pp::Family::kRandomForest:
      h.trees = 20;
      h.mtry = 2;
      break;
    case pp::Family::kGbtTree:
      h.stages = 30;
      h.max_depth = 3;
      break;
    case pp::Family::kGbtLinear:
      h.stages = 20;
      break;
    case pp::Family::kCart:
      h.min_leaf = 3;
      break;
    default:
      break;
  }
  return h;
}

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v); }

}  // namespace

TEST(Linear, ExactRecovery) {
  pp::FeatureMatrix x;
  std::vector<double> y;
  for (int i = 0; i < 20; ++i) {
    x.append_row(std::vector<double>{static_cast<double>(i) * 0.7 - 3});
    y.push_back(2 * x(i, 0) + 1);
  }
  const auto m = pp::fit(pp::Family::kLinear, x, y, {}, 0,
                         {pp::TargetTransform::kIdentity, 1});
  ASSERT_EQ(m.raw_coefficients().size(), 1u);
  EXPECT_NEAR(m.raw_coefficients()[0], 2.0, 1e-9);
  EXPECT_NEAR(m.raw_intercept(), 1.0, 1e-9);
}

TEST(Linear, RankDeficientSuggestsElasticNet) {
  pp::FeatureMatrix x;
  std::vector<double> y;
  for (int i = 0; i < 10; ++i) {
    const double a = i;
    x.append_row(std::vector<double>{a, 2 * a + 1, 7.0});
    y.push_back(1 + a);
  }
  try {
    pp::fit(pp::Family::kLinear, x, y, {}, 0);
    FAIL();
  } catch (const pp::Error& e) {
    EXPECT_EQ(e.code(), pp::ErrorCode::kSingularDesign);
    EXPECT_NE(e.detail().find("elastic_net"), std::string::npos);
  }
  EXPECT_NO_THROW(pp::fit(pp::Family::kElasticNet, x, y, {}, 0));
}

TEST(ElasticNet, LargePenaltyGivesConstant) {
  const auto d = smooth_data(1, 60, 3);
  pp::Hyper h;
  h.alpha = 1.0;
  h.lambda = 1e6;
  const auto m = pp::fit(pp::Family::kElasticNet, d.x, d.y, h, 0);
  for (double c : m.raw_coefficients()) EXPECT_EQ(c, 0.0);
}

TEST(ElasticNet, TinyPenaltyApproachesLeastSquares) {
  const auto d = smooth_data(2, 80, 3);
  pp::Hyper h;
  h.lambda = 1e-10;
  const auto en = pp::fit(pp::Family::kElasticNet, d.x, d.y, h, 0);
  const auto ls = pp::fit(pp::Family::kLinear, d.x, d.y, {}, 0);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_NEAR(en.raw_coefficients()[j], ls.raw_coefficients()[j], 1e-5);
  }
}

TEST(Cart, FourRowExample) {
  pp::FeatureMatrix x;
  for (double v : {5.0, 8.0, 12.0, 15.0}) x.append_row(std::vector<double>{v});
  const std::vector<double> y{1, 1, 9, 9};
  const auto m = pp::fit(pp::Family::kCart, x, y, small_hyper(pp::Family::kCart), 0,
                         {pp::TargetTransform::kIdentity, 1});
  pp::Hyper h;
  h.min_leaf = 1;
  const auto m1 = pp::fit(pp::Family::kCart, x, y, h, 0,
                          {pp::TargetTransform::kIdentity, 1});
  ASSERT_EQ(m1.trees().size(), 1u);
  EXPECT_EQ(m1.trees()[0].nodes().size(), 3u);
  EXPECT_EQ(m1.trees()[0].nodes()[0].threshold, 10.0);
  EXPECT_EQ(m1.predict(x), y);
  // min_leaf 3 cannot split four rows.
  EXPECT_EQ(m.trees()[0].nodes().size(), 1u);
}

TEST(Cart, SingleLeafConstant) {
  pp::FeatureMatrix x;
  for (int i = 0; i < 5; ++i) x.append_row(std::vector<double>{double(i), 1.0});
  const std::vector<double> y(5, 0.5);
  const auto m = pp::fit(pp::Family::kCart, x, y, {}, 0,
                         {pp::TargetTransform::kIdentity, 1});
  pp::SplitMix64 rng(4);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(m.predict(std::vector<double>{rng.normal(), rng.normal()}), 0.5);
  }
}

TEST(Forest, DegenerateForestEqualsCart) {
  const auto d = smooth_data(3, 70, 4);
  pp::Hyper h;
  h.trees = 1;
  h.bootstrap = false;
  h.mtry = 4;
  h.min_leaf = 2;
  const auto rf = pp::fit(pp::Family::kRandomForest, d.x, d.y, h, 9);
  const auto cart = pp::fit(pp::Family::kCart, d.x, d.y, h, 9);
  EXPECT_EQ(rf.trees(), cart.trees());
  pp::SplitMix64 rng(5);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> v(4);
    for (double& e : v) e = rng.uniform01() * 4;
    EXPECT_EQ(bits(rf.predict(v)), bits(cart.predict(v)));
  }
}

TEST(Forest, PredictionIsMeanOfTrees) {
  const auto d = smooth_data(4, 90, 4);
  const auto rf = pp::fit(pp::Family::kRandomForest, d.x, d.y,
                          small_hyper(pp::Family::kRandomForest), 1,
                          {pp::TargetTransform::kIdentity, 1});
  for (std::size_t i = 0; i < 30; ++i) {
    const auto outs = rf.tree_outputs(d.x.row(i));
    ASSERT_EQ(outs.size(), 20u);
    double sum = 0;
    for (double o : outs) sum += o;
    EXPECT_NEAR(rf.predict(d.x.row(i)), sum / 20.0, 1e-12);
  }
}

TEST(Forest, MeanOfThreeStumps) {
  // A hand-written artifact: three single-leaf trees predicting 1, 2 and 3.
  nlohmann::json tree = {{"feature_index", {-1}}, {"threshold", {0.0}},
                         {"left", {-1}},         {"right", {-1}},
                         {"leaf_value", {1.0}}};
  nlohmann::json trees = nlohmann::json::array();
  for (double v : {1.0, 2.0, 3.0}) {
    tree["leaf_value"] = {v};
    trees.push_back(tree);
  }
  const auto d = smooth_data(5, 30, 2);
  auto j = pp::fit(pp::Family::kRandomForest, d.x, d.y,
                   small_hyper(pp::Family::kRandomForest), 0,
                   {pp::TargetTransform::kIdentity, 1})
               .to_json();
  j["parameters"]["trees"] = trees;
  j["hyper"]["trees"] = 3;
  const auto m = pp::TrainedEstimator::from_json(j);
  EXPECT_EQ(m.predict(std::vector<double>{0.3, 0.4}), 2.0);
}

TEST(Gbt, TreeBoostingFitsTrainingData) {
  const auto d = smooth_data(6, 120, 3);
  const auto gbt = pp::fit(pp::Family::kGbtTree, d.x, d.y,
                           small_hyper(pp::Family::kGbtTree), 0);
  const auto base = pp::fit(pp::Family::kLinear, d.x, d.y, {}, 0);
  double e_gbt = 0, e_lin = 0;
  for (std::size_t i = 0; i < d.y.size(); ++i) {
    e_gbt += std::pow(gbt.predict(d.x.row(i)) - d.y[i], 2);
    e_lin += std::pow(base.predict(d.x.row(i)) - d.y[i], 2);
  }
  EXPECT_LT(e_gbt, e_lin);
  EXPECT_EQ(gbt.trees().size(), 30u);
}

TEST(Gbt, LinearBoostingConvergesToRidge) {
  pp::FeatureMatrix x;
  std::vector<double> y;
  pp::SplitMix64 rng(7);
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> row{rng.uniform01(), rng.uniform01()};
    x.append_row(row);
    y.push_back(3 * row[0] - row[1] + 0.5);
  }
  pp::Hyper h;
  h.stages = 400;
  h.learning_rate = 0.5;
  h.ridge_lambda = 1e-6;
  const auto m = pp::fit(pp::Family::kGbtLinear, x, y, h, 0,
                         {pp::TargetTransform::kIdentity, 1});
  for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(m.predict(x.row(i)), y[i], 1e-6);
}

TEST(Hyper, Validation) {
  pp::Hyper h;
  h.alpha = 1.5;
  EXPECT_THROW(pp::validate_hyper(pp::Family::kElasticNet, h), pp::Error);
  h = {};
  h.max_depth = 0;
  EXPECT_THROW(pp::validate_hyper(pp::Family::kGbtTree, h), pp::Error);
  h = {};
  h.learning_rate = 0;
  EXPECT_THROW(pp::validate_hyper(pp::Family::kGbtLinear, h), pp::Error);
  h = {};
  h.trees = 0;
  try {
    pp::validate_hyper(pp::Family::kRandomForest, h);
    FAIL();
  } catch (const pp::Error& e) {
    EXPECT_EQ(e.code(), pp::ErrorCode::kInvalidHyper);
  }
}

TEST(Hyper, DefaultGrids) {
  EXPECT_EQ(pp::default_grid(pp::Family::kLinear, 27).size(), 1u);
  EXPECT_EQ(pp::default_grid(pp::Family::kElasticNet, 27).size(), 18u);
  EXPECT_EQ(pp::default_grid(pp::Family::kCart, 27).size(), 3u);
  const auto rf = pp::default_grid(pp::Family::kRandomForest, 27);
  ASSERT_EQ(rf.size(), 2u);
  EXPECT_EQ(rf[0].mtry, 9u);
  EXPECT_EQ(rf[1].mtry, 5u);
  EXPECT_EQ(pp::default_grid(pp::Family::kRandomForest, 1).size(), 1u);
  EXPECT_EQ(pp::default_grid(pp::Family::kGbtTree, 27).size(), 8u);
  EXPECT_EQ(pp::default_grid(pp::Family::kGbtLinear, 27).size(), 4u);
  for (pp::Family f : pp::kAllFamilies) {
    for (const auto& h : pp::default_grid(f, 27)) {
      EXPECT_NO_THROW(pp::validate_hyper(f, h));
      EXPECT_EQ(pp::hyper_from_json(f, pp::hyper_to_json(f, h)),
                pp::hyper_from_json(f, pp::hyper_to_json(f, h)));
    }
  }
}

TEST(Artifact, RoundTripBitwiseForEveryFamily) {
  const auto d = smooth_data(8, 100, 5);
  pp::SplitMix64 rng(99);
  std::vector<std::vector<double>> probes(100, std::vector<double>(5));
  for (auto& v : probes) {
    for (double& e : v) e = rng.uniform01() * 5 - 0.5;
  }
  const auto dir = std::filesystem::temp_directory_path() / "pp_artifact_test";
  std::filesystem::create_directories(dir);
  for (pp::Family f : pp::kAllFamilies) {
    const auto m = pp::fit(f, d.x, d.y, small_hyper(f), 13);
    const auto path = dir / (std::string(pp::to_string(f)) + ".json");
    m.save(path);
    const auto back = pp::TrainedEstimator::load(path);
    EXPECT_EQ(back, m) << pp::to_string(f);
    EXPECT_EQ(back.artifact_id(), m.artifact_id());
    for (const auto& v : probes) {
      ASSERT_EQ(bits(back.predict(v)), bits(m.predict(v))) << pp::to_string(f);
    }
  }
  std::filesystem::remove_all(dir);
}

TEST(Artifact, FitIsDeterministic) {
  const auto d = smooth_data(10, 80, 4);
  for (pp::Family f : pp::kAllFamilies) {
    const auto a = pp::fit(f, d.x, d.y, small_hyper(f), 21);
    const auto b = pp::fit(f, d.x, d.y, small_hyper(f), 21);
    EXPECT_EQ(pp::dump_json(a.to_json()), pp::dump_json(b.to_json()))
        << pp::to_string(f);
  }
}

TEST(Artifact, CorruptedDocumentsRejected) {
  const auto d = smooth_data(11, 40, 3);
  const auto good = pp::fit(pp::Family::kCart, d.x, d.y, {}, 0).to_json();
  auto wrong_version = good;
  wrong_version["format_version"] = 99;
  EXPECT_THROW(pp::TrainedEstimator::from_json(wrong_version), pp::Error);
  auto bad_tree = good;
  bad_tree["parameters"]["trees"][0]["left"][0] = 0;
  EXPECT_THROW(pp::TrainedEstimator::from_json(bad_tree), pp::Error);
  auto wide = good;
  wide["feature_count"] = 1;
  EXPECT_THROW(pp::TrainedEstimator::from_json(wide), pp::Error);
}

TEST(Predict, SchemaChecks) {
  const auto d = smooth_data(12, 40, 3);
  const auto m = pp::fit(pp::Family::kLinear, d.x, d.y, {}, 0);
  pp::FeatureVector fv{{1, 2, 3}, 2};
  EXPECT_THROW(m.predict(fv), pp::Error);
  fv.schema_version = 1;
  EXPECT_NO_THROW(m.predict(fv));
  try {
    m.predict(std::vector<double>{1, 2});
    FAIL();
  } catch (const pp::Error& e) {
    EXPECT_EQ(e.code(), pp::ErrorCode::kSchemaMismatch);
  }
}

TEST(Predict, LogTransformInverted) {
  pp::FeatureMatrix x;
  std::vector<double> y;
  for (int i = 0; i < 30; ++i) {
    x.append_row(std::vector<double>{double(i)});
    y.push_back(std::exp(0.1 * i - 1));
  }
  const auto m = pp::fit(pp::Family::kLinear, x, y, {}, 0);
  EXPECT_EQ(m.transform(), pp::TargetTransform::kLog);
  for (int i = 0; i < 30; ++i) EXPECT_NEAR(m.predict(x.row(i)) / y[i], 1.0, 1e-9);
  std::vector<double> bad = y;
  bad[3] = 0.0;
  EXPECT_THROW(pp::fit(pp::Family::kLinear, x, bad, {}, 0), pp::Error);
}
