// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <functional>

#include "promptpower/error.hpp"
#include "promptpower/estimate.hpp"
#include "promptpower/rng.hpp"
#include "test_support.hpp"

namespace pp = promptpower;
using testing_support::archs;
using testing_support::catalog;

namespace {

pp::HardwareConfig h100(std::uint32_t n = 1) {
  return pp::make_hardware(catalog().lookup("NVIDIA H100 80GB HBM3"), n);
}

// A model whose output depends on the shape, so summation is visible.
const pp::TrainedEstimator& shape_model() {
  static const pp::TrainedEstimator m = [] {
    pp::FeatureMatrix x;
    std::vector<double> y;
    const auto& arch = archs().get("meta-llama/Llama-3.1-8B");
    for (std::uint32_t in : {50u, 200u, 800u}) {
      for (std::uint32_t out : {50u, 200u, 800u}) {
        for (std::uint32_t b : {1u, 4u, 16u, 64u}) {
          x.append_row(pp::assemble(arch, h100(), {{in, out}, b, false}).values);
          y.push_back(testing_support::synthetic_energy(8, in, out, b, 1));
        }
      }
    }
    pp::Hyper h;
    h.trees = 25;
    return pp::fit(pp::Family::kRandomForest, x, y, h, 3);
  }();
  return m;
}

pp::ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const pp::Error& e) {
    return e.code();
  }
  return pp::ErrorCode::kIo;
}

}  // namespace

TEST(EstimatePrompt, StubConstant) {
  const auto stub = testing_support::constant_estimator(0.5);
  const auto e = pp::estimate_prompt(archs().get("facebook/opt-30b"), h100(), {300, 300},
                                     50, stub);
  EXPECT_EQ(e.wh_per_prompt, 0.5);
  EXPECT_EQ(e.wh_total, 25.0);
  EXPECT_EQ(e.batch_size, 50u);
  EXPECT_EQ(e.estimator_id, stub.artifact_id());
  EXPECT_EQ(e.gpu_name, "NVIDIA H100 80GB HBM3");
}

TEST(EstimatePrompt, ErrorPaths) {
  const auto stub = testing_support::constant_estimator(0.5);
  const auto& arch = archs().get("facebook/opt-30b");
  EXPECT_EQ(code_of([&] { pp::estimate_prompt(arch, h100(), {1, 1}, 0, stub); }),
            pp::ErrorCode::kInvalidBatch);
  EXPECT_EQ(code_of([&] { pp::estimate_prompt(arch, h100(), {0, 1}, 1, stub); }),
            pp::ErrorCode::kInvalidShape);
  EXPECT_EQ(code_of([&] {
              pp::estimate_prompt(archs().get("meta-llama/Llama-3.1-405B"), h100(),
                                  {1, 1}, 1, stub);
            }),
            pp::ErrorCode::kPlacementInfeasible);
  try {
    pp::estimate_prompt(archs(), "acme/unknown", h100(), {1, 1}, 1, stub);
    FAIL();
  } catch (const pp::Error& e) {
    EXPECT_EQ(e.code(), pp::ErrorCode::kUnknownModelId);
    EXPECT_NE(e.detail().find("microsoft/phi-4"), std::string::npos);
  }
}

TEST(EstimatePrompt, RepeatedCallsBitwiseEqual) {
  const auto& arch = archs().get("meta-llama/Llama-3.1-8B");
  const auto a = pp::estimate_prompt(arch, h100(), {123, 456}, 7, shape_model());
  const auto b = pp::estimate_prompt(arch, h100(), {123, 456}, 7, shape_model());
  EXPECT_EQ(std::bit_cast<std::uint64_t>(a.wh_per_prompt),
            std::bit_cast<std::uint64_t>(b.wh_per_prompt));
}

TEST(MixedBatch, SinglePromptEqualsEstimatePrompt) {
  const auto& arch = archs().get("meta-llama/Llama-3.1-8B");
  const std::vector<pp::PromptShape> one{{300, 120}};
  const auto mixed = pp::estimate_mixed_batch(one, arch, h100(), shape_model());
  const auto single = pp::estimate_prompt(arch, h100(), {300, 120}, 1, shape_model());
  EXPECT_EQ(mixed.wh_total, single.wh_total);
  EXPECT_EQ(mixed.wh_per_prompt, single.wh_per_prompt);
}

TEST(MixedBatch, CopiesSumExactly) {
  const auto& arch = archs().get("meta-llama/Llama-3.1-8B");
  for (std::uint32_t k : {2u, 3u, 7u, 50u}) {
    const std::vector<pp::PromptShape> copies(k, pp::PromptShape{640, 77});
    const auto mixed = pp::estimate_mixed_batch(copies, arch, h100(), shape_model());
    const auto single = pp::estimate_prompt(arch, h100(), {640, 77}, k, shape_model());
    EXPECT_EQ(mixed.wh_total, static_cast<double>(k) * single.wh_per_prompt) << k;
    EXPECT_EQ(mixed.per_prompt_wh.size(), k);
  }
}

TEST(MixedBatch, TotalIsSumOfPerPromptPredictions) {
  const auto& arch = archs().get("meta-llama/Llama-3.1-8B");
  const std::vector<pp::PromptShape> prompts{{50, 800}, {800, 50}, {200, 200}, {50, 800}};
  const auto mixed = pp::estimate_mixed_batch(prompts, arch, h100(), shape_model());
  double sum = 0;
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    const auto e = pp::estimate_prompt(arch, h100(), prompts[i], 4, shape_model());
    EXPECT_EQ(mixed.per_prompt_wh[i], e.wh_per_prompt);
    sum += e.wh_per_prompt;
  }
  EXPECT_NEAR(mixed.wh_total, sum, 1e-15 * sum);
  EXPECT_EQ(code_of([&] {
              pp::estimate_mixed_batch({}, arch, h100(), shape_model());
            }),
            pp::ErrorCode::kEmptyBatch);
}

TEST(Tokens, CharacterHeuristic) {
  EXPECT_EQ(pp::estimate_tokens_from_text(""), 0u);
  EXPECT_EQ(pp::estimate_tokens_from_text(std::string(400, 'a')), 100u);
  EXPECT_EQ(pp::estimate_tokens_from_text(std::string(401, 'a')), 101u);
  // Four two-byte code points count as four characters.
  EXPECT_EQ(pp::estimate_tokens_from_text("\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9"), 1u);
  EXPECT_EQ(pp::estimate_tokens_from_text("abcdef", 2.0), 3u);
  EXPECT_EQ(code_of([] { pp::estimate_tokens_from_text("x", 0.0); }),
            pp::ErrorCode::kInvalidFactor);
}

TEST(Tokens, MonotoneInLength) {
  std::uint64_t previous = 0;
  std::string text;
  for (int i = 0; i < 300; ++i) {
    text += (i % 5 == 0) ? "\xE2\x82\xAC" : "x";
    const auto t = pp::estimate_tokens_from_text(text, 3.5);
    EXPECT_GE(t, previous);
    previous = t;
  }
}

TEST(Co2, Examples) {
  EXPECT_EQ(pp::co2_from_energy(1000, 400).grams_co2e, 400.0);
  EXPECT_EQ(pp::co2_from_energy(0, 123.4).grams_co2e, 0.0);
  EXPECT_EQ(pp::co2_from_energy(0.3, 250).grams_co2e, 0.075);
  EXPECT_EQ(pp::co2_from_energy(2, 475).grid_intensity, 475.0);
  EXPECT_EQ(code_of([] { pp::co2_from_energy(-1, 400); }), pp::ErrorCode::kNegativeInput);
  EXPECT_EQ(code_of([] { pp::co2_from_energy(1, -400); }), pp::ErrorCode::kNegativeInput);
}

TEST(Co2, LinearInBothArguments) {
  pp::SplitMix64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const double wh = rng.uniform01() * 100, k = rng.uniform01() * 10;
    const double g = rng.uniform01() * 900;
    const double base = pp::co2_from_energy(wh, g).grams_co2e;
    EXPECT_NEAR(pp::co2_from_energy(k * wh, g).grams_co2e, k * base,
                1e-12 * std::max(1.0, k * base));
    EXPECT_NEAR(pp::co2_from_energy(wh, k * g).grams_co2e, k * base,
                1e-12 * std::max(1.0, k * base));
  }
}

TEST(Insights, Examples) {
  EXPECT_EQ(pp::insights(10, 0).lightbulb_minutes, 60.0);
  EXPECT_EQ(pp::insights(0.3, 0).lightbulb_minutes, 1.8);
  EXPECT_EQ(pp::insights(0, 90).flight_km, 1.0);
  EXPECT_EQ(pp::insights(10, 0).tv_minutes, 6.0);
  pp::InsightFactors f{20, 50, 45};
  const auto r = pp::insights(1, 1, f);
  EXPECT_EQ(r.factors_used, f);
  f.tv_watts = 0;
  EXPECT_EQ(code_of([&] { pp::insights(1, 1, f); }), pp::ErrorCode::kInvalidFactor);
  EXPECT_EQ(code_of([] { pp::insights(-1, 1); }), pp::ErrorCode::kNegativeInput);
}

TEST(Platforms, BundledMappings) {
  const auto maps = pp::load_platform_mappings(testing_support::data_dir() / "platforms.json");
  const auto& ds = pp::map_platform("DeepSeek", maps);
  EXPECT_EQ(ds.proxy_model_id, "deepseek-ai/DeepSeek-V3");
  EXPECT_EQ(ds.gpu_name, "NVIDIA A100-SXM4-80GB");
  EXPECT_EQ(ds.gpu_count, 32u);
  EXPECT_TRUE(archs().contains(pp::map_platform("chatgpt", maps).proxy_model_id));
  EXPECT_NO_THROW(pp::check_platform_mappings(maps, archs(), catalog()));
  try {
    pp::map_platform("unknownsite", maps);
    FAIL();
  } catch (const pp::Error& e) {
    EXPECT_EQ(e.code(), pp::ErrorCode::kUnknownPlatform);
    EXPECT_NE(e.detail().find("deepseek"), std::string::npos);
  }
}

TEST(Platforms, ConfigValidation) {
  const nlohmann::json dup = nlohmann::json::array(
      {{{"platform", "a"}, {"proxy_model_id", "facebook/opt-30b"},
        {"gpu_name", "NVIDIA L4"}, {"gpu_count", 1}},
       {{"platform", "A"}, {"proxy_model_id", "facebook/opt-30b"},
        {"gpu_name", "NVIDIA L4"}, {"gpu_count", 1}}});
  EXPECT_THROW(pp::platform_mappings_from_json(dup), pp::Error);
  const nlohmann::json missing = nlohmann::json::array(
      {{{"platform", "a"}, {"proxy_model_id", "nobody/none"},
        {"gpu_name", "NVIDIA L4"}, {"gpu_count", 1}}});
  const auto maps = pp::platform_mappings_from_json(missing);
  EXPECT_EQ(code_of([&] { pp::check_platform_mappings(maps, archs(), catalog()); }),
            pp::ErrorCode::kUnknownModelId);
}
