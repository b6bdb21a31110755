// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "promptpower/error.hpp"
#include "promptpower/report.hpp"
#include "promptpower/rng.hpp"
#include "test_support.hpp"

namespace pp = promptpower;

namespace {

std::vector<pp::TradeoffPoint> random_points(pp::SplitMix64& rng, std::size_t n) {
  std::vector<pp::TradeoffPoint> pts;
  for (std::size_t i = 0; i < n; ++i) {
    // Small integer grids force ties on either axis.
    pts.push_back({"m" + std::to_string(i), 1.0 + static_cast<double>(rng.uniform_index(12)),
                   static_cast<double>(rng.uniform_index(12)), "b"});
  }
  return pts;
}

}  // namespace

TEST(Pareto, PhiBeatsLargerModel) {
  const std::vector<pp::TradeoffPoint> pts{{"microsoft/phi-4", 0.0172, 80, "b"},
                                           {"Qwen/Qwen2.5-72B", 0.0870, 75, "b"}};
  const auto f = pp::pareto_frontier(pts);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].model_id, "microsoft/phi-4");
}

TEST(Pareto, MatchesDominanceScan) {
  pp::SplitMix64 rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const auto pts = random_points(rng, 1 + rng.uniform_index(60));
    std::vector<oracle::Point> plain;
    for (const auto& p : pts) plain.push_back({p.energy_wh, p.score});
    const auto expect = oracle::frontier(plain);
    const auto got = pp::pareto_frontier(pts);
    ASSERT_EQ(got.size(), expect.size()) << trial;
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i], pts[expect[i]]);
  }
}

TEST(Pareto, ExactTiesAllKept) {
  const std::vector<pp::TradeoffPoint> pts{
      {"a", 1, 5, "b"}, {"b", 1, 5, "b"}, {"c", 1, 4, "b"}, {"d", 2, 5, "b"}};
  const auto f = pp::pareto_frontier(pts);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[0].model_id, "a");
  EXPECT_EQ(f[1].model_id, "b");
}

TEST(Pareto, Errors) {
  const auto code = [](std::vector<pp::TradeoffPoint> pts) {
    try {
      pp::pareto_frontier(pts);
    } catch (const pp::Error& e) {
      return e.code();
    }
    return pp::ErrorCode::kIo;
  };
  EXPECT_EQ(code({}), pp::ErrorCode::kEmptyInput);
  EXPECT_EQ(code({{"a", 1, 1, "x"}, {"b", 2, 2, "y"}}), pp::ErrorCode::kMixedBenchmarks);
  EXPECT_EQ(code({{"a", 0, 1, "x"}}), pp::ErrorCode::kInvalidValue);
  EXPECT_EQ(code({{"a", 1, NAN, "x"}}), pp::ErrorCode::kInvalidValue);
}

TEST(Scores, ParseCsv) {
  const auto rows = pp::parse_scores_csv("model_id,benchmark,score\na/b,mmlu,71.5\nc/d,mmlu,60\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].model_id, "a/b");
  EXPECT_EQ(rows[0].score, 71.5);
  EXPECT_THROW(pp::parse_scores_csv("model,score\nx,1\n"), pp::Error);
  EXPECT_THROW(pp::parse_scores_csv("model_id,benchmark,score\n"), pp::Error);
}

TEST(Tradeoff, ReportWithBundledScores) {
  auto scores = pp::read_scores_csv(testing_support::data_dir() / "example_scores.csv");
  scores.push_back({"nobody/none", "example-benchmark", 99});
  const auto model = testing_support::constant_estimator(0.02);
  const auto report = pp::tradeoff_report(scores, testing_support::archs(),
                                          testing_support::catalog(), model);
  ASSERT_EQ(report.tables.size(), 1u);
  ASSERT_EQ(report.warnings.size(), 1u);
  EXPECT_NE(report.warnings[0].find("nobody/none"), std::string::npos);
  const auto& rows = report.tables[0].rows;
  EXPECT_EQ(rows.size(), scores.size() - 1);
  // Every row costs 0.02 Wh, so only the best score is on the frontier.
  std::size_t on = 0;
  for (const auto& r : rows) {
    EXPECT_EQ(r.energy_wh, 0.02);
    EXPECT_GE(r.gpu_count, 1u);
    on += r.on_frontier ? 1 : 0;
  }
  EXPECT_EQ(on, 1u);
  const std::string md = pp::render_markdown(report);
  EXPECT_NE(md.find("| microsoft/phi-4 |"), std::string::npos);
  EXPECT_NE(md.find("Warnings"), std::string::npos);
  const std::string csv = pp::render_csv(report);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'),
            static_cast<long>(rows.size() + 1));
}
