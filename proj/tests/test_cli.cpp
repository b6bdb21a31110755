// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "promptpower/cv.hpp"
#include "promptpower/metrics.hpp"
#include "test_support.hpp"

namespace pp = promptpower;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run_cli(const std::string& args) {
  const std::string cmd = std::string(PROMPTPOWER_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string seed_csv() { return (testing_support::data_dir() / "seed_measurements.csv").string(); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / "pp_cli_test";
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, TrainTwiceGivesIdenticalArtifacts) {
  const auto a = dir_ / "a.json", b = dir_ / "b.json";
  ASSERT_EQ(run_cli("train --family cart --data " + seed_csv() + " --out " + a.string()).status, 0);
  ASSERT_EQ(run_cli("train --family cart --data " + seed_csv() + " --out " + b.string()).status, 0);
  const std::string first = slurp(a);
  EXPECT_FALSE(first.empty());
  EXPECT_EQ(first, slurp(b));

  const auto predicted = run_cli("predict --model-id facebook/opt-30b --gpu \"NVIDIA A100-SXM4-80GB\""
                                 " --input-tokens 100 --output-tokens 900 --batch-size 64"
                                 " --artifact " + a.string());
  ASSERT_EQ(predicted.status, 0);
  EXPECT_NE(predicted.out.find("\"wh_per_prompt\""), std::string::npos);

  EXPECT_EQ(run_cli("predict --model-id acme/none --input-tokens 1 --output-tokens 1"
                    " --artifact " + a.string())
                .status,
            1);
}

TEST_F(CliTest, EvalRowMatchesLibrary) {
  const auto r = run_cli("eval --family cart --data " + seed_csv());
  ASSERT_EQ(r.status, 0);
  std::istringstream lines(r.out);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  EXPECT_EQ(header, pp::kMetricsCsvHeader);
  const auto [label, parsed] = pp::parse_metrics_csv_row(row);
  EXPECT_EQ(label, "cart");

  const auto data = pp::build_training_data(
      pp::training_filter(testing_support::seed_set()).set, testing_support::context());
  pp::CvConfig cfg;
  cfg.seed = 42;
  const auto lib = pp::repeated_cv(data, pp::Family::kCart, cfg);
  EXPECT_EQ(parsed, lib.report);
}

TEST_F(CliTest, HoldoutPrintsPointMetrics) {
  const auto r = run_cli("holdout --family cart --model-id facebook/opt-30b --data " + seed_csv());
  ASSERT_EQ(r.status, 0);
  std::istringstream lines(r.out);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  EXPECT_EQ(header, pp::kHoldoutCsvHeader);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 4);
  EXPECT_EQ(row.rfind("cart,", 0), 0u);
}

TEST_F(CliTest, InsightsAndUsageErrors) {
  const auto r = run_cli("insights --wh 10 --intensity 400");
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("\"lightbulb_minutes\":60"), std::string::npos);
  EXPECT_EQ(run_cli("predict --no-such-flag").status, 2);
  EXPECT_EQ(run_cli("").status, 2);
  EXPECT_EQ(run_cli("insights --wh -1").status, 1);
}
