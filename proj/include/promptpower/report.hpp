// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

// Energy-versus-quality trade-offs: Pareto frontiers over externally
// supplied benchmark scores.

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "promptpower/arch.hpp"
#include "promptpower/dataset.hpp"
#include "promptpower/estimator.hpp"
#include "promptpower/hardware.hpp"

namespace promptpower {

struct TradeoffPoint {
  std::string model_id;
  double energy_wh = 0.0;
  double score = 0.0;  // higher is better
  std::string benchmark;

  friend bool operator==(const TradeoffPoint&, const TradeoffPoint&) = default;
};

// Non-dominated points sorted by ascending energy; points tied on both
// axes are all kept, in input order. Throws EmptyInput, MixedBenchmarks
// and InvalidValue (non-finite values or energy <= 0).
std::vector<TradeoffPoint> pareto_frontier(std::span<const TradeoffPoint> points);

struct ScoreRow {
  std::string model_id;
  std::string benchmark;
  double score = 0.0;
};

inline constexpr std::string_view kScoresCsvHeader = "model_id,benchmark,score";

// Throws SchemaMismatch for a wrong header and EmptyInput with no rows.
std::vector<ScoreRow> parse_scores_csv(std::string_view text);
std::vector<ScoreRow> read_scores_csv(const std::filesystem::path& path);

struct ReferenceWorkload {
  PromptShape shape{300, 300};
  std::uint32_t batch_size = 50;
  std::string gpu_name = "NVIDIA H100 80GB HBM3";
  double memory_utilization = kDefaultMemoryUtilization;
};

struct ReportRow {
  std::string model_id;
  std::uint32_t gpu_count = 0;
  double energy_wh = 0.0;
  double score = 0.0;
  bool on_frontier = false;
};

struct BenchmarkTable {
  std::string benchmark;
  std::vector<ReportRow> rows;  // ascending energy
};

struct TradeoffReport {
  ReferenceWorkload workload;
  std::string estimator_id;
  std::vector<BenchmarkTable> tables;  // first-appearance order
  std::vector<std::string> warnings;
};

// Each model runs on the fewest reference GPUs that hold its weights plus
// the KV cache of a full reference batch. Rows naming unknown fixtures or
// models that cannot be placed are skipped with a warning.
TradeoffReport tradeoff_report(std::span<const ScoreRow> scores,
                               const ArchitectureRegistry& archs,
                               const GpuCatalog& catalog,
                               const TrainedEstimator& estimator,
                               const ReferenceWorkload& workload = {});

std::string render_markdown(const TradeoffReport& report);
std::string render_csv(const TradeoffReport& report);

}  // namespace promptpower
