// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptpower/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "promptpower/csv.hpp"
#include "promptpower/error.hpp"
#include "promptpower/estimate.hpp"

namespace promptpower {

std::vector<TradeoffPoint> pareto_frontier(std::span<const TradeoffPoint> points) {
  if (points.empty()) throw Error(ErrorCode::kEmptyInput, "no points");
  for (const TradeoffPoint& p : points) {
    if (p.benchmark != points.front().benchmark) {
      throw Error(ErrorCode::kMixedBenchmarks,
                  "'" + p.benchmark + "' and '" + points.front().benchmark +
                      "' in one frontier");
    }
    if (!std::isfinite(p.energy_wh) || !(p.energy_wh > 0.0) ||
        !std::isfinite(p.score)) {
      throw Error(ErrorCode::kInvalidValue,
                  p.model_id + ": energy must be > 0 and values finite");
    }
  }
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return points[a].energy_wh < points[b].energy_wh;
  });

  // Within one energy level only the top score can survive, and it does
  // so only if it beats every cheaper point.
  std::vector<TradeoffPoint> frontier;
  double best_cheaper = -std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < order.size();) {
    std::size_t end = g;
    double top = -std::numeric_limits<double>::infinity();
    while (end < order.size() &&
           points[order[end]].energy_wh == points[order[g]].energy_wh) {
      top = std::max(top, points[order[end]].score);
      ++end;
    }
    if (top > best_cheaper) {
      for (std::size_t i = g; i < end; ++i) {
        if (points[order[i]].score == top) frontier.push_back(points[order[i]]);
      }
    }
    best_cheaper = std::max(best_cheaper, top);
    g = end;
  }
  return frontier;
}

std::vector<ScoreRow> parse_scores_csv(std::string_view text) {
  const std::vector<std::string> rows = csv::lines(text);
  if (rows.empty() || rows.front() != kScoresCsvHeader) {
    throw Error(ErrorCode::kSchemaMismatch,
                "expected header '" + std::string(kScoresCsvHeader) + "'");
  }
  std::vector<ScoreRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].empty()) continue;
    const auto f = csv::split_line(rows[i]);
    if (f.size() != 3) {
      throw Error(ErrorCode::kParse,
                  "line " + std::to_string(i + 1) + ": expected 3 fields");
    }
    out.push_back({f[0], f[1], csv::parse_double(f[2], "score")});
  }
  if (out.empty()) throw Error(ErrorCode::kEmptyInput, "scores file has no rows");
  return out;
}

std::vector<ScoreRow> read_scores_csv(const std::filesystem::path& path) {
  return parse_scores_csv(csv::read_file(path.string()));
}

TradeoffReport tradeoff_report(std::span<const ScoreRow> scores,
                               const ArchitectureRegistry& archs,
                               const GpuCatalog& catalog,
                               const TrainedEstimator& estimator,
                               const ReferenceWorkload& workload) {
  if (scores.empty()) throw Error(ErrorCode::kEmptyInput, "no score rows");
  TradeoffReport report;
  report.workload = workload;
  report.estimator_id = estimator.artifact_id();
  const GpuSpec& gpu = catalog.lookup(workload.gpu_name);
  const std::uint64_t kv_tokens =
      static_cast<std::uint64_t>(workload.batch_size) * workload.shape.total_tokens();

  for (const ScoreRow& s : scores) {
    ReportRow row;
    row.model_id = s.model_id;
    row.score = s.score;
    try {
      const ArchitectureDescriptor& arch = archs.get(s.model_id);
      row.gpu_count = min_feasible_gpu_count(arch, gpu, kv_tokens, arch.precision,
                                             workload.memory_utilization);
      const HardwareConfig hw =
          make_hardware(gpu, row.gpu_count, workload.memory_utilization);
      row.energy_wh = estimate_prompt(arch, hw, workload.shape,
                                      workload.batch_size, estimator)
                          .wh_per_prompt;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUnknownModelId &&
          e.code() != ErrorCode::kInfeasible) {
        throw;
      }
      report.warnings.push_back("skipped " + s.model_id + " (" + s.benchmark +
                                "): " + e.what());
      continue;
    }
    auto it = std::find_if(report.tables.begin(), report.tables.end(),
                           [&](const BenchmarkTable& t) { return t.benchmark == s.benchmark; });
    if (it == report.tables.end()) {
      report.tables.push_back({s.benchmark, {}});
      it = report.tables.end() - 1;
    }
    it->rows.push_back(std::move(row));
  }

  for (BenchmarkTable& table : report.tables) {
    std::stable_sort(table.rows.begin(), table.rows.end(),
                     [](const ReportRow& a, const ReportRow& b) {
                       return a.energy_wh < b.energy_wh;
                     });
    std::vector<TradeoffPoint> points;
    for (const ReportRow& r : table.rows) {
      points.push_back({r.model_id, r.energy_wh, r.score, table.benchmark});
    }
    const auto frontier = pareto_frontier(points);
    for (ReportRow& r : table.rows) {
      r.on_frontier = std::any_of(frontier.begin(), frontier.end(),
                                  [&](const TradeoffPoint& p) {
                                    return p.model_id == r.model_id &&
                                           p.energy_wh == r.energy_wh &&
                                           p.score == r.score;
                                  });
    }
  }
  return report;
}

std::string render_markdown(const TradeoffReport& report) {
  const ReferenceWorkload& w = report.workload;
  std::ostringstream out;
  out << "# Energy vs. benchmark score\n\n"
      << "Reference workload: " << w.shape.input_tokens << " input tokens, "
      << w.shape.output_tokens << " output tokens, batch " << w.batch_size
      << ", " << w.gpu_name << ".\n"
      << "Estimator: " << report.estimator_id << "\n";
  for (const BenchmarkTable& t : report.tables) {
    out << "\n## " << t.benchmark << "\n\n"
        << "| model | GPUs | Wh/prompt | score | frontier |\n"
        << "|---|---:|---:|---:|:---:|\n";
    for (const ReportRow& r : t.rows) {
      out << "| " << r.model_id << " | " << r.gpu_count << " | "
          << csv::format_double(r.energy_wh) << " | "
          << csv::format_double(r.score) << " | "
          << (r.on_frontier ? "yes" : "") << " |\n";
    }
  }
  if (!report.warnings.empty()) {
    out << "\n## Warnings\n\n";
    for (const std::string& warning : report.warnings) out << "- " << warning << "\n";
  }
  return out.str();
}

std::string render_csv(const TradeoffReport& report) {
  std::ostringstream out;
  out << "benchmark,model_id,gpu_name,gpu_count,input_tokens,output_tokens,"
         "batch_size,energy_wh_per_prompt,score,on_frontier\n";
  const ReferenceWorkload& w = report.workload;
  for (const BenchmarkTable& t : report.tables) {
    for (const ReportRow& r : t.rows) {
      out << csv::join_line({t.benchmark, r.model_id, w.gpu_name,
                             std::to_string(r.gpu_count),
                             std::to_string(w.shape.input_tokens),
                             std::to_string(w.shape.output_tokens),
                             std::to_string(w.batch_size),
                             csv::format_double(r.energy_wh),
                             csv::format_double(r.score),
                             r.on_frontier ? "true" : "false"})
          << '\n';
    }
  }
  return out.str();
}

}  // namespace promptpower
