// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

// Energy measurements: per-prompt allocation, CSV ingestion and export,
// summaries, and workload grids.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "promptpower/precision.hpp"

namespace promptpower {

struct PromptShape {
  std::uint32_t input_tokens = 1;
  std::uint32_t output_tokens = 1;

  std::uint64_t total_tokens() const {
    return static_cast<std::uint64_t>(input_tokens) + output_tokens;
  }
  friend bool operator==(const PromptShape&, const PromptShape&) = default;
};

enum class Source { kPaperTable, kPaperText, kSynthetic, kUser };
std::string_view to_string(Source s);
Source parse_source(std::string_view text);

struct MeasurementRecord {
  std::string model_id;
  std::string gpu_name;
  std::uint32_t gpu_count = 1;
  PromptShape shape;
  std::uint32_t batch_size = 1;
  bool eager_mode = false;
  Precision precision = Precision::kBf16;
  double energy_wh_per_prompt = 0.0;
  Source source = Source::kUser;

  friend bool operator==(const MeasurementRecord&,
                         const MeasurementRecord&) = default;
};

// Throws InvalidValue when a record breaks its invariants.
void validate(const MeasurementRecord& r);

inline constexpr int kMeasurementSchemaVersion = 1;

struct MeasurementSet {
  std::vector<MeasurementRecord> records;
  int schema_version = kMeasurementSchemaVersion;

  friend bool operator==(const MeasurementSet&, const MeasurementSet&) = default;
};

// Appends a record; throws InvalidValue on a duplicate key.
void add_record(MeasurementSet& set, MeasurementRecord record);

// Energy of one prompt in a batch of equally shaped prompts.
double allocate_per_prompt(double batch_energy_wh, std::uint32_t batch_size);

inline constexpr std::string_view kMeasurementCsvHeader =
    "model_id,gpu_name,gpu_count,input_tokens,output_tokens,batch_size,"
    "eager_mode,precision,energy_wh_per_prompt,source";

struct RejectedRow {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string reason;
};

struct IngestResult {
  MeasurementSet set;
  std::vector<RejectedRow> rejected;
};

// Throws SchemaMismatch on a wrong header and EmptyDataset when no row
// survives validation.
IngestResult ingest_csv(const std::filesystem::path& path);
IngestResult ingest_csv_text(std::string_view text);

void export_csv(const MeasurementSet& set, std::ostream& out);
std::string export_csv(const MeasurementSet& set);

struct Summary {
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

// Linear-interpolation (type 7) quantile of an ascending-sorted range.
double quantile_sorted(std::span<const double> sorted, double p);

Summary summarize_values(std::span<const double> values);
// Summary of energy_wh_per_prompt over the records accepted by `filter`.
// Throws EmptySelection when nothing matches.
Summary summarize(const MeasurementSet& set,
                  const std::function<bool(const MeasurementRecord&)>& filter);

struct WorkloadSpec {
  PromptShape shape;
  std::uint32_t batch_size = 1;

  friend bool operator==(const WorkloadSpec&, const WorkloadSpec&) = default;
};

struct GridOptions {
  std::uint32_t token_cap = 1000;
  bool long_context = false;  // lifts token_cap
};

// Shapes-major Cartesian product. Throws EmptyGrid for empty inputs and
// InvalidShape for zero tokens, zero batches or capped token counts.
std::vector<WorkloadSpec> grid_expand(std::span<const PromptShape> shapes,
                                      std::span<const std::uint32_t> batch_sizes,
                                      const GridOptions& options = {});

}  // namespace promptpower
