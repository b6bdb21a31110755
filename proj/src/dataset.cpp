// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptpower/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "promptpower/csv.hpp"
#include "promptpower/error.hpp"

namespace promptpower {
namespace {

auto record_key(const MeasurementRecord& r) {
  return std::make_tuple(r.model_id, r.gpu_name, r.gpu_count,
                         r.shape.input_tokens, r.shape.output_tokens,
                         r.batch_size, r.eager_mode, r.precision, r.source);
}

constexpr std::size_t kColumns = 10;

std::uint32_t positive_u32(std::string_view text, std::string_view what) {
  const long long v = csv::parse_integer(text, what);
  if (v < 1 || v > 0xFFFFFFFFLL) {
    throw Error(ErrorCode::kInvalidValue,
                std::string(what) + " must be a positive integer");
  }
  return static_cast<std::uint32_t>(v);
}

MeasurementRecord parse_row(const std::vector<std::string>& f) {
  if (f.size() != kColumns) {
    throw Error(ErrorCode::kParse, "expected " + std::to_string(kColumns) +
                                       " fields, got " +
                                       std::to_string(f.size()));
  }
  MeasurementRecord r;
  r.model_id = f[0];
  r.gpu_name = f[1];
  r.gpu_count = positive_u32(f[2], "gpu_count");
  r.shape.input_tokens = positive_u32(f[3], "input_tokens");
  r.shape.output_tokens = positive_u32(f[4], "output_tokens");
  r.batch_size = positive_u32(f[5], "batch_size");
  r.eager_mode = csv::parse_bool(f[6], "eager_mode");
  r.precision = parse_precision(f[7]);
  r.energy_wh_per_prompt = csv::parse_double(f[8], "energy_wh_per_prompt");
  r.source = parse_source(f[9]);
  validate(r);
  return r;
}

}  // namespace

std::string_view to_string(Source s) {
  switch (s) {
    case Source::kPaperTable: return "paper_table";
    case Source::kPaperText: return "paper_text";
    case Source::kSynthetic: return "synthetic";
    case Source::kUser: return "user";
  }
  return "?";
}

Source parse_source(std::string_view text) {
  for (Source s : {Source::kPaperTable, Source::kPaperText, Source::kSynthetic,
                   Source::kUser}) {
    if (text == to_string(s)) return s;
  }
  throw Error(ErrorCode::kParse, "unknown source '" + std::string(text) + "'");
}

void validate(const MeasurementRecord& r) {
  if (r.model_id.empty()) {
    throw Error(ErrorCode::kInvalidValue, "model_id is empty");
  }
  if (r.gpu_name.empty()) {
    throw Error(ErrorCode::kInvalidValue, "gpu_name is empty");
  }
  if (r.gpu_count < 1 || r.batch_size < 1 || r.shape.input_tokens < 1 ||
      r.shape.output_tokens < 1) {
    throw Error(ErrorCode::kInvalidValue,
                "counts and token lengths must be >= 1");
  }
  if (!std::isfinite(r.energy_wh_per_prompt) || r.energy_wh_per_prompt <= 0.0) {
    throw Error(ErrorCode::kInvalidValue,
                "energy_wh_per_prompt must be finite and > 0");
  }
}

void add_record(MeasurementSet& set, MeasurementRecord record) {
  validate(record);
  const auto key = record_key(record);
  for (const MeasurementRecord& r : set.records) {
    if (record_key(r) == key) {
      throw Error(ErrorCode::kInvalidValue,
                  "duplicate measurement for " + record.model_id);
    }
  }
  set.records.push_back(std::move(record));
}

double allocate_per_prompt(double batch_energy_wh, std::uint32_t batch_size) {
  if (batch_size == 0) {
    throw Error(ErrorCode::kInvalidBatch, "batch size must be >= 1");
  }
  if (!std::isfinite(batch_energy_wh) || batch_energy_wh <= 0.0) {
    throw Error(ErrorCode::kInvalidBatch,
                "batch energy must be finite and > 0");
  }
  return batch_energy_wh / static_cast<double>(batch_size);
}

IngestResult ingest_csv(const std::filesystem::path& path) {
  return ingest_csv_text(csv::read_file(path.string()));
}

IngestResult ingest_csv_text(std::string_view text) {
  const std::vector<std::string> rows = csv::lines(text);
  if (rows.empty() || rows.front() != kMeasurementCsvHeader) {
    throw Error(ErrorCode::kSchemaMismatch,
                "expected header '" + std::string(kMeasurementCsvHeader) + "'");
  }
  IngestResult out;
  std::set<decltype(record_key(MeasurementRecord{}))> seen;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].empty()) continue;
    const std::size_t line = i + 1;
    try {
      MeasurementRecord r = parse_row(csv::split_line(rows[i]));
      if (!seen.insert(record_key(r)).second) {
        out.rejected.push_back({line, "duplicate measurement key"});
        continue;
      }
      out.set.records.push_back(std::move(r));
    } catch (const Error& e) {
      out.rejected.push_back({line, e.what()});
    }
  }
  if (out.set.records.empty()) {
    throw Error(ErrorCode::kEmptyDataset,
                "no valid rows (" + std::to_string(out.rejected.size()) +
                    " rejected)");
  }
  return out;
}

void export_csv(const MeasurementSet& set, std::ostream& out) {
  out << kMeasurementCsvHeader << '\n';
  for (const MeasurementRecord& r : set.records) {
    out << csv::join_line({r.model_id, r.gpu_name, std::to_string(r.gpu_count),
                           std::to_string(r.shape.input_tokens),
                           std::to_string(r.shape.output_tokens),
                           std::to_string(r.batch_size),
                           r.eager_mode ? "true" : "false",
                           std::string(to_string(r.precision)),
                           csv::format_double(r.energy_wh_per_prompt),
                           std::string(to_string(r.source))})
        << '\n';
  }
}

std::string export_csv(const MeasurementSet& set) {
  std::ostringstream ss;
  export_csv(set, ss);
  return ss.str();
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorCode::kEmptySelection, "no values");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Summary summarize_values(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptySelection, "no values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  Summary s;
  s.count = sorted.size();
  s.median = quantile_sorted(sorted, 0.5);
  s.q25 = quantile_sorted(sorted, 0.25);
  s.q75 = quantile_sorted(sorted, 0.75);
  s.max = sorted.back();
  return s;
}

Summary summarize(const MeasurementSet& set,
                  const std::function<bool(const MeasurementRecord&)>& filter) {
  std::vector<double> values;
  for (const MeasurementRecord& r : set.records) {
    if (filter(r)) values.push_back(r.energy_wh_per_prompt);
  }
  if (values.empty()) {
    throw Error(ErrorCode::kEmptySelection, "filter matched no records");
  }
  return summarize_values(values);
}

std::vector<WorkloadSpec> grid_expand(std::span<const PromptShape> shapes,
                                      std::span<const std::uint32_t> batch_sizes,
                                      const GridOptions& options) {
  if (shapes.empty() || batch_sizes.empty()) {
    throw Error(ErrorCode::kEmptyGrid, "shapes and batch sizes must be non-empty");
  }
  for (const PromptShape& s : shapes) {
    if (s.input_tokens < 1 || s.output_tokens < 1) {
      throw Error(ErrorCode::kInvalidShape, "token counts must be >= 1");
    }
    if (!options.long_context && (s.input_tokens > options.token_cap ||
                                  s.output_tokens > options.token_cap)) {
      throw Error(ErrorCode::kInvalidShape,
                  "shape (" + std::to_string(s.input_tokens) + ", " +
                      std::to_string(s.output_tokens) + ") exceeds the " +
                      std::to_string(options.token_cap) +
                      "-token cap; enable long_context to allow it");
    }
  }
  for (std::uint32_t b : batch_sizes) {
    if (b < 1) throw Error(ErrorCode::kInvalidShape, "batch size must be >= 1");
  }
  std::vector<WorkloadSpec> out;
  out.reserve(shapes.size() * batch_sizes.size());
  for (const PromptShape& s : shapes) {
    for (std::uint32_t b : batch_sizes) out.push_back({s, b});
  }
  return out;
}

}  // namespace promptpower
