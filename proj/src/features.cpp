// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptpower/features.hpp"

#include <cmath>
#include <ostream>

#include "promptpower/csv.hpp"
#include "promptpower/error.hpp"

namespace promptpower {

const std::array<std::string_view, kFeatureCount>& feature_names() {
  static constexpr std::array<std::string_view, kFeatureCount> kNames = {
      "input_tokens",        "output_tokens",
      "batch_size",          "eager_mode",
      "kv_cache_bytes_per_prompt", "precision_bytes",
      "num_layers",          "hidden_size",
      "intermediate_size",   "num_kv_heads",
      "num_attention_heads", "is_moe",
      "num_local_experts",   "experts_per_token",
      "per_layer_params",    "embedding_params",
      "other_linear_params", "attention_params",
      "ffn_params",          "vram_required",
      "gpu_memory_total",    "gpu_bandwidth",
      "gpu_count",           "gpu_tdp",
      "tflops_for_precision", "cuda_cores",
      "free_vram",
  };
  return kNames;
}

std::size_t feature_index(std::string_view name) {
  const auto& names = feature_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  throw Error(ErrorCode::kSchemaMismatch,
              "no feature named '" + std::string(name) + "'");
}

FeatureVector assemble(const ArchitectureDescriptor& arch,
                       const HardwareConfig& hw, const Workload& workload) {
  const PlacementResult placement = place(arch, hw, arch.precision);
  if (!placement.fits) {
    throw Error(ErrorCode::kPlacementInfeasible,
                arch.model_id + " needs " +
                    std::to_string(placement.required_bytes) + " bytes, " +
                    std::to_string(hw.gpu_count) + " x " + hw.gpu.name +
                    " offer " + std::to_string(placement.usable_bytes));
  }
  const ParameterBreakdown params = count_parameters(arch);
  const auto d = [](auto v) { return static_cast<double>(v); };

  FeatureVector fv;
  fv.values = {
      d(workload.shape.input_tokens),
      d(workload.shape.output_tokens),
      d(workload.batch_size),
      workload.eager_mode ? 1.0 : 0.0,
      d(kv_cache_bytes_per_prompt(arch, arch.precision,
                                  workload.shape.total_tokens())),
      bytes_per_element(arch.precision),
      d(arch.num_layers),
      d(arch.hidden_size),
      d(arch.intermediate_size),
      d(arch.num_kv_heads),
      d(arch.num_attention_heads),
      arch.is_moe ? 1.0 : 0.0,
      d(arch.num_local_experts),
      d(arch.experts_per_token),
      d(params.per_layer_params),
      d(params.embedding_params),
      d(params.other_linear_params),
      d(params.attention_params),
      d(params.ffn_params),
      d(placement.required_bytes),
      d(hw.gpu.memory_bytes) * d(hw.gpu_count),
      hw.gpu.bandwidth_gbps,
      d(hw.gpu_count),
      hw.gpu.tdp_watts,
      tflops_for_precision(hw.gpu, arch.precision),
      d(hw.gpu.cuda_cores),
      d(placement.free_vram_bytes),
  };
  for (std::size_t i = 0; i < fv.values.size(); ++i) {
    if (!std::isfinite(fv.values[i])) {
      throw Error(ErrorCode::kNonFiniteFeature, std::string(feature_names()[i]));
    }
  }
  return fv;
}

FilterResult training_filter(const MeasurementSet& set) {
  FilterResult out;
  out.set.schema_version = set.schema_version;
  for (const MeasurementRecord& r : set.records) {
    if (r.batch_size >= kMinTrainingBatch) {
      out.set.records.push_back(r);
    } else {
      ++out.dropped;
    }
  }
  if (out.set.records.empty()) {
    throw Error(ErrorCode::kEmptyDataset,
                "no records with batch_size > 5 (" +
                    std::to_string(out.dropped) + " dropped)");
  }
  return out;
}

TrainingData build_training_data(const MeasurementSet& set,
                                 const FeatureContext& ctx) {
  if (ctx.archs == nullptr || ctx.catalog == nullptr) {
    throw std::invalid_argument("FeatureContext needs fixtures and a catalog");
  }
  TrainingData data;
  data.schema_version = kFeatureSchemaVersion;
  for (std::string_view n : feature_names()) data.feature_names.emplace_back(n);
  data.x = FeatureMatrix(0, kFeatureCount);
  for (const MeasurementRecord& r : set.records) {
    ArchitectureDescriptor arch = ctx.archs->get(r.model_id);
    arch.precision = r.precision;
    const HardwareConfig hw = make_hardware(ctx.catalog->lookup(r.gpu_name),
                                            r.gpu_count, ctx.memory_utilization);
    const FeatureVector fv =
        assemble(arch, hw, Workload{r.shape, r.batch_size, r.eager_mode});
    data.x.append_row(fv.values);
    data.y.push_back(r.energy_wh_per_prompt);
    data.groups.push_back(r.model_id);
  }
  return data;
}

void export_feature_matrix(const TrainingData& data, std::ostream& out) {
  std::vector<std::string> header = data.feature_names;
  header.emplace_back("energy_wh_per_prompt");
  out << csv::join_line(header) << '\n';
  for (std::size_t i = 0; i < data.rows(); ++i) {
    std::vector<std::string> fields;
    for (double v : data.x.row(i)) fields.push_back(csv::format_double(v));
    fields.push_back(csv::format_double(data.y[i]));
    out << csv::join_line(fields) << '\n';
  }
}

}  // namespace promptpower
