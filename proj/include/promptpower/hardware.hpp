// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "promptpower/arch.hpp"
#include "promptpower/precision.hpp"

namespace promptpower {

struct GpuSpec {
  std::string name;
  std::uint64_t memory_bytes = 0;
  double bandwidth_gbps = 0.0;
  double tdp_watts = 0.0;
  std::map<Precision, double> tflops_by_precision;
  std::uint32_t cuda_cores = 0;

  friend bool operator==(const GpuSpec&, const GpuSpec&) = default;
};

GpuSpec gpu_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GpuSpec& gpu);

// Throws UnsupportedPrecision naming the GPU and precision.
double tflops_for_precision(const GpuSpec& gpu, Precision precision);

class GpuCatalog {
 public:
  GpuCatalog() = default;
  explicit GpuCatalog(std::vector<GpuSpec> gpus);

  static GpuCatalog load(const std::filesystem::path& path);
  static GpuCatalog from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  // Exact match after trimming surrounding whitespace. Throws UnknownGpu
  // listing the closest catalog names.
  const GpuSpec& lookup(std::string_view name) const;
  std::vector<std::string> names() const;
  const std::vector<GpuSpec>& gpus() const { return gpus_; }

 private:
  std::vector<GpuSpec> gpus_;
};

inline constexpr double kDefaultMemoryUtilization = 0.9;
// Largest single node in the catalog setups; beyond this a config spans nodes.
inline constexpr std::uint32_t kGpusPerNode = 8;

struct HardwareConfig {
  GpuSpec gpu;
  std::uint32_t gpu_count = 1;
  double memory_utilization = kDefaultMemoryUtilization;

  bool multi_node() const { return gpu_count > kGpusPerNode; }
};

// Validates gpu_count >= 1 and memory_utilization in (0, 1].
HardwareConfig make_hardware(const GpuSpec& gpu, std::uint32_t gpu_count,
                             double memory_utilization = kDefaultMemoryUtilization);

struct PlacementResult {
  bool fits = false;
  std::uint64_t usable_bytes = 0;
  std::uint64_t required_bytes = 0;
  std::uint64_t free_vram_bytes = 0;  // 0 when not fitting
  std::uint64_t kv_token_capacity = 0;
};

PlacementResult place(const ArchitectureDescriptor& arch,
                      const HardwareConfig& hw, Precision kv_precision,
                      double weight_overhead = kDefaultWeightOverhead);

inline constexpr std::uint32_t kMaxGpuCount = 64;

// Smallest count in [1, kMaxGpuCount] that fits the weights and leaves room
// for required_kv_tokens. Throws Infeasible otherwise.
std::uint32_t min_feasible_gpu_count(
    const ArchitectureDescriptor& arch, const GpuSpec& gpu,
    std::uint64_t required_kv_tokens, Precision kv_precision,
    double memory_utilization = kDefaultMemoryUtilization,
    double weight_overhead = kDefaultWeightOverhead);

}  // namespace promptpower
