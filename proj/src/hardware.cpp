// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptpower/hardware.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include "promptpower/error.hpp"

namespace promptpower {
namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const bool same = std::tolower(static_cast<unsigned char>(a[i - 1])) ==
                        std::tolower(static_cast<unsigned char>(b[j - 1]));
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (same ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

double positive_number(const json& j, const char* key) {
  const double v = j.at(key).get<double>();
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::kInvalidValue, std::string(key) + " must be > 0");
  }
  return v;
}

}  // namespace

GpuSpec gpu_spec_from_json(const json& j) {
  try {
    GpuSpec g;
    g.name = j.at("name").get<std::string>();
    g.memory_bytes = j.at("memory_bytes").get<std::uint64_t>();
    g.bandwidth_gbps = positive_number(j, "bandwidth_gbps");
    g.tdp_watts = positive_number(j, "tdp_watts");
    g.cuda_cores = j.at("cuda_cores").get<std::uint32_t>();
    for (const auto& [key, value] : j.at("tflops_by_precision").items()) {
      const double tflops = value.get<double>();
      if (!(tflops > 0.0)) {
        throw Error(ErrorCode::kInvalidValue, g.name + ": TFLOPS must be > 0");
      }
      g.tflops_by_precision[parse_precision(key)] = tflops;
    }
    if (g.name.empty() || g.memory_bytes == 0 || g.cuda_cores == 0 ||
        g.tflops_by_precision.empty()) {
      throw Error(ErrorCode::kInvalidValue,
                  "GPU spec '" + g.name + "' has empty or zero fields");
    }
    return g;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("GPU spec: ") + e.what());
  }
}

json to_json(const GpuSpec& g) {
  json tflops = json::object();
  for (const auto& [p, v] : g.tflops_by_precision) {
    tflops[std::string(to_string(p))] = v;
  }
  return {{"name", g.name},
          {"memory_bytes", g.memory_bytes},
          {"bandwidth_gbps", g.bandwidth_gbps},
          {"tdp_watts", g.tdp_watts},
          {"tflops_by_precision", tflops},
          {"cuda_cores", g.cuda_cores}};
}

double tflops_for_precision(const GpuSpec& gpu, Precision precision) {
  if (auto it = gpu.tflops_by_precision.find(precision);
      it != gpu.tflops_by_precision.end()) {
    return it->second;
  }
  throw Error(ErrorCode::kUnsupportedPrecision,
              gpu.name + " has no " + std::string(to_string(precision)) +
                  " throughput");
}

GpuCatalog::GpuCatalog(std::vector<GpuSpec> gpus) : gpus_(std::move(gpus)) {
  for (std::size_t i = 0; i < gpus_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (gpus_[i].name == gpus_[j].name) {
        throw Error(ErrorCode::kInvalidValue,
                    "duplicate catalog entry " + gpus_[i].name);
      }
    }
  }
}

GpuCatalog GpuCatalog::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  return from_json(doc);
}

GpuCatalog GpuCatalog::from_json(const json& doc) {
  std::vector<GpuSpec> gpus;
  const json& list = doc.is_object() ? doc.at("gpus") : doc;
  for (const json& item : list) gpus.push_back(gpu_spec_from_json(item));
  return GpuCatalog(std::move(gpus));
}

json GpuCatalog::to_json() const {
  json list = json::array();
  for (const GpuSpec& g : gpus_) list.push_back(promptpower::to_json(g));
  return {{"gpus", list}};
}

const GpuSpec& GpuCatalog::lookup(std::string_view name) const {
  const std::string_view wanted = trim(name);
  for (const GpuSpec& g : gpus_) {
    if (g.name == wanted) return g;
  }
  std::vector<std::pair<std::size_t, std::string>> ranked;
  for (const GpuSpec& g : gpus_) {
    ranked.emplace_back(edit_distance(wanted, g.name), g.name);
  }
  std::sort(ranked.begin(), ranked.end());
  std::string nearest;
  for (std::size_t i = 0; i < ranked.size() && i < 3; ++i) {
    if (i > 0) nearest += ", ";
    nearest += ranked[i].second;
  }
  throw Error(ErrorCode::kUnknownGpu, "'" + std::string(wanted) +
                                          "' (nearest: " + nearest + ")");
}

std::vector<std::string> GpuCatalog::names() const {
  std::vector<std::string> out;
  for (const GpuSpec& g : gpus_) out.push_back(g.name);
  return out;
}

HardwareConfig make_hardware(const GpuSpec& gpu, std::uint32_t gpu_count,
                             double memory_utilization) {
  if (gpu_count < 1) {
    throw Error(ErrorCode::kInvalidValue, "gpu_count must be >= 1");
  }
  if (!(memory_utilization > 0.0 && memory_utilization <= 1.0)) {
    throw Error(ErrorCode::kInvalidValue,
                "memory_utilization must be in (0, 1]");
  }
  return HardwareConfig{gpu, gpu_count, memory_utilization};
}

PlacementResult place(const ArchitectureDescriptor& arch,
                      const HardwareConfig& hw, Precision kv_precision,
                      double weight_overhead) {
  PlacementResult r;
  r.usable_bytes = static_cast<std::uint64_t>(std::floor(
      static_cast<double>(hw.gpu_count) *
      static_cast<double>(hw.gpu.memory_bytes) * hw.memory_utilization));
  r.required_bytes = vram_required(arch, weight_overhead);
  r.fits = r.required_bytes <= r.usable_bytes;
  if (r.fits) {
    r.free_vram_bytes = r.usable_bytes - r.required_bytes;
    r.kv_token_capacity =
        r.free_vram_bytes / kv_cache_bytes_per_token(arch, kv_precision);
  }
  return r;
}

std::uint32_t min_feasible_gpu_count(const ArchitectureDescriptor& arch,
                                     const GpuSpec& gpu,
                                     std::uint64_t required_kv_tokens,
                                     Precision kv_precision,
                                     double memory_utilization,
                                     double weight_overhead) {
  for (std::uint32_t n = 1; n <= kMaxGpuCount; ++n) {
    const PlacementResult r =
        place(arch, make_hardware(gpu, n, memory_utilization), kv_precision,
              weight_overhead);
    if (r.fits && r.kv_token_capacity >= required_kv_tokens) return n;
  }
  throw Error(ErrorCode::kInfeasible,
              arch.model_id + " does not fit on " +
                  std::to_string(kMaxGpuCount) + " x " + gpu.name);
}

}  // namespace promptpower
