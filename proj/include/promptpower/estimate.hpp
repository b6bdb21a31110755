// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
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

struct EnergyEstimate {
  double wh_per_prompt = 0.0;
  double wh_total = 0.0;
  std::string model_id;
  std::string gpu_name;
  std::uint32_t gpu_count = 0;
  std::uint32_t batch_size = 0;
  std::string estimator_id;
  // Mixed batches only: the per-prompt prediction of each input prompt.
  std::vector<double> per_prompt_wh;
};

// Predicts Wh per prompt for `shape` in a batch of `batch_size` equally
// shaped prompts; wh_total = wh_per_prompt * batch_size. Throws
// PlacementInfeasible, SchemaMismatch and InvalidBatch.
EnergyEstimate estimate_prompt(const ArchitectureDescriptor& arch,
                               const HardwareConfig& hw, PromptShape shape,
                               std::uint32_t batch_size,
                               const TrainedEstimator& estimator,
                               bool eager_mode = false);
// Resolves `model_id` in the registry first (UnknownModelId lists ids).
EnergyEstimate estimate_prompt(const ArchitectureRegistry& archs,
                               std::string_view model_id,
                               const HardwareConfig& hw, PromptShape shape,
                               std::uint32_t batch_size,
                               const TrainedEstimator& estimator);

// Each prompt is predicted at batch size = prompts.size(). Identical
// shapes are predicted once and multiplied by their count, so k copies of
// one shape total exactly k times the single-shape estimate. Throws
// EmptyBatch.
EnergyEstimate estimate_mixed_batch(std::span<const PromptShape> prompts,
                                    const ArchitectureDescriptor& arch,
                                    const HardwareConfig& hw,
                                    const TrainedEstimator& estimator);

inline constexpr double kDefaultCharsPerToken = 4.0;

// ceil(code points / chars_per_token) for UTF-8 text; malformed bytes are
// counted like any other non-continuation byte. Throws InvalidFactor.
std::uint64_t estimate_tokens_from_text(
    std::string_view utf8, double chars_per_token = kDefaultCharsPerToken);

// World-average grid carbon intensity, gCO2e/kWh.
inline constexpr double kDefaultGridIntensity = 475.0;

struct EmissionsEstimate {
  double grams_co2e = 0.0;
  double grid_intensity = 0.0;
};

// grams = wh * intensity / 1000. Throws NegativeInput.
EmissionsEstimate co2_from_energy(double wh, double intensity);

struct InsightFactors {
  double bulb_watts = 10.0;
  double tv_watts = 100.0;
  double flight_g_per_km = 90.0;

  friend bool operator==(const InsightFactors&, const InsightFactors&) = default;
};

struct InsightEquivalents {
  double lightbulb_minutes = 0.0;
  double tv_minutes = 0.0;
  double flight_km = 0.0;
  InsightFactors factors_used;
};

// Throws InvalidFactor for non-positive factors and NegativeInput for
// negative energy or emissions.
InsightEquivalents insights(double wh, double grams,
                            const InsightFactors& factors = {});

struct PlatformMapping {
  std::string platform;
  std::string proxy_model_id;
  std::string gpu_name;
  std::uint32_t gpu_count = 1;
  double chars_per_token = 0.0;  // 0: use the service default
};

std::vector<PlatformMapping> load_platform_mappings(
    const std::filesystem::path& path);
std::vector<PlatformMapping> platform_mappings_from_json(
    const nlohmann::json& doc);

// Case-insensitive exact match. Throws UnknownPlatform listing the
// configured names.
const PlatformMapping& map_platform(std::string_view platform,
                                    std::span<const PlatformMapping> mappings);

// Throws UnknownModelId or UnknownGpu for a proxy missing from the
// fixtures or the catalog.
void check_platform_mappings(std::span<const PlatformMapping> mappings,
                             const ArchitectureRegistry& archs,
                             const GpuCatalog& catalog);

}  // namespace promptpower
