// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptpower/estimate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>

#include "promptpower/error.hpp"
#include "promptpower/features.hpp"

namespace promptpower {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void require_non_negative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::kNegativeInput,
                std::string(what) + " must be finite and >= 0");
  }
}

void require_factor(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::kInvalidFactor,
                std::string(what) + " must be finite and > 0");
  }
}

}  // namespace

EnergyEstimate estimate_prompt(const ArchitectureDescriptor& arch,
                               const HardwareConfig& hw, PromptShape shape,
                               std::uint32_t batch_size,
                               const TrainedEstimator& estimator,
                               bool eager_mode) {
  if (batch_size < 1) {
    throw Error(ErrorCode::kInvalidBatch, "batch_size must be >= 1");
  }
  if (shape.input_tokens < 1 || shape.output_tokens < 1) {
    throw Error(ErrorCode::kInvalidShape, "token counts must be >= 1");
  }
  const FeatureVector fv = assemble(arch, hw, {shape, batch_size, eager_mode});
  EnergyEstimate e;
  e.wh_per_prompt = estimator.predict(fv);
  e.wh_total = e.wh_per_prompt * static_cast<double>(batch_size);
  e.model_id = arch.model_id;
  e.gpu_name = hw.gpu.name;
  e.gpu_count = hw.gpu_count;
  e.batch_size = batch_size;
  e.estimator_id = estimator.artifact_id();
  return e;
}

EnergyEstimate estimate_prompt(const ArchitectureRegistry& archs,
                               std::string_view model_id,
                               const HardwareConfig& hw, PromptShape shape,
                               std::uint32_t batch_size,
                               const TrainedEstimator& estimator) {
  return estimate_prompt(archs.get(model_id), hw, shape, batch_size, estimator);
}

EnergyEstimate estimate_mixed_batch(std::span<const PromptShape> prompts,
                                    const ArchitectureDescriptor& arch,
                                    const HardwareConfig& hw,
                                    const TrainedEstimator& estimator) {
  if (prompts.empty()) {
    throw Error(ErrorCode::kEmptyBatch, "a mixed batch needs at least one prompt");
  }
  const auto batch = static_cast<std::uint32_t>(prompts.size());

  // Distinct shapes in first-occurrence order with their multiplicity.
  std::vector<std::pair<PromptShape, std::uint32_t>> groups;
  for (const PromptShape& s : prompts) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.first == s; });
    if (it == groups.end()) {
      groups.emplace_back(s, 1);
    } else {
      ++it->second;
    }
  }
  EnergyEstimate out;
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> per_shape;
  for (const auto& [shape, count] : groups) {
    const EnergyEstimate one = estimate_prompt(arch, hw, shape, batch, estimator);
    per_shape[{shape.input_tokens, shape.output_tokens}] = one.wh_per_prompt;
    out.wh_total += one.wh_per_prompt * static_cast<double>(count);
    out.estimator_id = one.estimator_id;
  }
  for (const PromptShape& s : prompts) {
    out.per_prompt_wh.push_back(per_shape.at({s.input_tokens, s.output_tokens}));
  }
  out.wh_per_prompt = out.wh_total / static_cast<double>(batch);
  out.model_id = arch.model_id;
  out.gpu_name = hw.gpu.name;
  out.gpu_count = hw.gpu_count;
  out.batch_size = batch;
  return out;
}

std::uint64_t estimate_tokens_from_text(std::string_view utf8,
                                        double chars_per_token) {
  require_factor(chars_per_token, "chars_per_token");
  std::uint64_t scalars = 0;
  for (unsigned char c : utf8) {
    if ((c & 0xC0) != 0x80) ++scalars;
  }
  if (scalars == 0) return 0;
  return static_cast<std::uint64_t>(
      std::ceil(static_cast<double>(scalars) / chars_per_token));
}

EmissionsEstimate co2_from_energy(double wh, double intensity) {
  require_non_negative(wh, "energy");
  require_non_negative(intensity, "grid intensity");
  return {wh * intensity / 1000.0, intensity};
}

InsightEquivalents insights(double wh, double grams,
                            const InsightFactors& factors) {
  require_factor(factors.bulb_watts, "bulb_watts");
  require_factor(factors.tv_watts, "tv_watts");
  require_factor(factors.flight_g_per_km, "flight_g_per_km");
  require_non_negative(wh, "energy");
  require_non_negative(grams, "emissions");
  InsightEquivalents out;
  out.lightbulb_minutes = wh * 60.0 / factors.bulb_watts;
  out.tv_minutes = wh * 60.0 / factors.tv_watts;
  out.flight_km = grams / factors.flight_g_per_km;
  out.factors_used = factors;
  return out;
}

std::vector<PlatformMapping> platform_mappings_from_json(const nlohmann::json& doc) {
  std::vector<PlatformMapping> out;
  try {
    for (const nlohmann::json& item : doc) {
      PlatformMapping m;
      m.platform = item.at("platform").get<std::string>();
      m.proxy_model_id = item.at("proxy_model_id").get<std::string>();
      m.gpu_name = item.at("gpu_name").get<std::string>();
      m.gpu_count = item.at("gpu_count").get<std::uint32_t>();
      m.chars_per_token = item.value("chars_per_token", 0.0);
      if (m.chars_per_token != 0.0) require_factor(m.chars_per_token, "chars_per_token");
      if (m.platform.empty() || m.gpu_count < 1) {
        throw Error(ErrorCode::kInvalidValue,
                    "platform mapping needs a name and gpu_count >= 1");
      }
      for (const PlatformMapping& prev : out) {
        if (lower(prev.platform) == lower(m.platform)) {
          throw Error(ErrorCode::kInvalidValue,
                      "platform '" + m.platform + "' is listed twice");
        }
      }
      out.push_back(std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("platform mappings: ") + e.what());
  }
  return out;
}

std::vector<PlatformMapping> load_platform_mappings(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  return platform_mappings_from_json(doc);
}

const PlatformMapping& map_platform(std::string_view platform,
                                    std::span<const PlatformMapping> mappings) {
  const std::string wanted = lower(platform);
  for (const PlatformMapping& m : mappings) {
    if (lower(m.platform) == wanted) return m;
  }
  std::string known;
  for (const PlatformMapping& m : mappings) {
    if (!known.empty()) known += ", ";
    known += m.platform;
  }
  throw Error(ErrorCode::kUnknownPlatform,
              "'" + std::string(platform) + "' (configured: " + known + ")");
}

void check_platform_mappings(std::span<const PlatformMapping> mappings,
                             const ArchitectureRegistry& archs,
                             const GpuCatalog& catalog) {
  for (const PlatformMapping& m : mappings) {
    archs.get(m.proxy_model_id);
    catalog.lookup(m.gpu_name);
  }
}

}  // namespace promptpower
