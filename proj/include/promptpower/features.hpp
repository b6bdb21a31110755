// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

// Fixed-order numeric feature vector over workload, architecture and
// hardware variables.

#pragma once

#include <array>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "promptpower/arch.hpp"
#include "promptpower/dataset.hpp"
#include "promptpower/hardware.hpp"
#include "promptpower/matrix.hpp"

namespace promptpower {

inline constexpr int kFeatureSchemaVersion = 1;
inline constexpr std::size_t kFeatureCount = 27;

// Slot order is part of schema version 1.
const std::array<std::string_view, kFeatureCount>& feature_names();
std::size_t feature_index(std::string_view name);

struct FeatureVector {
  std::vector<double> values;
  int schema_version = kFeatureSchemaVersion;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct Workload {
  PromptShape shape;
  std::uint32_t batch_size = 1;
  bool eager_mode = false;
};

// The KV cache is taken to be stored at the weights' precision. Throws
// PlacementInfeasible when the weights do not fit and NonFiniteFeature
// naming the slot for any non-finite value.
FeatureVector assemble(const ArchitectureDescriptor& arch,
                       const HardwareConfig& hw, const Workload& workload);

struct FilterResult {
  MeasurementSet set;
  std::size_t dropped = 0;
};

// Keeps batches of more than five prompts. Throws EmptyDataset when nothing
// survives.
FilterResult training_filter(const MeasurementSet& set);

inline constexpr std::uint32_t kMinTrainingBatch = 6;

struct FeatureContext {
  const ArchitectureRegistry* archs = nullptr;
  const GpuCatalog* catalog = nullptr;
  double memory_utilization = kDefaultMemoryUtilization;
};

// Resolves each record's fixture and GPU, overriding the fixture precision
// with the record's, and assembles one row per record.
TrainingData build_training_data(const MeasurementSet& set,
                                 const FeatureContext& ctx);

// CSV: schema names as header plus energy_wh_per_prompt.
void export_feature_matrix(const TrainingData& data, std::ostream& out);

}  // namespace promptpower
