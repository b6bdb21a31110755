// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

// Shared fixtures for the unit tests and the acceptance runner.

#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "promptpower/arch.hpp"
#include "promptpower/dataset.hpp"
#include "promptpower/estimator.hpp"
#include "promptpower/features.hpp"
#include "promptpower/hardware.hpp"
#include "promptpower/rng.hpp"
#include "promptpower/service.hpp"

namespace testing_support {

namespace pp = promptpower;

inline std::filesystem::path data_dir() { return pp::default_data_dir(); }

inline const pp::ArchitectureRegistry& archs() {
  static const pp::ArchitectureRegistry r =
      pp::ArchitectureRegistry::load_directory(data_dir() / "fixtures");
  return r;
}

inline const pp::GpuCatalog& catalog() {
  static const pp::GpuCatalog c =
      pp::GpuCatalog::load(data_dir() / "gpu_catalog.json");
  return c;
}

inline pp::FeatureContext context() { return {&archs(), &catalog()}; }

inline const pp::MeasurementSet& seed_set() {
  static const pp::MeasurementSet s =
      pp::ingest_csv(data_dir() / "seed_measurements.csv").set;
  return s;
}

// One layer, one KV head of width one: two KV bytes per token at int8.
inline pp::ArchitectureDescriptor toy_arch() {
  pp::ArchitectureDescriptor a;
  a.model_id = "toy/tiny";
  a.num_layers = 1;
  a.hidden_size = 1;
  a.intermediate_size = 1;
  a.num_attention_heads = 1;
  a.num_kv_heads = 1;
  a.head_dim = 1;
  a.head_dim_explicit = true;
  a.vocab_size = 1;
  a.max_position_embeddings = 16;
  a.precision = pp::Precision::kInt8;
  return a;
}

// A single-leaf model over the full feature schema that predicts `value`
// for every input.
inline pp::TrainedEstimator constant_estimator(double value) {
  pp::FeatureMatrix x(3, pp::kFeatureCount);
  for (std::size_t i = 0; i < 3; ++i) x(i, 0) = static_cast<double>(i);
  const std::vector<double> y(3, value);
  return pp::fit(pp::Family::kCart, x, y, {}, 0,
                 {pp::TargetTransform::kIdentity, pp::kFeatureSchemaVersion});
}

inline double log_uniform(pp::SplitMix64& rng, double lo, double hi) {
  return std::exp(std::log(lo) + rng.uniform01() * (std::log(hi) - std::log(lo)));
}

// Per-prompt energy law shared by the synthetic benchmarks: a fixed cost
// per output token that grows with model size and context, spread over the
// batch, with a weaker input-token term.
inline double synthetic_energy(double params_b, double input_tokens,
                               double output_tokens, double batch,
                               double gpu_count) {
  const double per_out = 2.0e-6 * params_b * (1.0 + input_tokens / 4000.0);
  const double per_in = 1.5e-7 * params_b;
  const double amortized = 1.0 + 40.0 / batch;
  return (per_out * output_tokens + per_in * input_tokens) * amortized *
         (0.9 + 0.1 * gpu_count);
}

}  // namespace testing_support
