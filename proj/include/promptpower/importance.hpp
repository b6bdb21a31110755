// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "promptpower/estimator.hpp"
#include "promptpower/matrix.hpp"

namespace promptpower {

struct ImportanceEntry {
  std::string feature;
  std::size_t index = 0;
  double score = 0.0;  // mean RMSE increase in Wh
  double sd = 0.0;     // sample SD over the permutations
};

// Sorted by descending score, ties by feature index.
struct ImportanceReport {
  std::vector<ImportanceEntry> entries;
};

inline constexpr std::size_t kImportancePermutations = 5;

// Permutation k of every column uses SplitMix64(seed + k). Throws
// TooFewRows below 10 rows and SchemaMismatch when the column count differs
// from the model's.
ImportanceReport permutation_importance(const TrainedEstimator& model,
                                        const TrainingData& data,
                                        std::uint64_t seed);

}  // namespace promptpower
