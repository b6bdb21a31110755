// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace promptpower {

// Machine-readable failure categories. The names are part of the HTTP and
// CLI surface, so renaming one is a breaking change.
enum class ErrorCode {
  kMissingField,
  kInvalidValue,
  kUnsupportedPrecision,
  kUnknownGpu,
  kInfeasible,
  kInvalidBatch,
  kSchemaMismatch,
  kEmptyDataset,
  kEmptySelection,
  kEmptyGrid,
  kInvalidShape,
  kPlacementInfeasible,
  kNonFiniteFeature,
  kLengthMismatch,
  kZeroVariance,
  kSingularDesign,
  kInvalidHyper,
  kTooFewRows,
  kUnknownModelId,
  kEmptyBatch,
  kInvalidFactor,
  kNegativeInput,
  kUnknownPlatform,
  kMixedBenchmarks,
  kEmptyInput,
  kIo,
  kParse,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  // Message without the "<Code>: " prefix that what() carries.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace promptpower
