// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptpower/error.hpp"

namespace promptpower {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingField: return "MissingField";
    case ErrorCode::kInvalidValue: return "InvalidValue";
    case ErrorCode::kUnsupportedPrecision: return "UnsupportedPrecision";
    case ErrorCode::kUnknownGpu: return "UnknownGpu";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kInvalidBatch: return "InvalidBatch";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kEmptySelection: return "EmptySelection";
    case ErrorCode::kEmptyGrid: return "EmptyGrid";
    case ErrorCode::kInvalidShape: return "InvalidShape";
    case ErrorCode::kPlacementInfeasible: return "PlacementInfeasible";
    case ErrorCode::kNonFiniteFeature: return "NonFiniteFeature";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kSingularDesign: return "SingularDesign";
    case ErrorCode::kInvalidHyper: return "InvalidHyper";
    case ErrorCode::kTooFewRows: return "TooFewRows";
    case ErrorCode::kUnknownModelId: return "UnknownModelId";
    case ErrorCode::kEmptyBatch: return "EmptyBatch";
    case ErrorCode::kInvalidFactor: return "InvalidFactor";
    case ErrorCode::kNegativeInput: return "NegativeInput";
    case ErrorCode::kUnknownPlatform: return "UnknownPlatform";
    case ErrorCode::kMixedBenchmarks: return "MixedBenchmarks";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kParse: return "Parse";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      detail_(message) {}

}  // namespace promptpower
