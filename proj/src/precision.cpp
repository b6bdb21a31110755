// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptpower/precision.hpp"

#include <string>

#include "promptpower/error.hpp"

namespace promptpower {

std::string_view to_string(Precision p) {
  switch (p) {
    case Precision::kFp32: return "fp32";
    case Precision::kFp16: return "fp16";
    case Precision::kBf16: return "bf16";
    case Precision::kFp8: return "fp8";
    case Precision::kInt8: return "int8";
    case Precision::kInt4: return "int4";
  }
  return "?";
}

Precision parse_precision(std::string_view text) {
  for (Precision p : kAllPrecisions) {
    if (text == to_string(p)) return p;
  }
  if (text == "float32") return Precision::kFp32;
  if (text == "float16" || text == "half") return Precision::kFp16;
  if (text == "bfloat16") return Precision::kBf16;
  throw Error(ErrorCode::kUnsupportedPrecision,
              "unknown precision '" + std::string(text) + "'");
}

}  // namespace promptpower
