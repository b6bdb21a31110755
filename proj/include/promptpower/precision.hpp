// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace promptpower {

enum class Precision { kFp32, kFp16, kBf16, kFp8, kInt8, kInt4 };

inline constexpr std::array<Precision, 6> kAllPrecisions = {
    Precision::kFp32, Precision::kFp16, Precision::kBf16,
    Precision::kFp8,  Precision::kInt8, Precision::kInt4};

// Storage size in half-bytes, so int4 stays integral.
constexpr std::uint64_t half_bytes_per_element(Precision p) {
  switch (p) {
    case Precision::kFp32: return 8;
    case Precision::kFp16:
    case Precision::kBf16: return 4;
    case Precision::kFp8:
    case Precision::kInt8: return 2;
    case Precision::kInt4: return 1;
  }
  return 0;
}

constexpr double bytes_per_element(Precision p) {
  return static_cast<double>(half_bytes_per_element(p)) / 2.0;
}

std::string_view to_string(Precision p);

// Accepts the enum names ("fp16") and the HuggingFace torch_dtype spellings
// ("float16", "bfloat16", "float32"). Throws UnsupportedPrecision otherwise.
Precision parse_precision(std::string_view text);

}  // namespace promptpower
