// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <json.hpp>

namespace promptpower {

// Compact JSON in which every floating-point number is printed with 17
// significant digits ("%.17g"), so it parses back to the same double.
// Non-finite numbers become null. Object keys come out sorted.
std::string dump_json(const nlohmann::json& value);

}  // namespace promptpower
