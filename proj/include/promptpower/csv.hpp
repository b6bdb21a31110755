// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

// Minimal RFC 4180 field handling shared by the CSV readers and writers.

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace promptpower::csv {

std::vector<std::string> split_line(std::string_view line);
std::string join_line(const std::vector<std::string>& fields);

// Splits text into lines, dropping a trailing '\r' from each.
std::vector<std::string> lines(std::string_view text);

// Shortest representation that parses back to the same double.
std::string format_double(double value);

// Strict parse of the whole field; throws Error(kParse) naming `what`.
double parse_double(std::string_view text, std::string_view what);
long long parse_integer(std::string_view text, std::string_view what);
bool parse_bool(std::string_view text, std::string_view what);

std::string read_file(const std::string& path);

}  // namespace promptpower::csv
