// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptpower/json_format.hpp"

#include <cmath>
#include <cstdio>

namespace promptpower {
namespace {

void write(const nlohmann::json& v, std::string& out) {
  using Type = nlohmann::json::value_t;
  switch (v.type()) {
    case Type::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out += ',';
        first = false;
        out += nlohmann::json(key).dump();
        out += ':';
        write(item, out);
      }
      out += '}';
      break;
    }
    case Type::array: {
      out += '[';
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out += ',';
        write(v[i], out);
      }
      out += ']';
      break;
    }
    case Type::number_float: {
      const double d = v.get<double>();
      if (!std::isfinite(d)) {
        out += "null";
        break;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", d);
      out += buf;
      break;
    }
    default:
      out += v.dump();
      break;
  }
}

}  // namespace

std::string dump_json(const nlohmann::json& value) {
  std::string out;
  write(value, out);
  return out;
}

}  // namespace promptpower
