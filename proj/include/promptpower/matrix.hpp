// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace promptpower {

// Dense row-major matrix of feature values.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  void append_row(std::span<const double> values) {
    if (rows_ == 0 && cols_ == 0) cols_ = values.size();
    assert(values.size() == cols_);
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
  }

  // Rows picked by index, in the given order.
  FeatureMatrix select_rows(std::span<const std::size_t> indices) const {
    FeatureMatrix out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
      const auto src = row(indices[i]);
      std::copy(src.begin(), src.end(), out.data_.begin() + i * cols_);
    }
    return out;
  }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Features, targets and the model id each row came from.
struct TrainingData {
  FeatureMatrix x;
  std::vector<double> y;
  std::vector<std::string> groups;
  std::vector<std::string> feature_names;
  int schema_version = 0;

  std::size_t rows() const { return y.size(); }
  TrainingData subset(std::span<const std::size_t> indices) const {
    TrainingData out;
    out.x = x.select_rows(indices);
    out.y.reserve(indices.size());
    for (std::size_t i : indices) {
      out.y.push_back(y[i]);
      if (!groups.empty()) out.groups.push_back(groups[i]);
    }
    out.feature_names = feature_names;
    out.schema_version = schema_version;
    return out;
  }
};

}  // namespace promptpower
