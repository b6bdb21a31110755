// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

// Variance-reduction regression trees stored as flat node arrays.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "promptpower/matrix.hpp"
#include "promptpower/rng.hpp"

namespace promptpower {

// A leaf has feature == -1 and both children == -1. Rows with
// x[feature] <= threshold go left.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class RegressionTree {
 public:
  RegressionTree() = default;
  // Throws InvalidValue unless the nodes form one tree rooted at index 0
  // with every child index greater than its parent's.
  explicit RegressionTree(std::vector<TreeNode> nodes);

  double predict(std::span<const double> x) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t leaf_count() const;
  std::size_t depth() const;
  // Largest feature index referenced, or -1 for a single leaf.
  int max_feature() const;

  friend bool operator==(const RegressionTree&, const RegressionTree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

struct TreeOptions {
  std::size_t min_leaf = 1;
  std::size_t max_depth = 0;  // 0 = unlimited
  std::size_t mtry = 0;       // varying features examined per split; 0 = all
};

// Row indices of `x` sorted by each column, ties broken by row index.
// Computed once and shared by every tree grown on the same matrix.
class SortedColumns {
 public:
  explicit SortedColumns(const FeatureMatrix& x);
  std::span<const std::size_t> order(std::size_t feature) const {
    return orders_[feature];
  }

 private:
  std::vector<std::vector<std::size_t>> orders_;
};

// Grows a tree on the rows listed in `sample` (duplicates allowed, as in a
// bootstrap draw). `rng` is only consulted when options.mtry is below the
// column count.
RegressionTree grow_tree(const FeatureMatrix& x, std::span<const double> y,
                         std::span<const std::size_t> sample,
                         const SortedColumns& sorted, const TreeOptions& options,
                         SplitMix64* rng);

// All rows, all features.
RegressionTree grow_tree(const FeatureMatrix& x, std::span<const double> y,
                         const TreeOptions& options);

}  // namespace promptpower
