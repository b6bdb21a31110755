// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptpower/tree.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "promptpower/error.hpp"

namespace promptpower {

RegressionTree::RegressionTree(std::vector<TreeNode> nodes)
    : nodes_(std::move(nodes)) {
  if (nodes_.empty()) {
    throw Error(ErrorCode::kInvalidValue, "tree has no nodes");
  }
  const int n = static_cast<int>(nodes_.size());
  std::vector<int> parents(nodes_.size(), 0);
  for (int i = 0; i < n; ++i) {
    const TreeNode& node = nodes_[i];
    if (node.is_leaf()) {
      if (node.left != -1 || node.right != -1) {
        throw Error(ErrorCode::kInvalidValue,
                    "leaf " + std::to_string(i) + " has children");
      }
      continue;
    }
    for (int child : {node.left, node.right}) {
      if (child <= i || child >= n) {
        throw Error(ErrorCode::kInvalidValue,
                    "node " + std::to_string(i) + " has bad child " +
                        std::to_string(child));
      }
      ++parents[child];
    }
  }
  for (int i = 1; i < n; ++i) {
    if (parents[i] != 1) {
      throw Error(ErrorCode::kInvalidValue,
                  "node " + std::to_string(i) + " is not reachable exactly once");
    }
  }
}

double RegressionTree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const TreeNode& n = nodes_[i];
    i = static_cast<std::size_t>(x[n.feature] <= n.threshold ? n.left : n.right);
  }
  return nodes_[i].value;
}

std::size_t RegressionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::size_t RegressionTree::depth() const {
  // Children always follow their parent, so one forward pass suffices.
  std::vector<std::size_t> d(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, d[i]);
    if (!nodes_[i].is_leaf()) {
      d[nodes_[i].left] = d[i] + 1;
      d[nodes_[i].right] = d[i] + 1;
    }
  }
  return deepest;
}

int RegressionTree::max_feature() const {
  int m = -1;
  for (const TreeNode& n : nodes_) m = std::max(m, n.feature);
  return m;
}

SortedColumns::SortedColumns(const FeatureMatrix& x) : orders_(x.cols()) {
  for (std::size_t f = 0; f < x.cols(); ++f) {
    auto& order = orders_[f];
    order.resize(x.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double va = x(a, f), vb = x(b, f);
      return va < vb || (va == vb && a < b);
    });
  }
}

namespace {

class Grower {
 public:
  Grower(const FeatureMatrix& x, std::span<const double> y,
         std::span<const std::size_t> sample, const SortedColumns& sorted,
         const TreeOptions& options, SplitMix64* rng)
      : x_(x), sample_(sample), options_(options), rng_(rng) {
    const std::size_t m = sample.size();
    const std::size_t p = x.cols();
    yv_.resize(m);
    for (std::size_t k = 0; k < m; ++k) yv_[k] = y[sample[k]];

    // Positions grouped by row (counting sort), then laid out in each
    // column's row order.
    std::vector<std::size_t> offset(x.rows() + 1, 0);
    for (std::size_t row : sample) ++offset[row + 1];
    for (std::size_t r = 0; r < x.rows(); ++r) offset[r + 1] += offset[r];
    std::vector<std::size_t> by_row(m);
    std::vector<std::size_t> fill(offset.begin(), offset.end() - 1);
    for (std::size_t k = 0; k < m; ++k) by_row[fill[sample[k]]++] = k;

    orders_.assign(p, {});
    for (std::size_t f = 0; f < p; ++f) {
      orders_[f].reserve(m);
      for (std::size_t row : sorted.order(f)) {
        for (std::size_t i = offset[row]; i < offset[row + 1]; ++i) {
          orders_[f].push_back(by_row[i]);
        }
      }
    }
    go_left_.resize(m);
    scratch_.resize(m);
    features_.resize(p);
  }

  std::vector<TreeNode> run() {
    if (!sample_.empty()) build(0, sample_.size(), 0);
    return std::move(nodes_);
  }

 private:
  double value(std::size_t position, std::size_t f) const {
    return x_(sample_[position], f);
  }

  std::size_t build(std::size_t b, std::size_t e, std::size_t depth) {
    const std::size_t idx = nodes_.size();
    nodes_.emplace_back();
    const std::size_t n = e - b;

    const auto& canon = orders_[0];
    double sum = 0.0;
    bool pure = true;
    const double first = yv_[canon[b]];
    for (std::size_t i = b; i < e; ++i) {
      sum += yv_[canon[i]];
      pure = pure && yv_[canon[i]] == first;
    }
    nodes_[idx].value = sum / static_cast<double>(n);

    const std::size_t min_leaf = std::max<std::size_t>(options_.min_leaf, 1);
    if (pure || n < 2 * min_leaf ||
        (options_.max_depth > 0 && depth >= options_.max_depth)) {
      return idx;
    }

    // Features are drawn without replacement until mtry of them vary
    // within the node or none are left.
    const std::size_t p = x_.cols();
    const bool subsample = options_.mtry > 0 && options_.mtry < p;
    const std::size_t wanted = subsample ? options_.mtry : p;
    std::iota(features_.begin(), features_.end(), std::size_t{0});

    bool found = false;
    double best_gain = 0.0, best_threshold = 0.0;
    std::size_t best_feature = 0, best_left = 0;
    std::size_t varying = 0;
    for (std::size_t t = 0; t < p && varying < wanted; ++t) {
      if (subsample) {
        const std::size_t j = t + static_cast<std::size_t>(rng_->uniform_index(p - t));
        std::swap(features_[t], features_[j]);
      }
      const std::size_t f = features_[t];
      const auto& order = orders_[f];
      if (!(value(order[b], f) < value(order[e - 1], f))) continue;
      ++varying;
      double left_sum = 0.0;
      for (std::size_t i = b; i + 1 < e; ++i) {
        left_sum += yv_[order[i]];
        const std::size_t nl = i + 1 - b;
        const std::size_t nr = n - nl;
        if (nl < min_leaf) continue;
        if (nr < min_leaf) break;
        const double lo = value(order[i], f);
        const double hi = value(order[i + 1], f);
        if (!(lo < hi)) continue;
        const double right_sum = sum - left_sum;
        const double gain = left_sum * left_sum / static_cast<double>(nl) +
                            right_sum * right_sum / static_cast<double>(nr);
        const bool better = gain > best_gain || (gain == best_gain && f < best_feature);
        if (!found || better) {
          found = true;
          best_gain = gain;
          best_feature = f;
          best_left = nl;
          double mid = lo + (hi - lo) / 2.0;
          if (!(mid < hi)) mid = lo;
          best_threshold = mid;
        }
      }
    }
    if (!found) return idx;

    for (std::size_t i = b; i < e; ++i) {
      const std::size_t k = orders_[best_feature][i];
      go_left_[k] = value(k, best_feature) <= best_threshold;
    }
    for (auto& order : orders_) {
      std::size_t l = b, r = 0;
      for (std::size_t i = b; i < e; ++i) {
        const std::size_t k = order[i];
        if (go_left_[k]) {
          order[l++] = k;
        } else {
          scratch_[r++] = k;
        }
      }
      std::copy(scratch_.begin(), scratch_.begin() + r, order.begin() + l);
    }

    nodes_[idx].feature = static_cast<int>(best_feature);
    nodes_[idx].threshold = best_threshold;
    const std::size_t left = build(b, b + best_left, depth + 1);
    const std::size_t right = build(b + best_left, e, depth + 1);
    nodes_[idx].left = static_cast<int>(left);
    nodes_[idx].right = static_cast<int>(right);
    return idx;
  }

  const FeatureMatrix& x_;
  std::span<const std::size_t> sample_;
  TreeOptions options_;
  SplitMix64* rng_;
  std::vector<double> yv_;
  std::vector<std::vector<std::size_t>> orders_;
  std::vector<char> go_left_;
  std::vector<std::size_t> scratch_;
  std::vector<std::size_t> features_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

RegressionTree grow_tree(const FeatureMatrix& x, std::span<const double> y,
                         std::span<const std::size_t> sample,
                         const SortedColumns& sorted, const TreeOptions& options,
                         SplitMix64* rng) {
  if (sample.empty()) {
    throw Error(ErrorCode::kTooFewRows, "cannot grow a tree on zero rows");
  }
  if (options.mtry > 0 && options.mtry < x.cols() && rng == nullptr) {
    throw std::invalid_argument("feature subsampling needs an rng");
  }
  return RegressionTree(Grower(x, y, sample, sorted, options, rng).run());
}

RegressionTree grow_tree(const FeatureMatrix& x, std::span<const double> y,
                         const TreeOptions& options) {
  std::vector<std::size_t> all(x.rows());
  std::iota(all.begin(), all.end(), std::size_t{0});
  TreeOptions o = options;
  o.mtry = 0;
  return grow_tree(x, y, all, SortedColumns(x), o, nullptr);
}

}  // namespace promptpower
