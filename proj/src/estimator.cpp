// Copyright 2026 The PromptPower Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptpower/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include <Eigen/Dense>

#include "promptpower/error.hpp"
#include "promptpower/metrics.hpp"

namespace promptpower {
namespace {

using nlohmann::json;

constexpr double kCoordinateTolerance = 1e-9;
constexpr int kMaxCoordinateSweeps = 5000;

struct Standardization {
  std::vector<double> center;
  std::vector<double> scale;
  std::vector<bool> constant;
};

// Population scaling. Constant columns keep scale 1 and centre on their
// value, so they standardize to exactly zero.
Standardization standardize(const FeatureMatrix& x) {
  Standardization s;
  const std::size_t n = x.rows();
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double sum = 0.0;
    bool constant = true;
    for (std::size_t i = 0; i < n; ++i) {
      sum += x(i, j);
      constant = constant && x(i, j) == x(0, j);
    }
    if (constant) {
      s.center.push_back(x(0, j));
      s.scale.push_back(1.0);
      s.constant.push_back(true);
      continue;
    }
    const double m = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (x(i, j) - m) * (x(i, j) - m);
    s.center.push_back(m);
    s.scale.push_back(std::sqrt(ss / static_cast<double>(n)));
    s.constant.push_back(false);
  }
  return s;
}

Eigen::MatrixXd standardized_matrix(const FeatureMatrix& x,
                                    const Standardization& s) {
  Eigen::MatrixXd z(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      z(i, j) = (x(i, j) - s.center[j]) / s.scale[j];
    }
  }
  return z;
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

json tree_to_json(const RegressionTree& tree) {
  json feature = json::array(), threshold = json::array(), left = json::array(),
       right = json::array(), value = json::array();
  for (const TreeNode& n : tree.nodes()) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
  }
  return {{"feature_index", feature}, {"threshold", threshold},
          {"left", left},             {"right", right},
          {"leaf_value", value}};
}

RegressionTree tree_from_json(const json& j) {
  const auto feature = j.at("feature_index").get<std::vector<int>>();
  const auto threshold = j.at("threshold").get<std::vector<double>>();
  const auto left = j.at("left").get<std::vector<int>>();
  const auto right = j.at("right").get<std::vector<int>>();
  const auto value = j.at("leaf_value").get<std::vector<double>>();
  const std::size_t n = feature.size();
  if (threshold.size() != n || left.size() != n || right.size() != n ||
      value.size() != n) {
    throw Error(ErrorCode::kParse, "tree node arrays differ in length");
  }
  std::vector<TreeNode> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i] = {feature[i], threshold[i], left[i], right[i], value[i]};
  }
  return RegressionTree(std::move(nodes));
}

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::kLinear: return "linear";
    case Family::kElasticNet: return "elastic_net";
    case Family::kCart: return "cart";
    case Family::kRandomForest: return "random_forest";
    case Family::kGbtTree: return "gbt_tree";
    case Family::kGbtLinear: return "gbt_linear";
  }
  return "?";
}

Family parse_family(std::string_view text) {
  for (Family f : kAllFamilies) {
    if (text == to_string(f)) return f;
  }
  std::string known;
  for (Family f : kAllFamilies) {
    if (!known.empty()) known += ", ";
    known += to_string(f);
  }
  throw Error(ErrorCode::kInvalidValue,
              "unknown family '" + std::string(text) + "' (known: " + known + ")");
}

std::string_view to_string(TargetTransform t) {
  return t == TargetTransform::kLog ? "log" : "identity";
}

TargetTransform parse_transform(std::string_view text) {
  if (text == "log") return TargetTransform::kLog;
  if (text == "identity") return TargetTransform::kIdentity;
  throw Error(ErrorCode::kInvalidValue,
              "unknown target transform '" + std::string(text) + "'");
}

void validate_hyper(Family family, const Hyper& h) {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::kInvalidHyper,
                std::string(to_string(family)) + ": " + what);
  };
  switch (family) {
    case Family::kLinear:
      break;
    case Family::kElasticNet:
      if (!(h.alpha >= 0.0 && h.alpha <= 1.0)) fail("alpha must be in [0, 1]");
      if (!(h.lambda >= 0.0) || !std::isfinite(h.lambda)) fail("lambda must be >= 0");
      break;
    case Family::kCart:
      if (h.min_leaf < 1) fail("min_leaf must be >= 1");
      break;
    case Family::kRandomForest:
      if (h.min_leaf < 1) fail("min_leaf must be >= 1");
      if (h.trees < 1) fail("trees must be >= 1");
      break;
    case Family::kGbtTree:
    case Family::kGbtLinear:
      if (h.stages < 1) fail("stages must be >= 1");
      if (!(h.learning_rate > 0.0 && h.learning_rate <= 1.0)) {
        fail("learning_rate must be in (0, 1]");
      }
      if (family == Family::kGbtTree && h.max_depth < 1) {
        fail("max_depth must be >= 1");
      }
      if (family == Family::kGbtLinear &&
          (!(h.ridge_lambda > 0.0) || !std::isfinite(h.ridge_lambda))) {
        fail("ridge_lambda must be > 0");
      }
      break;
  }
}

json hyper_to_json(Family family, const Hyper& h) {
  switch (family) {
    case Family::kLinear: return json::object();
    case Family::kElasticNet: return {{"alpha", h.alpha}, {"lambda", h.lambda}};
    case Family::kCart:
      return {{"min_leaf", h.min_leaf}, {"max_depth", h.max_depth}};
    case Family::kRandomForest:
      return {{"trees", h.trees},       {"mtry", h.mtry},
              {"min_leaf", h.min_leaf}, {"max_depth", h.max_depth},
              {"bootstrap", h.bootstrap}};
    case Family::kGbtTree:
      return {{"stages", h.stages},
              {"learning_rate", h.learning_rate},
              {"max_depth", h.max_depth}};
    case Family::kGbtLinear:
      return {{"stages", h.stages},
              {"learning_rate", h.learning_rate},
              {"ridge_lambda", h.ridge_lambda}};
  }
  return json::object();
}

Hyper hyper_from_json(Family family, const json& j) {
  Hyper h;
  try {
    h.alpha = j.value("alpha", h.alpha);
    h.lambda = j.value("lambda", h.lambda);
    h.min_leaf = j.value("min_leaf", h.min_leaf);
    h.max_depth = j.value("max_depth", h.max_depth);
    h.trees = j.value("trees", h.trees);
    h.mtry = j.value("mtry", h.mtry);
    h.bootstrap = j.value("bootstrap", h.bootstrap);
    h.stages = j.value("stages", h.stages);
    h.learning_rate = j.value("learning_rate", h.learning_rate);
    h.ridge_lambda = j.value("ridge_lambda", h.ridge_lambda);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidHyper, e.what());
  }
  validate_hyper(family, h);
  return h;
}

std::string describe_hyper(Family family, const Hyper& h) {
  const json j = hyper_to_json(family, h);
  return j.empty() ? std::string("-") : j.dump();
}

std::vector<Hyper> default_grid(Family family, std::size_t p) {
  std::vector<Hyper> grid;
  switch (family) {
    case Family::kLinear:
      grid.emplace_back();
      break;
    case Family::kElasticNet:
      for (double alpha : {0.0, 0.5, 1.0}) {
        for (double lambda : {1e-4, 1e-3, 1e-2, 1e-1, 1e0, 1e1}) {
          Hyper h;
          h.alpha = alpha;
          h.lambda = lambda;
          grid.push_back(h);
        }
      }
      break;
    case Family::kCart:
      for (std::size_t leaf : {3, 5, 10}) {
        Hyper h;
        h.min_leaf = leaf;
        grid.push_back(h);
      }
      break;
    case Family::kRandomForest: {
      const auto third = std::max<std::size_t>(1, p / 3);
      const auto root = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(p)))));
      for (std::size_t m : {third, root}) {
        if (!grid.empty() && grid.back().mtry == m) continue;
        Hyper h;
        h.trees = 500;
        h.min_leaf = 1;
        h.mtry = m;
        grid.push_back(h);
      }
      break;
    }
    case Family::kGbtTree:
      for (std::size_t stages : {100, 300}) {
        for (double eta : {0.05, 0.1}) {
          for (std::size_t depth : {3, 5}) {
            Hyper h;
            h.stages = stages;
            h.learning_rate = eta;
            h.max_depth = depth;
            grid.push_back(h);
          }
        }
      }
      break;
    case Family::kGbtLinear:
      for (std::size_t stages : {100, 300}) {
        for (double eta : {0.05, 0.1}) {
          Hyper h;
          h.stages = stages;
          h.learning_rate = eta;
          grid.push_back(h);
        }
      }
      break;
  }
  return grid;
}

TrainedEstimator fit(Family family, const FeatureMatrix& x,
                     std::span<const double> y, const Hyper& hyper,
                     std::uint64_t seed, const FitOptions& options) {
  if (x.rows() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(x.rows()) + " rows but " +
                    std::to_string(y.size()) + " targets");
  }
  if (x.rows() < 2) {
    throw Error(ErrorCode::kTooFewRows, "fit needs at least 2 rows");
  }
  if (x.cols() < 1) {
    throw Error(ErrorCode::kSchemaMismatch, "feature matrix has no columns");
  }
  validate_hyper(family, hyper);

  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(y[i]) ||
        (options.transform == TargetTransform::kLog && !(y[i] > 0.0))) {
      throw Error(ErrorCode::kInvalidValue,
                  "target " + std::to_string(i) + " is not finite" +
                      (options.transform == TargetTransform::kLog
                           ? " and positive"
                           : ""));
    }
    t[i] = options.transform == TargetTransform::kLog ? std::log(y[i]) : y[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (double v : x.row(i)) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNonFiniteFeature,
                    "row " + std::to_string(i) + " has a non-finite feature");
      }
    }
  }

  TrainedEstimator m;
  m.family_ = family;
  m.schema_version_ = options.schema_version;
  m.feature_count_ = p;
  m.train_seed_ = seed;
  m.transform_ = options.transform;
  m.hyper_ = hyper;

  const double t_mean = mean(t);

  switch (family) {
    case Family::kLinear:
    case Family::kElasticNet:
    case Family::kGbtLinear: {
      const Standardization s = standardize(x);
      m.center_ = s.center;
      m.scale_ = s.scale;
      std::vector<Eigen::Index> active;
      for (std::size_t j = 0; j < p; ++j) {
        if (!s.constant[j]) active.push_back(static_cast<Eigen::Index>(j));
      }
      const Eigen::MatrixXd z_all = standardized_matrix(x, s);
      Eigen::MatrixXd z(n, active.size());
      for (std::size_t k = 0; k < active.size(); ++k) z.col(k) = z_all.col(active[k]);
      Eigen::VectorXd tc(n);
      for (std::size_t i = 0; i < n; ++i) tc(i) = t[i] - t_mean;

      m.coef_.assign(p, 0.0);
      m.intercept_ = t_mean;

      if (family == Family::kLinear) {
        if (!active.empty()) {
          Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(z);
          if (qr.rank() < static_cast<Eigen::Index>(active.size())) {
            throw Error(ErrorCode::kSingularDesign,
                        "design matrix has rank " + std::to_string(qr.rank()) +
                            " < " + std::to_string(active.size()) +
                            " non-constant features; try elastic_net");
          }
          const Eigen::VectorXd beta = qr.solve(tc);
          for (std::size_t k = 0; k < active.size(); ++k) {
            m.coef_[active[k]] = beta(k);
          }
        }
      } else if (family == Family::kElasticNet) {
        const std::size_t q = active.size();
        const double l1 = hyper.lambda * hyper.alpha;
        const double denom = 1.0 + hyper.lambda * (1.0 - hyper.alpha);
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(q);
        Eigen::VectorXd r = tc;
        const double inv_n = 1.0 / static_cast<double>(n);
        for (int sweep = 0; sweep < kMaxCoordinateSweeps; ++sweep) {
          double max_delta = 0.0;
          for (std::size_t k = 0; k < q; ++k) {
            const double old = beta(k);
            const double rho = z.col(k).dot(r) * inv_n + old;
            const double next = soft_threshold(rho, l1) / denom;
            if (next != old) {
              r -= (next - old) * z.col(k);
              beta(k) = next;
              max_delta = std::max(max_delta, std::abs(next - old));
            }
          }
          if (max_delta < kCoordinateTolerance) break;
        }
        for (std::size_t k = 0; k < q; ++k) m.coef_[active[k]] = beta(k);
      } else {
        m.base_ = t_mean;
        m.shrinkage_ = hyper.learning_rate;
        const std::size_t q = active.size();
        Eigen::MatrixXd gram = z.transpose() * z;
        gram.diagonal().array() += hyper.ridge_lambda;
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
        std::vector<double> f(n, t_mean);
        for (std::size_t stage = 0; stage < hyper.stages; ++stage) {
          Eigen::VectorXd r(n);
          for (std::size_t i = 0; i < n; ++i) r(i) = t[i] - f[i];
          const double b0 = r.mean();
          r.array() -= b0;
          Eigen::VectorXd beta =
              q > 0 ? Eigen::VectorXd(ldlt.solve(z.transpose() * r))
                    : Eigen::VectorXd();
          std::vector<double> coefs(p, 0.0);
          for (std::size_t k = 0; k < q; ++k) coefs[active[k]] = beta(k);
          m.stage_intercepts_.push_back(b0);
          m.stage_coefs_.push_back(std::move(coefs));
          for (std::size_t i = 0; i < n; ++i) {
            double s_out = b0;
            for (std::size_t k = 0; k < q; ++k) s_out += beta(k) * z(i, k);
            f[i] += m.shrinkage_ * s_out;
          }
        }
        m.coef_.clear();
        m.intercept_ = 0.0;
      }
      break;
    }
    case Family::kCart: {
      TreeOptions o;
      o.min_leaf = hyper.min_leaf;
      o.max_depth = hyper.max_depth;
      m.trees_.push_back(grow_tree(x, t, o));
      break;
    }
    case Family::kRandomForest: {
      const SortedColumns sorted(x);
      TreeOptions o;
      o.min_leaf = hyper.min_leaf;
      o.max_depth = hyper.max_depth;
      o.mtry = hyper.mtry;
      std::vector<std::size_t> sample(n);
      for (std::size_t b = 0; b < hyper.trees; ++b) {
        SplitMix64 rng(seed + b);
        if (hyper.bootstrap) {
          for (auto& s : sample) s = static_cast<std::size_t>(rng.uniform_index(n));
        } else {
          std::iota(sample.begin(), sample.end(), std::size_t{0});
        }
        m.trees_.push_back(grow_tree(x, t, sample, sorted, o, &rng));
      }
      break;
    }
    case Family::kGbtTree: {
      const SortedColumns sorted(x);
      TreeOptions o;
      o.min_leaf = 1;
      o.max_depth = hyper.max_depth;
      std::vector<std::size_t> all(n);
      std::iota(all.begin(), all.end(), std::size_t{0});
      m.base_ = t_mean;
      m.shrinkage_ = hyper.learning_rate;
      std::vector<double> f(n, t_mean), r(n);
      for (std::size_t stage = 0; stage < hyper.stages; ++stage) {
        for (std::size_t i = 0; i < n; ++i) r[i] = t[i] - f[i];
        RegressionTree tree = grow_tree(x, r, all, sorted, o, nullptr);
        for (std::size_t i = 0; i < n; ++i) {
          f[i] += m.shrinkage_ * tree.predict(x.row(i));
        }
        m.trees_.push_back(std::move(tree));
      }
      break;
    }
  }
  m.id_ = m.compute_id();
  return m;
}

double TrainedEstimator::predict_transformed(std::span<const double> x) const {
  switch (family_) {
    case Family::kLinear:
    case Family::kElasticNet: {
      double out = intercept_;
      for (std::size_t j = 0; j < feature_count_; ++j) {
        if (coef_[j] != 0.0) out += coef_[j] * standardized(x, j);
      }
      return out;
    }
    case Family::kGbtLinear: {
      double out = base_;
      for (std::size_t s = 0; s < stage_coefs_.size(); ++s) {
        double stage = stage_intercepts_[s];
        for (std::size_t j = 0; j < feature_count_; ++j) {
          if (stage_coefs_[s][j] != 0.0) {
            stage += stage_coefs_[s][j] * standardized(x, j);
          }
        }
        out += shrinkage_ * stage;
      }
      return out;
    }
    case Family::kCart:
      return trees_.front().predict(x);
    case Family::kRandomForest: {
      double sum = 0.0;
      for (const RegressionTree& tree : trees_) sum += tree.predict(x);
      return sum / static_cast<double>(trees_.size());
    }
    case Family::kGbtTree: {
      double out = base_;
      for (const RegressionTree& tree : trees_) out += shrinkage_ * tree.predict(x);
      return out;
    }
  }
  return 0.0;
}

double TrainedEstimator::predict(std::span<const double> x) const {
  if (x.size() != feature_count_) {
    throw Error(ErrorCode::kSchemaMismatch,
                "expected " + std::to_string(feature_count_) +
                    " features, got " + std::to_string(x.size()));
  }
  const double v = predict_transformed(x);
  return transform_ == TargetTransform::kLog ? std::exp(v) : v;
}

double TrainedEstimator::predict(const FeatureVector& x) const {
  if (x.schema_version != schema_version_) {
    throw Error(ErrorCode::kSchemaMismatch,
                "model expects feature schema " +
                    std::to_string(schema_version_) + ", got " +
                    std::to_string(x.schema_version));
  }
  return predict(std::span<const double>(x.values));
}

std::vector<double> TrainedEstimator::predict(const FeatureMatrix& x) const {
  std::vector<double> out;
  out.reserve(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out.push_back(predict(x.row(i)));
  return out;
}

std::vector<double> TrainedEstimator::raw_coefficients() const {
  std::vector<double> out(coef_.size());
  for (std::size_t j = 0; j < coef_.size(); ++j) out[j] = coef_[j] / scale_[j];
  return out;
}

double TrainedEstimator::raw_intercept() const {
  double b = intercept_;
  for (std::size_t j = 0; j < coef_.size(); ++j) {
    b -= coef_[j] * center_[j] / scale_[j];
  }
  return b;
}

std::vector<double> TrainedEstimator::tree_outputs(std::span<const double> x) const {
  std::vector<double> out;
  for (const RegressionTree& tree : trees_) out.push_back(tree.predict(x));
  return out;
}

json TrainedEstimator::to_json() const {
  json params;
  switch (family_) {
    case Family::kLinear:
    case Family::kElasticNet:
      params = {{"center", center_},
                {"scale", scale_},
                {"coefficients", coef_},
                {"intercept", intercept_}};
      break;
    case Family::kGbtLinear: {
      json stages = json::array();
      for (std::size_t s = 0; s < stage_coefs_.size(); ++s) {
        stages.push_back({{"intercept", stage_intercepts_[s]},
                          {"coefficients", stage_coefs_[s]}});
      }
      params = {{"center", center_},
                {"scale", scale_},
                {"base", base_},
                {"shrinkage", shrinkage_},
                {"stages", stages}};
      break;
    }
    case Family::kCart:
    case Family::kRandomForest:
    case Family::kGbtTree: {
      json trees = json::array();
      for (const RegressionTree& t : trees_) trees.push_back(tree_to_json(t));
      params = {{"base", base_}, {"shrinkage", shrinkage_}, {"trees", trees}};
      break;
    }
  }
  return {{"format_version", kArtifactFormatVersion},
          {"family", to_string(family_)},
          {"schema_version", schema_version_},
          {"feature_count", feature_count_},
          {"train_seed", train_seed_},
          {"target_transform", to_string(transform_)},
          {"hyper", hyper_to_json(family_, hyper_)},
          {"parameters", params}};
}

TrainedEstimator TrainedEstimator::from_json(const json& j) {
  TrainedEstimator m;
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kArtifactFormatVersion) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "artifact format " + std::to_string(version) +
                      " is not supported");
    }
    m.family_ = parse_family(j.at("family").get<std::string>());
    m.schema_version_ = j.at("schema_version").get<int>();
    m.feature_count_ = j.at("feature_count").get<std::size_t>();
    m.train_seed_ = j.at("train_seed").get<std::uint64_t>();
    m.transform_ = parse_transform(j.at("target_transform").get<std::string>());
    m.hyper_ = hyper_from_json(m.family_, j.at("hyper"));
    const json& p = j.at("parameters");
    const std::size_t d = m.feature_count_;
    auto check_len = [&](const std::vector<double>& v, const char* what) {
      if (v.size() != d) {
        throw Error(ErrorCode::kParse, std::string(what) + " has " +
                                           std::to_string(v.size()) +
                                           " entries, expected " +
                                           std::to_string(d));
      }
    };
    switch (m.family_) {
      case Family::kLinear:
      case Family::kElasticNet:
        m.center_ = p.at("center").get<std::vector<double>>();
        m.scale_ = p.at("scale").get<std::vector<double>>();
        m.coef_ = p.at("coefficients").get<std::vector<double>>();
        m.intercept_ = p.at("intercept").get<double>();
        check_len(m.center_, "center");
        check_len(m.scale_, "scale");
        check_len(m.coef_, "coefficients");
        break;
      case Family::kGbtLinear:
        m.center_ = p.at("center").get<std::vector<double>>();
        m.scale_ = p.at("scale").get<std::vector<double>>();
        m.base_ = p.at("base").get<double>();
        m.shrinkage_ = p.at("shrinkage").get<double>();
        check_len(m.center_, "center");
        check_len(m.scale_, "scale");
        for (const json& s : p.at("stages")) {
          m.stage_intercepts_.push_back(s.at("intercept").get<double>());
          m.stage_coefs_.push_back(s.at("coefficients").get<std::vector<double>>());
          check_len(m.stage_coefs_.back(), "stage coefficients");
        }
        if (m.stage_coefs_.empty()) {
          throw Error(ErrorCode::kParse, "gbt_linear artifact has no stages");
        }
        break;
      case Family::kCart:
      case Family::kRandomForest:
      case Family::kGbtTree:
        m.base_ = p.at("base").get<double>();
        m.shrinkage_ = p.at("shrinkage").get<double>();
        for (const json& t : p.at("trees")) {
          m.trees_.push_back(tree_from_json(t));
          if (m.trees_.back().max_feature() >= static_cast<int>(d)) {
            throw Error(ErrorCode::kParse, "tree references a missing feature");
          }
        }
        if (m.trees_.empty() ||
            (m.family_ == Family::kCart && m.trees_.size() != 1)) {
          throw Error(ErrorCode::kParse, "artifact has a bad tree count");
        }
        break;
    }
    for (double s : m.scale_) {
      if (!(s > 0.0)) throw Error(ErrorCode::kParse, "scale entries must be > 0");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("model artifact: ") + e.what());
  }
  m.id_ = m.compute_id();
  return m;
}

TrainedEstimator TrainedEstimator::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  return from_json(j);
}

void TrainedEstimator::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << to_json().dump() << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

std::string TrainedEstimator::compute_id() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json().dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace promptpower
