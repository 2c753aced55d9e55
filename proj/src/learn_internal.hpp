// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfraud/learn.hpp"
#include "cfraud/seed.hpp"

namespace cfraud::detail {

/// Row-major training data.
struct TrainingView {
  std::span<const double> x;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::span<const int> y;

  std::span<const double> row(std::size_t r) const { return x.subspan(r * cols, cols); }
};

struct TreeNode {
  int feature = -1;  // -1: leaf
  double threshold = 0;
  int left = -1;
  int right = -1;
  double prob = 0;  // weighted fraud fraction at the node
};

/// Binary CART tree on weighted Gini impurity. Rows go left when x <= threshold.
struct Tree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> x) const;
  nlohmann::json to_json() const;
  static Tree from_json(const nlohmann::json& j);
};

/// Rows with zero weight are ignored. `max_features == 0` evaluates every
/// feature at every node; otherwise features are drawn without replacement
/// from `rng` until that many non-constant ones have been evaluated.
Tree grow_tree(const TrainingView& data, std::span<const double> weights, const TreeParams& params,
               std::size_t max_features, Rng* rng);

std::shared_ptr<const Classifier> fit_tree(const TreeParams& p, const TrainingView& d);
std::shared_ptr<const Classifier> fit_forest(const ForestParams& p, std::uint64_t seed, const TrainingView& d);
std::shared_ptr<const Classifier> fit_adaboost(const AdaBoostParams& p, const TrainingView& d);

std::shared_ptr<const Classifier> tree_from_state(const nlohmann::json& j);
std::shared_ptr<const Classifier> forest_from_state(const nlohmann::json& j);
std::shared_ptr<const Classifier> adaboost_from_state(const nlohmann::json& j);

}  // namespace cfraud::detail
