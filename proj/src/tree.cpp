// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cfraud/corpus.hpp"
#include "cfraud/error.hpp"
#include "learn_internal.hpp"

namespace cfraud::detail {

namespace {

using nlohmann::json;

double impurity_mass(double w, double w1) {
  // w * gini
  return w - (w1 * w1 + (w - w1) * (w - w1)) / w;
}

class Grower {
 public:
  Grower(const TrainingView& d, std::span<const double> w, const TreeParams& p, std::size_t max_features, Rng* rng)
      : d_(d), w_(w), p_(p), max_features_(max_features), rng_(rng) {
    if (p_.min_leaf == 0) p_.min_leaf = 1;
    all_features_.resize(d_.cols);
    std::iota(all_features_.begin(), all_features_.end(), std::size_t{0});
  }

  Tree grow() {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < d_.rows; ++r)
      if (w_[r] > 0) rows.push_back(r);
    if (rows.empty()) throw InvalidArgument("grow_tree: no rows with positive weight");
    build(rows, 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    std::size_t feature = 0;
    double threshold = 0;
    double score = std::numeric_limits<double>::infinity();
    bool found = false;
  };

  int build(std::vector<std::size_t>& rows, std::size_t depth) {
    double W = 0, W1 = 0;
    for (auto r : rows) {
      W += w_[r];
      if (d_.y[r] == kFraud) W1 += w_[r];
    }
    const int idx = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back({-1, 0, -1, -1, W1 / W});
    const bool pure = W1 == 0 || W1 == W;
    if (pure || (p_.max_depth > 0 && depth >= p_.max_depth) || rows.size() < 2 * p_.min_leaf) return idx;

    const Split best = find_split(rows, W, W1);
    if (!best.found) return idx;

    std::vector<std::size_t> left, right;
    for (auto r : rows) (d_.x[r * d_.cols + best.feature] <= best.threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    const int l = build(left, depth + 1);
    const int rr = build(right, depth + 1);
    auto& node = tree_.nodes[static_cast<std::size_t>(idx)];
    node.feature = static_cast<int>(best.feature);
    node.threshold = best.threshold;
    node.left = l;
    node.right = rr;
    return idx;
  }

  Split find_split(const std::vector<std::size_t>& rows, double W, double W1) {
    Split best;
    if (max_features_ == 0 || max_features_ >= d_.cols) {
      for (std::size_t f = 0; f < d_.cols; ++f) evaluate(f, rows, W, W1, best);
      return best;
    }
    auto& order = all_features_;
    std::size_t evaluated = 0;
    for (std::size_t i = 0; i < order.size() && evaluated < max_features_; ++i) {
      std::swap(order[i], order[i + uniform_index(*rng_, order.size() - i)]);
      if (evaluate(order[i], rows, W, W1, best)) ++evaluated;
    }
    return best;
  }

  /// Returns false when the feature is constant within the node.
  bool evaluate(std::size_t f, const std::vector<std::size_t>& rows, double W, double W1, Split& best) {
    buf_.clear();
    for (auto r : rows) buf_.emplace_back(d_.x[r * d_.cols + f], r);
    std::sort(buf_.begin(), buf_.end());
    if (buf_.front().first == buf_.back().first) return false;
    double wl = 0, wl1 = 0;
    const std::size_t n = buf_.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto r = buf_[i].second;
      wl += w_[r];
      if (d_.y[r] == kFraud) wl1 += w_[r];
      const double a = buf_[i].first, b = buf_[i + 1].first;
      if (a == b) continue;
      const std::size_t nl = i + 1;
      if (nl < p_.min_leaf || n - nl < p_.min_leaf) continue;
      const double score = impurity_mass(wl, wl1) + impurity_mass(W - wl, W1 - wl1);
      if (score < best.score || (score == best.score && best.found && f < best.feature)) {
        double thr = a + (b - a) / 2.0;
        if (!(thr < b) || thr < a) thr = a;
        best = {f, thr, score, true};
      }
    }
    return true;
  }

  const TrainingView& d_;
  std::span<const double> w_;
  TreeParams p_;
  std::size_t max_features_;
  Rng* rng_;
  Tree tree_;
  std::vector<std::size_t> all_features_;
  std::vector<std::pair<double, std::size_t>> buf_;
};

void check_view(const TrainingView& d) {
  if (d.rows == 0 || d.cols == 0) throw InvalidArgument("empty training data");
}

class TreeClassifier final : public Classifier {
 public:
  explicit TreeClassifier(Tree t) : tree_(std::move(t)) {}
  ClassifierKind kind() const override { return ClassifierKind::DecisionTree; }
  double predict_proba(std::span<const double> x) const override { return tree_.predict(x); }
  json state() const override { return {{"tree", tree_.to_json()}}; }

 private:
  Tree tree_;
};

class ForestClassifier final : public Classifier {
 public:
  explicit ForestClassifier(std::vector<Tree> trees) : trees_(std::move(trees)) {}
  ClassifierKind kind() const override { return ClassifierKind::RandomForest; }
  double predict_proba(std::span<const double> x) const override {
    double s = 0;
    for (const auto& t : trees_) s += t.predict(x);
    return s / static_cast<double>(trees_.size());
  }
  json state() const override {
    json trees = json::array();
    for (const auto& t : trees_) trees.push_back(t.to_json());
    return {{"trees", trees}};
  }

 private:
  std::vector<Tree> trees_;
};

class AdaBoostClassifier final : public Classifier {
 public:
  AdaBoostClassifier(std::vector<Tree> stumps, std::vector<double> alphas, double prior)
      : stumps_(std::move(stumps)), alphas_(std::move(alphas)), prior_(prior) {}
  ClassifierKind kind() const override { return ClassifierKind::AdaBoost; }
  double predict_proba(std::span<const double> x) const override {
    if (stumps_.empty()) return prior_;
    double f = 0, total = 0;
    for (std::size_t m = 0; m < stumps_.size(); ++m) {
      f += alphas_[m] * (stumps_[m].predict(x) >= 0.5 ? 1.0 : -1.0);
      total += alphas_[m];
    }
    return 1.0 / (1.0 + std::exp(-f / total));
  }
  json state() const override {
    json stumps = json::array();
    for (const auto& t : stumps_) stumps.push_back(t.to_json());
    return {{"stumps", stumps}, {"alphas", alphas_}, {"prior", prior_}};
  }

 private:
  std::vector<Tree> stumps_;
  std::vector<double> alphas_;
  double prior_;
};

}  // namespace

double Tree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i].prob;
}

json Tree::to_json() const {
  json f = json::array(), t = json::array(), l = json::array(), r = json::array(), p = json::array();
  for (const auto& n : nodes) {
    f.push_back(n.feature);
    t.push_back(n.threshold);
    l.push_back(n.left);
    r.push_back(n.right);
    p.push_back(n.prob);
  }
  return {{"feature", f}, {"threshold", t}, {"left", l}, {"right", r}, {"prob", p}};
}

Tree Tree::from_json(const json& j) {
  Tree tree;
  const auto& f = j.at("feature");
  const std::size_t n = f.size();
  if (n == 0) throw ParseError("tree without nodes");
  for (const char* key : {"threshold", "left", "right", "prob"})
    if (j.at(key).size() != n) throw ParseError("tree arrays differ in length");
  tree.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& node = tree.nodes[i];
    node.feature = j["feature"][i].get<int>();
    node.threshold = j["threshold"][i].get<double>();
    node.left = j["left"][i].get<int>();
    node.right = j["right"][i].get<int>();
    node.prob = j["prob"][i].get<double>();
    if (node.feature >= 0 && (node.left <= static_cast<int>(i) || node.right <= static_cast<int>(i) ||
                              node.left >= static_cast<int>(n) || node.right >= static_cast<int>(n)))
      throw ParseError("tree child index out of range");
  }
  return tree;
}

Tree grow_tree(const TrainingView& data, std::span<const double> weights, const TreeParams& params,
               std::size_t max_features, Rng* rng) {
  check_view(data);
  if (max_features != 0 && max_features < data.cols && rng == nullptr)
    throw InvalidArgument("grow_tree: feature sampling needs a generator");
  return Grower(data, weights, params, max_features, rng).grow();
}

std::shared_ptr<const Classifier> fit_tree(const TreeParams& p, const TrainingView& d) {
  const std::vector<double> w(d.rows, 1.0);
  return std::make_shared<TreeClassifier>(grow_tree(d, w, p, 0, nullptr));
}

std::shared_ptr<const Classifier> fit_forest(const ForestParams& p, std::uint64_t seed, const TrainingView& d) {
  check_view(d);
  if (p.n_trees == 0) throw InvalidArgument("random forest needs at least one tree");
  std::size_t mf = p.max_features;
  if (mf == 0) mf = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d.cols)))));
  std::vector<Tree> trees;
  trees.reserve(p.n_trees);
  std::vector<double> w(d.rows);
  for (std::size_t t = 0; t < p.n_trees; ++t) {
    Rng rng = make_rng(derive_seed(seed, t));
    if (p.bootstrap) {
      std::fill(w.begin(), w.end(), 0.0);
      for (std::size_t i = 0; i < d.rows; ++i) w[uniform_index(rng, d.rows)] += 1.0;
    } else {
      std::fill(w.begin(), w.end(), 1.0);
    }
    trees.push_back(grow_tree(d, w, p.tree, mf, &rng));
  }
  return std::make_shared<ForestClassifier>(std::move(trees));
}

std::shared_ptr<const Classifier> fit_adaboost(const AdaBoostParams& p, const TrainingView& d) {
  check_view(d);
  const double n = static_cast<double>(d.rows);
  std::vector<double> w(d.rows, 1.0 / n);
  double prior = 0;
  for (std::size_t r = 0; r < d.rows; ++r) prior += d.y[r] == kFraud;
  prior /= n;
  TreeParams stump;
  stump.max_depth = 1;
  std::vector<Tree> stumps;
  std::vector<double> alphas;
  std::vector<char> miss(d.rows);
  for (std::size_t m = 0; m < p.rounds; ++m) {
    Tree t = grow_tree(d, w, stump, 0, nullptr);
    double err = 0, total = 0;
    for (std::size_t r = 0; r < d.rows; ++r) {
      const int pred = t.predict(d.row(r)) >= 0.5 ? kFraud : kNotFraud;
      miss[r] = pred != d.y[r];
      if (miss[r]) err += w[r];
      total += w[r];
    }
    err /= total;
    if (err <= 0) {
      stumps.push_back(std::move(t));
      alphas.push_back(1.0);
      break;
    }
    if (err >= 0.5) break;
    const double alpha = std::log((1.0 - err) / err);
    stumps.push_back(std::move(t));
    alphas.push_back(alpha);
    double s = 0;
    for (std::size_t r = 0; r < d.rows; ++r) {
      if (miss[r]) w[r] *= std::exp(alpha);
      s += w[r];
    }
    for (auto& v : w) v /= s;
  }
  return std::make_shared<AdaBoostClassifier>(std::move(stumps), std::move(alphas), prior);
}

std::shared_ptr<const Classifier> tree_from_state(const json& j) {
  return std::make_shared<TreeClassifier>(Tree::from_json(j.at("tree")));
}

std::shared_ptr<const Classifier> forest_from_state(const json& j) {
  std::vector<Tree> trees;
  for (const auto& t : j.at("trees")) trees.push_back(Tree::from_json(t));
  if (trees.empty()) throw ParseError("forest without trees");
  return std::make_shared<ForestClassifier>(std::move(trees));
}

std::shared_ptr<const Classifier> adaboost_from_state(const json& j) {
  std::vector<Tree> stumps;
  for (const auto& t : j.at("stumps")) stumps.push_back(Tree::from_json(t));
  auto alphas = j.at("alphas").get<std::vector<double>>();
  if (alphas.size() != stumps.size()) throw ParseError("adaboost weights and stumps differ in count");
  return std::make_shared<AdaBoostClassifier>(std::move(stumps), std::move(alphas), j.at("prior").get<double>());
}

}  // namespace cfraud::detail
