// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfraud/features.hpp"
#include "cfraud/mlp.hpp"

namespace cfraud {

enum class ClassifierKind { KNN, GaussianNB, DecisionTree, RandomForest, AdaBoost, MLP };

inline constexpr ClassifierKind kAllClassifierKinds[] = {
    ClassifierKind::KNN,          ClassifierKind::GaussianNB, ClassifierKind::DecisionTree,
    ClassifierKind::RandomForest, ClassifierKind::AdaBoost,   ClassifierKind::MLP};

struct KnnParams {
  std::size_t k = 5;
};

struct TreeParams {
  std::size_t max_depth = 0;  // 0: unlimited
  std::size_t min_leaf = 1;
};

struct ForestParams {
  std::size_t n_trees = 200;
  std::size_t max_features = 0;  // 0: floor(sqrt(feature count)), at least 1
  bool bootstrap = true;
  TreeParams tree;
};

struct AdaBoostParams {
  std::size_t rounds = 100;
};

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::RandomForest;
  KnnParams knn;
  TreeParams tree;
  ForestParams forest;
  AdaBoostParams adaboost;
  MlpParams mlp;
  std::uint64_t seed = 0;

  static ClassifierSpec of(ClassifierKind kind, std::uint64_t seed = 0) {
    ClassifierSpec s;
    s.kind = kind;
    s.seed = seed;
    return s;
  }
};

/// Short names: knn, nb, tree, rf, adaboost, mlp.
std::string_view to_string(ClassifierKind k);
ClassifierKind parse_classifier_kind(std::string_view s);

/// "rf" or "rf:n_trees=50,max_features=3". Recognized keys per kind:
/// knn: k; tree: max_depth, min_leaf; rf: n_trees, max_features, bootstrap,
/// max_depth, min_leaf; adaboost: rounds; mlp: hidden, epochs, lr, momentum,
/// weight_decay, batch, noise_std.
ClassifierSpec parse_classifier_spec(std::string_view s);
std::string describe(const ClassifierSpec& spec);

/// Fitted parameters of one classifier kind.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual ClassifierKind kind() const = 0;
  /// P(fraud) for one raw (unstandardized) feature row.
  virtual double predict_proba(std::span<const double> x) const = 0;
  virtual nlohmann::json state() const = 0;
};

/// Immutable fitted model bound to the feature schema it was trained on.
/// Copies share the fitted state; safe to use from several threads.
class Model {
 public:
  Model() = default;
  Model(SchemaPtr schema, std::shared_ptr<const Classifier> impl);

  ClassifierKind kind() const { return impl_->kind(); }
  const SchemaPtr& schema() const noexcept { return schema_; }
  const Classifier& impl() const { return *impl_; }
  explicit operator bool() const noexcept { return impl_ != nullptr; }

  /// Throws SchemaError when the vector's schema differs from training.
  double predict_proba(const FeatureVector& x) const;
  std::vector<double> predict_proba(const FeatureMatrix& m) const;
  /// Row in training-schema order; only the length is checked.
  double predict_row(std::span<const double> x) const;

  nlohmann::json to_json() const;
  static Model from_json(const nlohmann::json& j);

 private:
  SchemaPtr schema_;
  std::shared_ptr<const Classifier> impl_;
};

/// Deterministic in (spec, data, seed). Throws InvalidArgument on
/// single-class data, size mismatch or non-finite features.
Model fit_classifier(const ClassifierSpec& spec, const FeatureMatrix& train, std::span<const int> labels);

inline double predict_proba(const Model& model, const FeatureVector& x) { return model.predict_proba(x); }

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

/// Per-feature z-scoring with training mean/std; zero-variance columns pass
/// through centered.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(std::span<const double> rows, std::size_t cols);
  void apply(std::span<const double> in, std::span<double> out) const;
  std::vector<double> apply_rows(std::span<const double> rows) const;
};

}  // namespace cfraud
