// SPDX-License-Identifier: Apache-2.0
#include "cfraud/learn.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cfraud/corpus.hpp"
#include "cfraud/error.hpp"
#include "learn_internal.hpp"

namespace cfraud {

using nlohmann::json;
using detail::TrainingView;

// ---------------------------------------------------------------- standardizer

Standardizer Standardizer::fit(std::span<const double> rows, std::size_t cols) {
  if (cols == 0 || rows.size() % cols != 0) throw DimensionError("standardizer: ragged input");
  const std::size_t n = rows.size() / cols;
  if (n == 0) throw InvalidArgument("standardizer: no rows");
  Standardizer s;
  s.mean.assign(cols, 0.0);
  s.scale.assign(cols, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < cols; ++c) s.mean[c] += rows[r * cols + c];
  for (auto& m : s.mean) m /= static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const double d = rows[r * cols + c] - s.mean[c];
      s.scale[c] += d * d;
    }
  for (auto& v : s.scale) {
    v = std::sqrt(v / static_cast<double>(n));
    if (!(v > 0)) v = 1.0;
  }
  return s;
}

void Standardizer::apply(std::span<const double> in, std::span<double> out) const {
  if (in.size() != mean.size() || out.size() != mean.size()) throw DimensionError("standardizer: width mismatch");
  for (std::size_t c = 0; c < mean.size(); ++c) out[c] = (in[c] - mean[c]) / scale[c];
}

std::vector<double> Standardizer::apply_rows(std::span<const double> rows) const {
  const std::size_t cols = mean.size();
  if (cols == 0 || rows.size() % cols != 0) throw DimensionError("standardizer: ragged input");
  std::vector<double> out(rows.size());
  for (std::size_t r = 0; r < rows.size() / cols; ++r)
    apply(rows.subspan(r * cols, cols), std::span<double>(out).subspan(r * cols, cols));
  return out;
}

namespace {

json standardizer_json(const Standardizer& s) { return {{"mean", s.mean}, {"scale", s.scale}}; }

Standardizer standardizer_from(const json& j) {
  Standardizer s;
  s.mean = j.at("mean").get<std::vector<double>>();
  s.scale = j.at("scale").get<std::vector<double>>();
  if (s.mean.size() != s.scale.size()) throw ParseError("standardizer arrays differ in length");
  return s;
}

// ---------------------------------------------------------------- knn

class KnnClassifier final : public Classifier {
 public:
  KnnClassifier(std::size_t k, Standardizer s, std::vector<double> x, std::vector<int> y)
      : k_(k), std_(std::move(s)), x_(std::move(x)), y_(std::move(y)) {}

  ClassifierKind kind() const override { return ClassifierKind::KNN; }

  double predict_proba(std::span<const double> x) const override {
    const std::size_t cols = std_.mean.size();
    std::vector<double> z(cols);
    std_.apply(x, z);
    const std::size_t n = y_.size();
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t r = 0; r < n; ++r) {
      double s = 0;
      const double* row = x_.data() + r * cols;
      for (std::size_t c = 0; c < cols; ++c) s += (row[c] - z[c]) * (row[c] - z[c]);
      dist[r] = {s, r};
    }
    const std::size_t k = std::min(k_, n);
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    std::size_t fraud = 0;
    for (std::size_t i = 0; i < k; ++i) fraud += y_[dist[i].second] == kFraud;
    return static_cast<double>(fraud) / static_cast<double>(k);
  }

  json state() const override { return {{"k", k_}, {"standardizer", standardizer_json(std_)}, {"x", x_}, {"y", y_}}; }

  static std::shared_ptr<const Classifier> from_state(const json& j) {
    auto s = standardizer_from(j.at("standardizer"));
    auto x = j.at("x").get<std::vector<double>>();
    auto y = j.at("y").get<std::vector<int>>();
    if (s.mean.empty() || x.size() != y.size() * s.mean.size()) throw ParseError("knn state size mismatch");
    return std::make_shared<KnnClassifier>(j.at("k").get<std::size_t>(), std::move(s), std::move(x), std::move(y));
  }

 private:
  std::size_t k_;
  Standardizer std_;
  std::vector<double> x_;  // standardized training rows
  std::vector<int> y_;
};

std::shared_ptr<const Classifier> fit_knn(const KnnParams& p, const TrainingView& d) {
  if (p.k == 0) throw InvalidArgument("knn: k must be positive");
  auto s = Standardizer::fit(d.x, d.cols);
  auto x = s.apply_rows(d.x);
  return std::make_shared<KnnClassifier>(p.k, std::move(s), std::move(x), std::vector<int>(d.y.begin(), d.y.end()));
}

// ---------------------------------------------------------------- gaussian naive bayes

class NaiveBayesClassifier final : public Classifier {
 public:
  // index 0: not fraud, 1: fraud
  NaiveBayesClassifier(std::array<std::vector<double>, 2> mean, std::array<std::vector<double>, 2> var,
                       std::array<double, 2> prior)
      : mean_(std::move(mean)), var_(std::move(var)), prior_(prior) {}

  ClassifierKind kind() const override { return ClassifierKind::GaussianNB; }

  double predict_proba(std::span<const double> x) const override {
    std::array<double, 2> ll{};
    for (std::size_t c = 0; c < 2; ++c) {
      double s = std::log(prior_[c]);
      for (std::size_t f = 0; f < x.size(); ++f) {
        const double d = x[f] - mean_[c][f];
        s -= 0.5 * std::log(2.0 * std::numbers::pi * var_[c][f]) + d * d / (2.0 * var_[c][f]);
      }
      ll[c] = s;
    }
    return 1.0 / (1.0 + std::exp(ll[0] - ll[1]));
  }

  json state() const override {
    return {{"mean", {mean_[0], mean_[1]}}, {"var", {var_[0], var_[1]}}, {"prior", {prior_[0], prior_[1]}}};
  }

  static std::shared_ptr<const Classifier> from_state(const json& j) {
    std::array<std::vector<double>, 2> mean, var;
    std::array<double, 2> prior{};
    for (std::size_t c = 0; c < 2; ++c) {
      mean[c] = j.at("mean").at(c).get<std::vector<double>>();
      var[c] = j.at("var").at(c).get<std::vector<double>>();
      prior[c] = j.at("prior").at(c).get<double>();
      if (mean[c].size() != var[c].size()) throw ParseError("naive bayes state size mismatch");
    }
    return std::make_shared<NaiveBayesClassifier>(std::move(mean), std::move(var), prior);
  }

 private:
  std::array<std::vector<double>, 2> mean_, var_;
  std::array<double, 2> prior_;
};

std::shared_ptr<const Classifier> fit_nb(const TrainingView& d) {
  std::array<std::vector<double>, 2> mean, var;
  std::array<double, 2> count{};
  for (auto& m : mean) m.assign(d.cols, 0.0);
  for (auto& v : var) v.assign(d.cols, 0.0);
  for (std::size_t r = 0; r < d.rows; ++r) {
    const std::size_t c = d.y[r] == kFraud ? 1 : 0;
    count[c] += 1;
    for (std::size_t f = 0; f < d.cols; ++f) mean[c][f] += d.x[r * d.cols + f];
  }
  for (std::size_t c = 0; c < 2; ++c)
    for (auto& m : mean[c]) m /= count[c];
  for (std::size_t r = 0; r < d.rows; ++r) {
    const std::size_t c = d.y[r] == kFraud ? 1 : 0;
    for (std::size_t f = 0; f < d.cols; ++f) {
      const double dd = d.x[r * d.cols + f] - mean[c][f];
      var[c][f] += dd * dd;
    }
  }
  for (std::size_t c = 0; c < 2; ++c)
    for (auto& v : var[c]) v /= count[c];

  // smoothing: 1e-9 times the largest per-feature variance over all rows
  double max_var = 0;
  for (std::size_t f = 0; f < d.cols; ++f) {
    double m = 0, ss = 0;
    for (std::size_t r = 0; r < d.rows; ++r) m += d.x[r * d.cols + f];
    m /= static_cast<double>(d.rows);
    for (std::size_t r = 0; r < d.rows; ++r) ss += (d.x[r * d.cols + f] - m) * (d.x[r * d.cols + f] - m);
    max_var = std::max(max_var, ss / static_cast<double>(d.rows));
  }
  const double eps = max_var > 0 ? 1e-9 * max_var : 1e-9;
  for (auto& v : var)
    for (auto& x : v) x += eps;
  const double n = static_cast<double>(d.rows);
  return std::make_shared<NaiveBayesClassifier>(std::move(mean), std::move(var),
                                                std::array<double, 2>{count[0] / n, count[1] / n});
}

// ---------------------------------------------------------------- mlp

class MlpClassifier final : public Classifier {
 public:
  MlpClassifier(Standardizer s, MlpNetwork net) : std_(std::move(s)), net_(std::move(net)) {}

  ClassifierKind kind() const override { return ClassifierKind::MLP; }

  double predict_proba(std::span<const double> x) const override {
    std::vector<double> z(std_.mean.size());
    std_.apply(x, z);
    return net_.probabilities(z)[1];
  }

  json state() const override {
    const auto p = net_.parameters();
    return {{"standardizer", standardizer_json(std_)},
            {"inputs", net_.inputs()},
            {"hidden", net_.hidden()},
            {"parameters", std::vector<double>(p.begin(), p.end())}};
  }

  static std::shared_ptr<const Classifier> from_state(const json& j) {
    auto s = standardizer_from(j.at("standardizer"));
    MlpNetwork net(j.at("inputs").get<std::size_t>(), j.at("hidden").get<std::size_t>());
    const auto p = j.at("parameters").get<std::vector<double>>();
    if (p.size() != net.parameter_count() || s.mean.size() != net.inputs()) throw ParseError("mlp state size mismatch");
    std::copy(p.begin(), p.end(), net.parameters().begin());
    return std::make_shared<MlpClassifier>(std::move(s), std::move(net));
  }

 private:
  Standardizer std_;
  MlpNetwork net_;
};

std::shared_ptr<const Classifier> fit_mlp(const MlpParams& p, std::uint64_t seed, const TrainingView& d) {
  auto s = Standardizer::fit(d.x, d.cols);
  const auto z = s.apply_rows(d.x);
  MlpNetwork net(d.cols, p.hidden == 0 ? d.cols : p.hidden);
  Rng rng = make_rng(seed);
  net.initialize(rng);
  train_mlp(net, z, d.y, p, rng);
  return std::make_shared<MlpClassifier>(std::move(s), std::move(net));
}

// ---------------------------------------------------------------- spec parsing

std::size_t to_size(std::string_view key, std::string_view v) {
  std::size_t out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw InvalidArgument("classifier option " + std::string(key) + ": expected a non-negative integer, got '" +
                          std::string(v) + "'");
  return out;
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(out))
    throw InvalidArgument("classifier option " + std::string(key) + ": expected a number, got '" + std::string(v) + "'");
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  throw InvalidArgument("classifier option " + std::string(key) + ": expected true/false");
}

void apply_option(ClassifierSpec& s, std::string_view key, std::string_view v) {
  const auto bad = [&] {
    return InvalidArgument("option '" + std::string(key) + "' does not apply to " + std::string(to_string(s.kind)));
  };
  switch (s.kind) {
    case ClassifierKind::KNN:
      if (key == "k") s.knn.k = to_size(key, v);
      else throw bad();
      break;
    case ClassifierKind::GaussianNB:
      throw bad();
    case ClassifierKind::DecisionTree:
      if (key == "max_depth") s.tree.max_depth = to_size(key, v);
      else if (key == "min_leaf") s.tree.min_leaf = to_size(key, v);
      else throw bad();
      break;
    case ClassifierKind::RandomForest:
      if (key == "n_trees") s.forest.n_trees = to_size(key, v);
      else if (key == "max_features") s.forest.max_features = to_size(key, v);
      else if (key == "bootstrap") s.forest.bootstrap = to_bool(key, v);
      else if (key == "max_depth") s.forest.tree.max_depth = to_size(key, v);
      else if (key == "min_leaf") s.forest.tree.min_leaf = to_size(key, v);
      else throw bad();
      break;
    case ClassifierKind::AdaBoost:
      if (key == "rounds") s.adaboost.rounds = to_size(key, v);
      else throw bad();
      break;
    case ClassifierKind::MLP:
      if (key == "hidden") s.mlp.hidden = to_size(key, v);
      else if (key == "epochs") s.mlp.epochs = static_cast<int>(to_size(key, v));
      else if (key == "lr") s.mlp.learning_rate = to_double(key, v);
      else if (key == "momentum") s.mlp.momentum = to_double(key, v);
      else if (key == "weight_decay") s.mlp.weight_decay = to_double(key, v);
      else if (key == "batch") s.mlp.batch_size = to_size(key, v);
      else if (key == "noise_std") s.mlp.noise_std = to_double(key, v);
      else throw bad();
      break;
  }
}

void validate_training(const FeatureMatrix& train, std::span<const int> labels) {
  if (labels.size() != train.rows())
    throw InvalidArgument("fit_classifier: " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(train.rows()) + " rows");
  if (train.cols() == 0) throw InvalidArgument("fit_classifier: no features");
  bool pos = false, neg = false;
  for (int y : labels) {
    if (y == kFraud) pos = true;
    else if (y == kNotFraud) neg = true;
    else throw InvalidArgument("fit_classifier: labels must be 0 or 1");
  }
  if (!pos || !neg) throw InvalidArgument("fit_classifier: single-class training data");
  for (double v : train.data())
    if (!std::isfinite(v)) throw InvalidArgument("fit_classifier: non-finite feature value");
}

}  // namespace

std::string_view to_string(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::KNN: return "knn";
    case ClassifierKind::GaussianNB: return "nb";
    case ClassifierKind::DecisionTree: return "tree";
    case ClassifierKind::RandomForest: return "rf";
    case ClassifierKind::AdaBoost: return "adaboost";
    case ClassifierKind::MLP: return "mlp";
  }
  return "?";
}

ClassifierKind parse_classifier_kind(std::string_view s) {
  for (auto k : kAllClassifierKinds)
    if (to_string(k) == s) return k;
  if (s == "naive_bayes" || s == "gnb") return ClassifierKind::GaussianNB;
  if (s == "dt" || s == "decision_tree") return ClassifierKind::DecisionTree;
  if (s == "random_forest") return ClassifierKind::RandomForest;
  if (s == "ab") return ClassifierKind::AdaBoost;
  throw InvalidArgument("unknown classifier: " + std::string(s));
}

ClassifierSpec parse_classifier_spec(std::string_view s) {
  const auto colon = s.find(':');
  ClassifierSpec spec = ClassifierSpec::of(parse_classifier_kind(s.substr(0, colon)));
  if (colon == std::string_view::npos) return spec;
  std::string_view rest = s.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw InvalidArgument("classifier option without '=': " + std::string(item));
    apply_option(spec, item.substr(0, eq), item.substr(eq + 1));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return spec;
}

std::string describe(const ClassifierSpec& s) {
  std::ostringstream o;
  o << to_string(s.kind);
  switch (s.kind) {
    case ClassifierKind::KNN: o << ":k=" << s.knn.k; break;
    case ClassifierKind::GaussianNB: break;
    case ClassifierKind::DecisionTree: o << ":max_depth=" << s.tree.max_depth << ",min_leaf=" << s.tree.min_leaf; break;
    case ClassifierKind::RandomForest:
      o << ":n_trees=" << s.forest.n_trees << ",max_features=" << s.forest.max_features
        << ",bootstrap=" << (s.forest.bootstrap ? "true" : "false") << ",max_depth=" << s.forest.tree.max_depth
        << ",min_leaf=" << s.forest.tree.min_leaf;
      break;
    case ClassifierKind::AdaBoost: o << ":rounds=" << s.adaboost.rounds; break;
    case ClassifierKind::MLP:
      o << ":hidden=" << s.mlp.hidden << ",epochs=" << s.mlp.epochs << ",lr=" << s.mlp.learning_rate
        << ",momentum=" << s.mlp.momentum << ",weight_decay=" << s.mlp.weight_decay << ",batch=" << s.mlp.batch_size
        << ",noise_std=" << s.mlp.noise_std;
      break;
  }
  return o.str();
}

Model fit_classifier(const ClassifierSpec& spec, const FeatureMatrix& train, std::span<const int> labels) {
  validate_training(train, labels);
  const TrainingView d{train.data(), train.rows(), train.cols(), labels};
  std::shared_ptr<const Classifier> impl;
  switch (spec.kind) {
    case ClassifierKind::KNN: impl = fit_knn(spec.knn, d); break;
    case ClassifierKind::GaussianNB: impl = fit_nb(d); break;
    case ClassifierKind::DecisionTree: impl = detail::fit_tree(spec.tree, d); break;
    case ClassifierKind::RandomForest: impl = detail::fit_forest(spec.forest, spec.seed, d); break;
    case ClassifierKind::AdaBoost: impl = detail::fit_adaboost(spec.adaboost, d); break;
    case ClassifierKind::MLP: impl = fit_mlp(spec.mlp, spec.seed, d); break;
  }
  return Model(train.schema(), std::move(impl));
}

Model::Model(SchemaPtr schema, std::shared_ptr<const Classifier> impl)
    : schema_(std::move(schema)), impl_(std::move(impl)) {
  if (!schema_ || !impl_) throw InvalidArgument("model needs a schema and a fitted classifier");
}

double Model::predict_proba(const FeatureVector& x) const {
  if (!x.schema || !(x.schema == schema_ || *x.schema == *schema_))
    throw SchemaError("feature schema differs from the model's training schema");
  return impl_->predict_proba(x.values);
}

std::vector<double> Model::predict_proba(const FeatureMatrix& m) const {
  if (!m.schema() || !(m.schema() == schema_ || *m.schema() == *schema_))
    throw SchemaError("feature schema differs from the model's training schema");
  std::vector<double> out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) out[r] = impl_->predict_proba(m.row(r));
  return out;
}

double Model::predict_row(std::span<const double> x) const {
  if (x.size() != schema_->size())
    throw DimensionError("row has " + std::to_string(x.size()) + " values, model expects " +
                         std::to_string(schema_->size()));
  return impl_->predict_proba(x);
}

json Model::to_json() const {
  return {{"format", "cfraud-model-1"},
          {"kind", std::string(to_string(impl_->kind()))},
          {"features", schema_->names()},
          {"state", impl_->state()}};
}

Model Model::from_json(const json& j) {
  try {
    if (j.at("format") != "cfraud-model-1") throw ParseError("unsupported model format");
    const auto kind = parse_classifier_kind(j.at("kind").get<std::string>());
    auto schema = make_schema(j.at("features").get<std::vector<std::string>>());
    const auto& st = j.at("state");
    std::shared_ptr<const Classifier> impl;
    switch (kind) {
      case ClassifierKind::KNN: impl = KnnClassifier::from_state(st); break;
      case ClassifierKind::GaussianNB: impl = NaiveBayesClassifier::from_state(st); break;
      case ClassifierKind::DecisionTree: impl = detail::tree_from_state(st); break;
      case ClassifierKind::RandomForest: impl = detail::forest_from_state(st); break;
      case ClassifierKind::AdaBoost: impl = detail::adaboost_from_state(st); break;
      case ClassifierKind::MLP: impl = MlpClassifier::from_state(st); break;
    }
    return Model(std::move(schema), std::move(impl));
  } catch (const json::exception& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << model.to_json().dump() << '\n';
  if (!out) throw IoError("cannot write " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Model::from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace cfraud
