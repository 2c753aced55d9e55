// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "../src/learn_internal.hpp"
#include "cfraud/corpus.hpp"
#include "cfraud/error.hpp"
#include "cfraud/learn.hpp"
#include "cfraud/mlp.hpp"
#include "cfraud/seed.hpp"

using namespace cfraud;
using Catch::Approx;

namespace {

struct Dataset {
  FeatureMatrix x;
  std::vector<int> y;
};

Dataset make_dataset(std::vector<std::vector<double>> rows, std::vector<int> y) {
  const std::size_t cols = rows.front().size();
  std::vector<std::string> names, ids;
  for (std::size_t c = 0; c < cols; ++c) names.push_back("f" + std::to_string(c));
  std::vector<double> data;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    ids.push_back("r" + std::to_string(r));
    data.insert(data.end(), rows[r].begin(), rows[r].end());
  }
  return {FeatureMatrix(make_schema(names), ids, data), std::move(y)};
}

/// Two Gaussian blobs separated by `gap` along every axis.
Dataset blobs(Rng& rng, std::size_t n, std::size_t cols, double gap) {
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = i % 2 ? kFraud : kNotFraud;
    std::vector<double> row(cols);
    for (auto& v : row) v = standard_normal(rng) + (label == kFraud ? gap : 0.0);
    rows.push_back(row);
    y.push_back(label);
  }
  return make_dataset(rows, y);
}

double training_accuracy(const Model& m, const Dataset& d) {
  const auto p = m.predict_proba(d.x);
  double ok = 0;
  for (std::size_t i = 0; i < p.size(); ++i) ok += (p[i] >= 0.5 ? kFraud : kNotFraud) == d.y[i];
  return ok / static_cast<double>(p.size());
}

}  // namespace

TEST_CASE("classifier names and specs") {
  for (auto k : kAllClassifierKinds) CHECK(parse_classifier_kind(to_string(k)) == k);
  const auto s = parse_classifier_spec("rf:n_trees=50,max_features=3,bootstrap=false");
  CHECK(s.kind == ClassifierKind::RandomForest);
  CHECK(s.forest.n_trees == 50);
  CHECK(s.forest.max_features == 3);
  CHECK_FALSE(s.forest.bootstrap);
  CHECK(parse_classifier_spec("knn:k=1").knn.k == 1);
  CHECK(parse_classifier_spec("mlp:hidden=4,lr=0.01").mlp.learning_rate == 0.01);
  CHECK(parse_classifier_spec(describe(s)).forest.n_trees == 50);
  CHECK_THROWS_AS(parse_classifier_spec("rf:depth=3"), InvalidArgument);
  CHECK_THROWS_AS(parse_classifier_spec("knn:k=-1"), InvalidArgument);
  CHECK_THROWS_AS(parse_classifier_kind("svm"), InvalidArgument);
}

TEST_CASE("fit rejects bad training data") {
  const auto d = make_dataset({{0}, {1}}, {1, 1});
  CHECK_THROWS_AS(fit_classifier(ClassifierSpec::of(ClassifierKind::KNN), d.x, d.y), InvalidArgument);
  const auto bad = make_dataset({{0}, {std::nan("")}}, {1, 0});
  CHECK_THROWS_AS(fit_classifier(ClassifierSpec::of(ClassifierKind::KNN), bad.x, bad.y), InvalidArgument);
  const std::vector<int> short_labels = {1};
  CHECK_THROWS_AS(fit_classifier(ClassifierSpec::of(ClassifierKind::KNN), d.x, short_labels), InvalidArgument);
}

TEST_CASE("1-nearest neighbour returns the label of the closest point") {
  const auto d = make_dataset({{0, 0}, {10, 10}, {0, 10}}, {0, 1, 1});
  auto spec = ClassifierSpec::of(ClassifierKind::KNN);
  spec.knn.k = 1;
  const auto m = fit_classifier(spec, d.x, d.y);
  const std::vector<double> near_origin = {1, 1}, near_far = {9, 8};
  CHECK(m.predict_row(near_origin) == 0);
  CHECK(m.predict_row(near_far) == 1);
  spec.knn.k = 3;
  CHECK(fit_classifier(spec, d.x, d.y).predict_row(near_origin) == Approx(2.0 / 3));
}

TEST_CASE("a tree fits XOR exactly") {
  const auto d = make_dataset({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {0, 1, 1, 0});
  const auto m = fit_classifier(ClassifierSpec::of(ClassifierKind::DecisionTree), d.x, d.y);
  CHECK(m.predict_proba(d.x) == std::vector<double>{0, 1, 1, 0});
  auto shallow = ClassifierSpec::of(ClassifierKind::DecisionTree);
  shallow.tree.max_depth = 1;
  const auto s = fit_classifier(shallow, d.x, d.y);
  CHECK(training_accuracy(s, d) <= 0.75);
}

TEST_CASE("Gaussian naive Bayes matches the closed-form posterior") {
  // Class means 0 and 2, both variances 1, equal priors.
  const auto d = make_dataset({{-1}, {1}, {1}, {3}}, {0, 0, 1, 1});
  const auto m = fit_classifier(ClassifierSpec::of(ClassifierKind::GaussianNB), d.x, d.y);
  for (double x : {-2.0, 0.0, 1.0, 1.5, 4.0}) {
    const std::vector<double> row = {x};
    // log-likelihood ratio (x-0)^2/2 - (x-2)^2/2 = 2x - 2
    CHECK(m.predict_row(row) == Approx(1 / (1 + std::exp(-(2 * x - 2)))).epsilon(1e-6));
  }
  const auto flat = make_dataset({{1}, {1}, {1}, {1}}, {0, 0, 1, 1});
  const std::vector<double> one = {1};
  CHECK(fit_classifier(ClassifierSpec::of(ClassifierKind::GaussianNB), flat.x, flat.y).predict_row(one) == Approx(0.5));
}

TEST_CASE("a one-tree forest without bootstrap equals a single tree") {
  Rng rng = make_rng(67);
  const auto d = blobs(rng, 60, 3, 1.0);
  auto forest = ClassifierSpec::of(ClassifierKind::RandomForest, 5);
  forest.forest.n_trees = 1;
  forest.forest.bootstrap = false;
  forest.forest.max_features = 3;
  const auto f = fit_classifier(forest, d.x, d.y);
  const auto t = fit_classifier(ClassifierSpec::of(ClassifierKind::DecisionTree), d.x, d.y);
  const auto probe = blobs(rng, 40, 3, 1.0);
  CHECK(f.predict_proba(probe.x) == t.predict_proba(probe.x));
}

TEST_CASE("AdaBoost weights replay from the stored stumps") {
  Rng rng = make_rng(71);
  const auto d = blobs(rng, 80, 2, 1.0);
  auto spec = ClassifierSpec::of(ClassifierKind::AdaBoost);
  spec.adaboost.rounds = 20;
  const auto m = fit_classifier(spec, d.x, d.y);
  const auto state = m.to_json().at("state");
  const auto alphas = state.at("alphas").get<std::vector<double>>();
  REQUIRE_FALSE(alphas.empty());
  std::vector<double> w(d.y.size(), 1.0 / d.y.size());
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    const auto stump = detail::Tree::from_json(state.at("stumps").at(k));
    double err = 0, total = 0;
    std::vector<bool> miss(d.y.size());
    for (std::size_t r = 0; r < d.y.size(); ++r) {
      const auto row = d.x.row(r);
      miss[r] = (stump.predict(row) >= 0.5 ? kFraud : kNotFraud) != d.y[r];
      if (miss[r]) err += w[r];
      total += w[r];
    }
    err /= total;
    REQUIRE(err < 0.5);
    if (err == 0) break;
    REQUIRE(alphas[k] == Approx(std::log((1 - err) / err)).epsilon(1e-12));
    for (std::size_t r = 0; r < w.size(); ++r)
      if (miss[r]) w[r] *= std::exp(alphas[k]);
  }
  // The weighted vote beats the first stump on its own training data.
  auto one = spec;
  one.adaboost.rounds = 1;
  CHECK(training_accuracy(m, d) >= training_accuracy(fit_classifier(one, d.x, d.y), d));
}

TEST_CASE("MLP gradient matches central differences") {
  Rng rng = make_rng(73);
  MlpNetwork net(4, 3);
  net.initialize(rng);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(4);
    for (auto& v : x) v = standard_normal(rng);
    const int label = trial % 2;
    std::vector<double> grad(net.parameter_count());
    const double loss = net.loss_and_gradient(x, label, grad);
    CHECK(loss == Approx(net.loss(x, label)));
    const auto p = net.probabilities(x);
    CHECK(p[0] + p[1] == Approx(1.0).epsilon(1e-15));
    CHECK(loss == Approx(-std::log(p[label])));
    for (std::size_t i = 0; i < net.parameter_count(); ++i) {
      const double h = 1e-6, keep = net.parameters()[i];
      net.parameters()[i] = keep + h;
      const double up = net.loss(x, label);
      net.parameters()[i] = keep - h;
      const double down = net.loss(x, label);
      net.parameters()[i] = keep;
      REQUIRE(grad[i] == Approx((up - down) / (2 * h)).margin(1e-6));
    }
  }
}

TEST_CASE("MLP initialization respects the fan-in bound") {
  Rng rng = make_rng(79);
  MlpNetwork net(9, 4);
  net.initialize(rng);
  const auto p = net.parameters();
  for (std::size_t i = 0; i < 9 * 4 + 4; ++i) REQUIRE(std::abs(p[i]) <= 1.0 / 3);
  for (std::size_t i = 9 * 4 + 4; i < p.size(); ++i) REQUIRE(std::abs(p[i]) <= 0.5);
}

TEST_CASE("noise-free full-batch MLP training lowers the loss every epoch") {
  Rng data_rng = make_rng(83);
  const auto d = blobs(data_rng, 40, 3, 1.5);
  MlpNetwork net(3, 3);
  Rng rng = make_rng(89);
  net.initialize(rng);
  MlpParams params;
  params.noise_std = 0;
  params.batch_size = 40;
  params.momentum = 0;
  params.weight_decay = 0;
  params.learning_rate = 0.05;
  params.epochs = 100;
  const auto res = train_mlp(net, d.x.data(), d.y, params, rng);
  REQUIRE(res.epoch_loss.size() == 100);
  for (std::size_t e = 1; e < res.epoch_loss.size(); ++e) REQUIRE(res.epoch_loss[e] <= res.epoch_loss[e - 1] + 1e-12);
  CHECK(res.epoch_loss.back() < res.epoch_loss.front());
}

TEST_CASE("every classifier separates well-separated blobs and is deterministic") {
  Rng rng = make_rng(97);
  const auto train = blobs(rng, 80, 4, 3.0);
  const auto test = blobs(rng, 40, 4, 3.0);
  for (auto k : kAllClassifierKinds) {
    INFO(to_string(k));
    auto spec = ClassifierSpec::of(k, 123);
    if (k == ClassifierKind::RandomForest) spec.forest.n_trees = 25;
    const auto a = fit_classifier(spec, train.x, train.y);
    const auto b = fit_classifier(spec, train.x, train.y);
    CHECK(a.predict_proba(test.x) == b.predict_proba(test.x));
    CHECK(training_accuracy(a, test) >= 0.9);
    for (double p : a.predict_proba(test.x)) {
      REQUIRE(p >= 0);
      REQUIRE(p <= 1);
    }
  }
}

TEST_CASE("models serialize and enforce their schema") {
  Rng rng = make_rng(101);
  const auto train = blobs(rng, 40, 3, 2.0);
  const auto probe = blobs(rng, 10, 3, 2.0);
  const auto dir = std::filesystem::temp_directory_path() / "cfraud-learn-models";
  std::filesystem::create_directories(dir);
  for (auto k : kAllClassifierKinds) {
    INFO(to_string(k));
    auto spec = ClassifierSpec::of(k, 7);
    if (k == ClassifierKind::RandomForest) spec.forest.n_trees = 10;
    const auto m = fit_classifier(spec, train.x, train.y);
    const auto path = dir / (std::string(to_string(k)) + ".json");
    save_model(m, path);
    const auto back = load_model(path);
    CHECK(back.kind() == k);
    CHECK(back.schema()->names() == m.schema()->names());
    CHECK(back.predict_proba(probe.x) == m.predict_proba(probe.x));
  }
  const auto m = fit_classifier(ClassifierSpec::of(ClassifierKind::GaussianNB), train.x, train.y);
  const FeatureVector wrong{make_schema({"f0", "f2", "f1"}), {0, 0, 0}};
  CHECK_THROWS_AS(m.predict_proba(wrong), SchemaError);
  CHECK(m.predict_proba(train.x.vector_at(0)) == m.predict_row(train.x.row(0)));
  CHECK_THROWS_AS(Model::from_json(nlohmann::json{{"kind", "svm"}}), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("standardizer centres and scales") {
  const std::vector<double> rows = {1, 5, 3, 5, 5, 5};
  const auto s = Standardizer::fit(rows, 2);
  CHECK(s.mean == std::vector<double>{3, 5});
  const auto z = s.apply_rows(rows);
  CHECK(z[0] == Approx(-z[4]));
  CHECK(z[1] == 0);
  CHECK(z[2] == 0);
}
