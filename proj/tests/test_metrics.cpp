// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include "cfraud/error.hpp"
#include "cfraud/metrics.hpp"
#include "cfraud/seed.hpp"

using namespace cfraud;
using Catch::Approx;

namespace {

double pair_count_auc(const std::vector<ScoredExample>& s) {
  double good = 0, pairs = 0;
  for (const auto& p : s)
    for (const auto& n : s)
      if (p.label == 1 && n.label == 0) {
        pairs += 1;
        good += p.probability > n.probability ? 1.0 : p.probability == n.probability ? 0.5 : 0.0;
      }
  return good / pairs;
}

}  // namespace

TEST_CASE("confusion counts and derived metrics") {
  const std::vector<ScoredExample> s = {{1, 0.9}, {1, 0.4}, {0, 0.6}, {0, 0.1}, {1, 0.5}};
  const auto m = evaluate_metrics(s);
  CHECK(m.tp == 2);
  CHECK(m.fn == 1);
  CHECK(m.fp == 1);
  CHECK(m.tn == 1);
  CHECK(m.accuracy == Approx(0.6));
  CHECK(m.precision == Approx(2.0 / 3));
  CHECK(m.recall == Approx(2.0 / 3));
  CHECK(m.f1 == Approx(2.0 / 3));
  CHECK(m.auc == Approx(4.0 / 6));

  const std::vector<ScoredExample> none_predicted = {{1, 0.1}, {0, 0.2}};
  const auto z = evaluate_metrics(none_predicted);
  CHECK(z.precision == 0);
  CHECK(z.recall == 0);
  CHECK(z.f1 == 0);

  const std::vector<ScoredExample> one_class = {{1, 0.1}, {1, 0.2}};
  CHECK_THROWS_AS(evaluate_metrics(one_class), InvalidArgument);
}

TEST_CASE("AUC examples") {
  const std::vector<ScoredExample> quarter = {{1, 0.8}, {1, 0.4}, {0, 0.6}, {0, 0.2}};
  CHECK(roc_auc(quarter) == 0.75);
  const std::vector<ScoredExample> tied = {{1, 0.5}, {0, 0.5}};
  CHECK(roc_auc(tied) == 0.5);
  const std::vector<ScoredExample> perfect = {{1, 0.9}, {0, 0.1}};
  CHECK(roc_auc(perfect) == 1.0);
  const std::vector<ScoredExample> inverted = {{1, 0.1}, {0, 0.9}};
  CHECK(roc_auc(inverted) == 0.0);

  const auto curve = roc_curve(quarter);
  REQUIRE(curve.size() == 5);
  CHECK(curve.front().fpr == 0);
  CHECK(curve.front().tpr == 0);
  CHECK(curve.back().fpr == 1);
  CHECK(curve.back().tpr == 1);
  CHECK(trapezoid_area(curve) == 0.75);
}

TEST_CASE("rank AUC, trapezoid area and pair counting agree") {
  Rng rng = make_rng(61);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ScoredExample> s;
    const auto n = 2 + uniform_index(rng, 40);
    for (std::size_t i = 0; i < n; ++i)
      s.push_back({static_cast<int>(uniform_index(rng, 2)), static_cast<double>(uniform_index(rng, 8)) / 8});
    s[0].label = 1;
    s[1].label = 0;
    const double oracle = pair_count_auc(s);
    REQUIRE(roc_auc(s) == Approx(oracle).margin(1e-12));
    REQUIRE(trapezoid_area(roc_curve(s)) == Approx(oracle).margin(1e-12));
    // Flipping every score mirrors the AUC.
    auto flipped = s;
    for (auto& e : flipped) e.probability = 1 - e.probability;
    REQUIRE(roc_auc(flipped) == Approx(1 - oracle).margin(1e-12));
  }
}
