// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cfraud/corpus.hpp"
#include "cfraud/error.hpp"
#include "cfraud/seed.hpp"
#include "cfraud/select.hpp"

using namespace cfraud;
using Catch::Approx;

namespace {

/// Evaluates both empirical CDFs at every pooled value.
double brute_force_d(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> pooled = x;
  pooled.insert(pooled.end(), y.begin(), y.end());
  double d = 0;
  for (double t : pooled) {
    const double fx = static_cast<double>(std::count_if(x.begin(), x.end(), [t](double v) { return v <= t; })) / x.size();
    const double fy = static_cast<double>(std::count_if(y.begin(), y.end(), [t](double v) { return v <= t; })) / y.size();
    d = std::max(d, std::abs(fx - fy));
  }
  return d;
}

std::vector<double> random_sample(Rng& rng, std::size_t n, bool ties) {
  std::vector<double> v(n);
  for (auto& x : v) x = ties ? static_cast<double>(uniform_index(rng, 5)) : standard_normal(rng);
  return v;
}

}  // namespace

TEST_CASE("KS statistic on small examples") {
  const std::vector<double> a = {1, 2, 3}, b = {4, 5, 6};
  CHECK(ks_two_sample(a, b).d_statistic == 1.0);
  CHECK(ks_two_sample(a, a).d_statistic == 0.0);
  CHECK(ks_two_sample(a, a).p_value == 1.0);
  const std::vector<double> c = {1, 2, 3, 4}, d = {3, 4, 5, 6};
  CHECK(ks_two_sample(c, d).d_statistic == 0.5);
  const std::vector<double> empty;
  CHECK_THROWS_AS(ks_two_sample(a, empty), InvalidArgument);
  const std::vector<double> nan = {std::nan("")};
  CHECK_THROWS_AS(ks_two_sample(a, nan), InvalidArgument);
}

TEST_CASE("Kolmogorov survival function") {
  CHECK(kolmogorov_survival(0) == 1.0);
  CHECK(kolmogorov_survival(1.36) == Approx(0.0494).margin(5e-4));
  CHECK(kolmogorov_survival(1.63) == Approx(0.0098).margin(5e-4));
  CHECK(kolmogorov_survival(10) < 1e-10);
  double prev = 1;
  for (double l = 0.05; l < 3; l += 0.05) {
    const double s = kolmogorov_survival(l);
    REQUIRE(s <= prev + 1e-12);
    REQUIRE(s >= 0);
    prev = s;
  }
}

TEST_CASE("KS agrees with a brute-force ECDF oracle and is symmetric") {
  Rng rng = make_rng(53);
  for (int trial = 0; trial < 500; ++trial) {
    const bool ties = trial % 2 == 0;
    const auto x = random_sample(rng, 1 + uniform_index(rng, 30), ties);
    const auto y = random_sample(rng, 1 + uniform_index(rng, 30), ties);
    const auto r = ks_two_sample(x, y);
    REQUIRE(r.d_statistic == Approx(brute_force_d(x, y)).margin(1e-12));
    REQUIRE(ks_two_sample(y, x).d_statistic == r.d_statistic);
    REQUIRE(ks_two_sample(y, x).p_value == r.p_value);
    REQUIRE(r.p_value >= 0);
    REQUIRE(r.p_value <= 1);
    const double lambda = r.d_statistic * std::sqrt(double(x.size()) * y.size() / double(x.size() + y.size()));
    REQUIRE(r.p_value == Approx(kolmogorov_survival(lambda)).margin(1e-12));
    // Strictly increasing transforms leave D unchanged.
    std::vector<double> tx = x, ty = y;
    for (auto& v : tx) v = std::exp(v);
    for (auto& v : ty) v = std::exp(v);
    REQUIRE(ks_two_sample(tx, ty).d_statistic == r.d_statistic);
  }
}

TEST_CASE("Welch t test") {
  const std::vector<double> a = {1, 2, 3, 4, 5}, b = {3, 4, 5, 6, 7};
  const auto r = welch_t_test(a, b);
  CHECK(r.t == Approx(-2.0));
  CHECK(r.df == Approx(8.0));
  CHECK(r.p_value == Approx(0.0805).margin(5e-4));

  const std::vector<double> c = {2, 2, 2}, d = {2, 2}, e = {3, 3};
  const auto same = welch_t_test(c, d);
  CHECK(same.t == 0);
  CHECK(same.p_value == 1);
  const auto diff = welch_t_test(c, e);
  CHECK(std::isinf(diff.t));
  CHECK(diff.t < 0);
  CHECK(diff.p_value == 0);
  const std::vector<double> one = {1};
  CHECK_THROWS_AS(welch_t_test(one, a), InvalidArgument);

  // Unequal variances: hand-computed Welch-Satterthwaite degrees of freedom.
  const std::vector<double> f = {1, 2, 3, 4}, g = {10, 20, 30};
  const double v1 = 5.0 / 3 / 4, v2 = 100.0 / 3;
  const auto w = welch_t_test(f, g);
  CHECK(w.t == Approx((2.5 - 20) / std::sqrt(v1 + v2)));
  CHECK(w.df == Approx((v1 + v2) * (v1 + v2) / (v1 * v1 / 3 + v2 * v2 / 2)));
}

TEST_CASE("test names") {
  CHECK(parse_significance_test("ks") == SignificanceTest::KS);
  CHECK(parse_significance_test("welch") == SignificanceTest::Welch);
  CHECK(parse_significance_test(to_string(SignificanceTest::Welch)) == SignificanceTest::Welch);
  CHECK_THROWS_AS(parse_significance_test("chi2"), InvalidArgument);
}

TEST_CASE("selection keeps the informative columns") {
  // 50 columns, columns 0..4 shifted for the fraud class.
  Rng rng = make_rng(59);
  const std::size_t rows = 200, cols = 50;
  std::vector<std::string> names, ids;
  for (std::size_t c = 0; c < cols; ++c) names.push_back("f" + std::to_string(c));
  std::vector<double> data(rows * cols);
  std::vector<int> labels(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    ids.push_back("r" + std::to_string(r));
    labels[r] = r % 2 ? kFraud : kNotFraud;
    for (std::size_t c = 0; c < cols; ++c) data[r * cols + c] = standard_normal(rng) + (c < 5 && labels[r] == kFraud ? 2.0 : 0.0);
  }
  const FeatureMatrix m(make_schema(names), ids, data);
  for (auto test : {SignificanceTest::KS, SignificanceTest::Welch}) {
    const auto mask = select_significant(m, labels, test, 0.001);
    const auto kept = mask.kept_indices();
    CHECK(kept == std::vector<std::size_t>{0, 1, 2, 3, 4});
    CHECK(mask.kept_count() == 5);
    for (const auto& f : mask.features) CHECK(f.kept == (f.p_value < 0.001));
  }
  const std::vector<int> one_class(rows, kFraud);
  CHECK_THROWS_AS(select_significant(m, one_class), InvalidArgument);
  const std::vector<int> short_labels(3, kFraud);
  CHECK_THROWS_AS(select_significant(m, short_labels), InvalidArgument);

  const auto mask = select_significant(m, labels);
  std::ostringstream out;
  write_mask_csv(out, mask);
  CHECK(out.str().rfind("name,statistic,p_value,kept\n", 0) == 0);
  std::istringstream in(out.str());
  const auto back = read_mask_csv(in);
  REQUIRE(back.features.size() == mask.features.size());
  for (std::size_t i = 0; i < cols; ++i) {
    CHECK(back.features[i].name == mask.features[i].name);
    CHECK(back.features[i].kept == mask.features[i].kept);
    CHECK(back.features[i].p_value == mask.features[i].p_value);
    CHECK(back.features[i].statistic == mask.features[i].statistic);
  }
}
