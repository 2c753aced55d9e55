// SPDX-License-Identifier: Apache-2.0
#include "cfraud/select.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>

#include <boost/math/distributions/students_t.hpp>

#include "cfraud/corpus.hpp"
#include "cfraud/csv.hpp"
#include "cfraud/error.hpp"

namespace cfraud {

namespace {

void require_finite(std::span<const double> v, const char* what) {
  if (v.empty()) throw InvalidArgument(std::string(what) + ": empty sample");
  for (double x : v)
    if (!std::isfinite(x)) throw InvalidArgument(std::string(what) + ": non-finite value");
}

struct Moments {
  double mean = 0;
  double var = 0;  // unbiased
};

Moments moments(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x;
  const double mean = s / static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, ss / static_cast<double>(v.size() - 1)};
}

}  // namespace

double kolmogorov_survival(double lambda) {
  constexpr double kEps = 1e-10;
  if (!(lambda > 0)) return 1.0;
  double p;
  if (lambda < 1.18) {
    // P(K <= l) = sqrt(2 pi)/l * sum exp(-(2k-1)^2 pi^2 / (8 l^2))
    const double c = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double sum = 0;
    for (int k = 1; k < 1000; ++k) {
      const double m = 2.0 * k - 1.0;
      const double term = std::exp(-m * m * c);
      sum += term;
      if (term < kEps) break;
    }
    p = 1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum;
  } else {
    double sum = 0;
    for (int k = 1; k < 1000; ++k) {
      const double term = std::exp(-2.0 * k * k * lambda * lambda);
      sum += (k % 2 == 1) ? term : -term;
      if (term < kEps) break;
    }
    p = 2.0 * sum;
  }
  return std::clamp(p, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> x, std::span<const double> y) {
  require_finite(x, "ks_two_sample");
  require_finite(y, "ks_two_sample");
  std::vector<double> a(x.begin(), x.end()), b(y.begin(), y.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double n1 = static_cast<double>(a.size()), n2 = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / n1 - static_cast<double>(j) / n2));
  }
  KsResult r;
  r.d_statistic = d;
  r.n1 = a.size();
  r.n2 = b.size();
  r.p_value = kolmogorov_survival(d * std::sqrt(n1 * n2 / (n1 + n2)));
  return r;
}

WelchResult welch_t_test(std::span<const double> x, std::span<const double> y) {
  require_finite(x, "welch_t_test");
  require_finite(y, "welch_t_test");
  if (x.size() < 2 || y.size() < 2) throw InvalidArgument("welch_t_test: need at least 2 values per sample");
  const auto mx = moments(x), my = moments(y);
  const double n1 = static_cast<double>(x.size()), n2 = static_cast<double>(y.size());
  const double a = mx.var / n1, b = my.var / n2;
  const double se2 = a + b;
  const double diff = mx.mean - my.mean;
  WelchResult r;
  if (se2 == 0) {
    r.df = n1 + n2 - 2;
    if (diff == 0) return r;
    r.t = diff > 0 ? INFINITY : -INFINITY;
    r.p_value = 0;
    return r;
  }
  r.t = diff / std::sqrt(se2);
  r.df = se2 * se2 / (a * a / (n1 - 1) + b * b / (n2 - 1));
  const boost::math::students_t dist(r.df);
  r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t))));
  return r;
}

std::string_view to_string(SignificanceTest t) { return t == SignificanceTest::KS ? "ks" : "welch"; }

SignificanceTest parse_significance_test(std::string_view s) {
  if (s == "ks" || s == "KS") return SignificanceTest::KS;
  if (s == "welch" || s == "t" || s == "ttest" || s == "t-test") return SignificanceTest::Welch;
  throw InvalidArgument("unknown significance test: " + std::string(s));
}

std::vector<std::size_t> SelectionMask::kept_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < features.size(); ++i)
    if (features[i].kept) out.push_back(i);
  return out;
}

std::size_t SelectionMask::kept_count() const {
  return static_cast<std::size_t>(std::count_if(features.begin(), features.end(), [](const auto& f) { return f.kept; }));
}

SelectionMask select_significant(const FeatureMatrix& matrix, std::span<const int> labels, SignificanceTest test,
                                 double alpha) {
  if (labels.size() != matrix.rows())
    throw InvalidArgument("select_significant: " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(matrix.rows()) + " rows");
  std::vector<std::size_t> fraud_rows, clean_rows;
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (labels[r] == kFraud) fraud_rows.push_back(r);
    else if (labels[r] == kNotFraud) clean_rows.push_back(r);
    else throw InvalidArgument("select_significant: label must be 0 or 1");
  }
  if (fraud_rows.empty() || clean_rows.empty()) throw InvalidArgument("select_significant: single-class input");

  SelectionMask mask;
  mask.alpha = alpha;
  mask.test = test;
  mask.features.resize(matrix.cols());
  std::vector<double> xs(fraud_rows.size()), ys(clean_rows.size());
  const std::size_t stride = matrix.cols();
  const auto data = matrix.data();
  for (std::size_t c = 0; c < matrix.cols(); ++c) {
    for (std::size_t k = 0; k < fraud_rows.size(); ++k) xs[k] = data[fraud_rows[k] * stride + c];
    for (std::size_t k = 0; k < clean_rows.size(); ++k) ys[k] = data[clean_rows[k] * stride + c];
    auto& f = mask.features[c];
    f.name = matrix.schema()->name(c);
    if (test == SignificanceTest::KS) {
      const auto r = ks_two_sample(xs, ys);
      f.statistic = r.d_statistic;
      f.p_value = r.p_value;
    } else {
      const auto r = welch_t_test(xs, ys);
      f.statistic = r.t;
      f.p_value = r.p_value;
    }
    f.kept = f.p_value < alpha;
  }
  return mask;
}

void write_mask_csv(std::ostream& out, const SelectionMask& mask) {
  CsvWriter w(out);
  w.row({"name", "statistic", "p_value", "kept"});
  for (const auto& f : mask.features)
    w.row({f.name, format_number(f.statistic), format_number(f.p_value), f.kept ? "1" : "0"});
}

SelectionMask read_mask_csv(std::istream& in, double alpha, SignificanceTest test) {
  const auto rows = read_csv(in);
  if (rows.empty() || rows[0] != std::vector<std::string>{"name", "statistic", "p_value", "kept"})
    throw ParseError("mask csv: expected header name,statistic,p_value,kept");
  SelectionMask mask;
  mask.alpha = alpha;
  mask.test = test;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 4) throw ParseError("mask csv: expected 4 fields", i + 1);
    try {
      mask.features.push_back({r[0], std::stod(r[1]), std::stod(r[2]), r[3] == "1"});
    } catch (const std::exception&) {
      throw ParseError("mask csv: bad number", i + 1);
    }
  }
  return mask;
}

}  // namespace cfraud
