// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cfraud/features.hpp"

namespace cfraud {

struct KsResult {
  double d_statistic = 0;
  double p_value = 1;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

/// Two-sample Kolmogorov-Smirnov test. D is the supremum of |F_x - F_y| over
/// the pooled sample values; p uses the asymptotic Kolmogorov distribution at
/// lambda = D * sqrt(n1*n2/(n1+n2)). Throws InvalidArgument on empty samples
/// or non-finite values.
KsResult ks_two_sample(std::span<const double> x, std::span<const double> y);

/// P(K > lambda) for the Kolmogorov distribution. Series terms below 1e-10
/// end the summation.
double kolmogorov_survival(double lambda);

struct WelchResult {
  double t = 0;
  double p_value = 1;
  double df = 0;
};

/// Welch's unequal-variance t test, two-sided. Needs n >= 2 per sample. When
/// both variances are zero: equal means give t = 0, p = 1; different means
/// give t = +/-inf, p = 0.
WelchResult welch_t_test(std::span<const double> x, std::span<const double> y);

enum class SignificanceTest { KS, Welch };

std::string_view to_string(SignificanceTest t);
SignificanceTest parse_significance_test(std::string_view s);

struct FeatureSignificance {
  std::string name;
  double statistic = 0;  // D for KS, t for Welch
  double p_value = 1;
  bool kept = false;
};

struct SelectionMask {
  std::vector<FeatureSignificance> features;
  double alpha = 0.05;
  SignificanceTest test = SignificanceTest::KS;

  std::vector<std::size_t> kept_indices() const;
  std::size_t kept_count() const;
};

inline constexpr double kDefaultAlpha = 0.05;

/// Tests every column of `matrix`, fraud rows against not-fraud rows.
/// `labels[r]` is kFraud or kNotFraud for row r. Kept iff p < alpha.
/// Throws InvalidArgument when a class is absent or sizes disagree.
SelectionMask select_significant(const FeatureMatrix& matrix, std::span<const int> labels,
                                 SignificanceTest test = SignificanceTest::KS,
                                 double alpha = kDefaultAlpha);

/// CSV: name,statistic,p_value,kept
void write_mask_csv(std::ostream& out, const SelectionMask& mask);
SelectionMask read_mask_csv(std::istream& in, double alpha = kDefaultAlpha,
                            SignificanceTest test = SignificanceTest::KS);

}  // namespace cfraud
