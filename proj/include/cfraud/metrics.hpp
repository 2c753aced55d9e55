// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cfraud {

struct ScoredExample {
  int label = 0;        // kFraud (1) or kNotFraud (0)
  double probability = 0;  // predicted P(fraud)
};

struct Metrics {
  double accuracy = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  double auc = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  bool operator==(const Metrics&) const = default;
};

/// Predicted fraud iff probability >= threshold. Precision, recall and F1 are
/// 0 when undefined. Throws InvalidArgument unless both classes are present.
Metrics evaluate_metrics(std::span<const ScoredExample> scores, double threshold = 0.5);

/// Rank (Mann-Whitney) AUC: (concordant + 0.5 * tied) / (n_pos * n_neg),
/// computed with mid-ranks in O(n log n).
double roc_auc(std::span<const ScoredExample> scores);

struct RocPoint {
  double fpr = 0;
  double tpr = 0;
};

/// ROC vertices from (0,0) to (1,1), one per distinct score threshold taken in
/// decreasing order; tied scores move diagonally.
std::vector<RocPoint> roc_curve(std::span<const ScoredExample> scores);
double trapezoid_area(std::span<const RocPoint> curve);

}  // namespace cfraud
