// SPDX-License-Identifier: Apache-2.0
#include "cfraud/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cfraud/corpus.hpp"
#include "cfraud/error.hpp"

namespace cfraud {

namespace {

void require_both_classes(std::span<const ScoredExample> scores, const char* what) {
  bool pos = false, neg = false;
  for (const auto& s : scores) {
    if (s.label == kFraud) pos = true;
    else if (s.label == kNotFraud) neg = true;
    else throw InvalidArgument(std::string(what) + ": label must be 0 or 1");
    if (std::isnan(s.probability)) throw InvalidArgument(std::string(what) + ": NaN probability");
  }
  if (!pos || !neg) throw InvalidArgument(std::string(what) + ": both classes required");
}

double ratio(std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); }

}  // namespace

Metrics evaluate_metrics(std::span<const ScoredExample> scores, double threshold) {
  require_both_classes(scores, "evaluate_metrics");
  Metrics m;
  for (const auto& s : scores) {
    const bool predicted = s.probability >= threshold;
    const bool actual = s.label == kFraud;
    if (predicted && actual) ++m.tp;
    else if (predicted) ++m.fp;
    else if (actual) ++m.fn;
    else ++m.tn;
  }
  m.accuracy = ratio(m.tp + m.tn, scores.size());
  m.precision = ratio(m.tp, m.tp + m.fp);
  m.recall = ratio(m.tp, m.tp + m.fn);
  m.f1 = (m.precision + m.recall) > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  m.auc = roc_auc(scores);
  return m;
}

double roc_auc(std::span<const ScoredExample> scores) {
  require_both_classes(scores, "roc_auc");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a].probability < scores[b].probability; });
  double rank_sum = 0;
  std::size_t n_pos = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]].probability == scores[order[i]].probability) ++j;
    const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (scores[order[k]].label == kFraud) {
        rank_sum += mid;
        ++n_pos;
      }
    i = j;
  }
  const double p = static_cast<double>(n_pos);
  const double n = static_cast<double>(scores.size() - n_pos);
  return (rank_sum - p * (p + 1) / 2.0) / (p * n);
}

std::vector<RocPoint> roc_curve(std::span<const ScoredExample> scores) {
  require_both_classes(scores, "roc_curve");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a].probability > scores[b].probability; });
  std::size_t total_pos = 0;
  for (const auto& s : scores) total_pos += s.label == kFraud;
  const std::size_t total_neg = scores.size() - total_pos;

  std::vector<RocPoint> curve{{0.0, 0.0}};
  std::size_t tp = 0, fp = 0, i = 0;
  while (i < order.size()) {
    const double v = scores[order[i]].probability;
    while (i < order.size() && scores[order[i]].probability == v) {
      if (scores[order[i]].label == kFraud) ++tp;
      else ++fp;
      ++i;
    }
    curve.push_back({ratio(fp, total_neg), ratio(tp, total_pos)});
  }
  return curve;
}

double trapezoid_area(std::span<const RocPoint> curve) {
  double area = 0;
  for (std::size_t i = 1; i < curve.size(); ++i)
    area += (curve[i].fpr - curve[i - 1].fpr) * (curve[i].tpr + curve[i - 1].tpr) / 2.0;
  return area;
}

}  // namespace cfraud
