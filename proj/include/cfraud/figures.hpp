// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cfraud/harness.hpp"

namespace cfraud {

enum class FigureKind { TextEmotions, ImageEmotions, WordImportance, ObjectPrevalence, FaceHistogram, MetricsBoxes };

std::string_view to_string(FigureKind k);
/// Accepts the kebab-case names (text-emotions, ...) and the enum spellings.
FigureKind parse_figure_kind(std::string_view s);

struct FigureTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write_csv(std::ostream& out) const;
};

struct FaceStatistics {
  double mean = 0;
  double median = 0;
  std::vector<std::size_t> histogram;  // histogram[k]: campaigns with round(faces) == k
};

FaceStatistics face_statistics(const std::vector<double>& face_counts);

struct FigureInputs {
  const ExperimentData* data = nullptr;
  const LabeledSet* labeled = nullptr;
  std::size_t min_df = kDefaultMinDf;
  std::size_t top = 0;  // 0: all terms/classes
  std::vector<std::pair<std::string, MetricsDistribution>> runs;  // MetricsBoxes
};

/// label,emotion,mean: mean lexicon score per class.
FigureTable figure_text_emotions(const ExperimentData& data, const LabeledSet& labeled);
/// label,emotion,mean: softmax of campaign emotion logits, averaged per class.
FigureTable figure_image_emotions(const ExperimentData& data, const LabeledSet& labeled);
/// rank,term,mean_fraud,mean_not_fraud,difference sorted by decreasing
/// (fraud - not fraud) mean TF-IDF weight.
FigureTable figure_word_importance(const ExperimentData& data, const LabeledSet& labeled,
                                   std::size_t min_df = kDefaultMinDf, std::size_t top = 0);
/// rank,class,mean_fraud,mean_not_fraud,difference over semantic logits.
FigureTable figure_object_prevalence(const ExperimentData& data, const LabeledSet& labeled,
                                     std::size_t top = 0);
/// label,statistic,value with statistic in {mean, median, faces=<k>}.
FigureTable figure_face_histogram(const ExperimentData& data, const LabeledSet& labeled);
/// model,metric,min,q1,median,q3,max,mean
FigureTable figure_metrics_boxes(const std::vector<std::pair<std::string, MetricsDistribution>>& runs);

/// Dispatches on `kind`; throws InvalidArgument when a required input is absent.
FigureTable export_figure_data(FigureKind kind, const FigureInputs& inputs);

}  // namespace cfraud
