// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfraud/corpus.hpp"
#include "cfraud/features.hpp"
#include "cfraud/imagefeat.hpp"
#include "cfraud/learn.hpp"
#include "cfraud/metrics.hpp"
#include "cfraud/select.hpp"
#include "cfraud/textfeat.hpp"

namespace cfraud {

enum class Modality { Text, Image, Ensemble };
std::string_view to_string(Modality m);
Modality parse_modality(std::string_view s);

/// LeakFree: vocabulary, significance mask and standardization are fitted on
/// each training fold. FullDataset: vocabulary and mask are fitted once on all
/// labeled campaigns (reproduces the global feature counts; leaks labels).
enum class SelectionMode { LeakFree, FullDataset };
std::string_view to_string(SelectionMode m);
/// "leak-free" or "full-dataset" (alias "full", "paper").
SelectionMode parse_selection_mode(std::string_view s);

inline constexpr std::size_t kDefaultClassicalIterations = 2000;
inline constexpr std::size_t kDefaultMlpIterations = 1000;

struct ExperimentConfig {
  LabelSetup label_setup = LabelSetup::LabelII;
  ClassifierSpec classifier;  // classifier.seed is replaced per iteration
  Modality modality = Modality::Text;
  std::size_t iterations = 0;  // 0: 2000 for classical kinds, 1000 for MLP
  double train_fraction = 0.7;
  std::uint64_t master_seed = 0;
  SelectionMode selection = SelectionMode::LeakFree;
  SignificanceTest test = SignificanceTest::KS;
  double alpha = kDefaultAlpha;
  std::size_t min_df = kDefaultMinDf;
  ImageAggregation aggregation = ImageAggregation::Mean;
  std::vector<FeatureGroup> ablation_groups;
  std::size_t workers = 1;

  std::size_t effective_iterations() const;
  /// Throws InvalidArgument on out-of-range values.
  void validate() const;
};

/// key=value lines (# comments). Keys: label_setup, classifier, modality,
/// iterations, train_fraction, seed, selection, test, alpha, min_df,
/// aggregation, ablation_groups (comma list), workers.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
void apply_config_entry(ExperimentConfig& cfg, std::string_view key, std::string_view value);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

// ---------------------------------------------------------------- results

enum class Metric { Accuracy, Precision, Recall, F1, AUC };
inline constexpr Metric kAllMetrics[] = {Metric::Accuracy, Metric::Precision, Metric::Recall,
                                         Metric::F1, Metric::AUC};
std::string_view to_string(Metric m);
double metric_value(const Metrics& m, Metric which);

struct MetricSummary {
  double mean = 0;
  double std = 0;  // sample standard deviation (n-1); 0 for one sample
  double min = 0;
  double q1 = 0;
  double median = 0;
  double q3 = 0;
  double max = 0;
};

/// Linear-interpolation quantile of an unsorted sample, q in [0,1].
double quantile(std::vector<double> values, double q);
MetricSummary summarize(const std::vector<double>& values);

/// Every per-iteration sample is kept, in iteration order.
struct MetricsDistribution {
  std::vector<Metrics> samples;

  std::size_t size() const noexcept { return samples.size(); }
  std::vector<double> values(Metric m) const;
  MetricSummary summary(Metric m) const { return summarize(values(m)); }
  double mean(Metric m) const { return summary(m).mean; }
};

// ---------------------------------------------------------------- data

struct TextModalityData {
  FeatureMatrix dense;               // vocabulary-independent text features
  std::vector<TermCounts> documents;  // parallel to dense rows
};

struct ImageModalityData {
  FeatureMatrix matrix;  // rows only for campaigns with at least one image
};

/// Per-campaign features of every modality, computed once.
struct ExperimentData {
  std::optional<TextModalityData> text;
  std::optional<ImageModalityData> image;

  /// Builds the id -> row maps. Called by the preparation helpers.
  void index();
  std::optional<std::size_t> text_row(const std::string& id) const;
  std::optional<std::size_t> image_row(const std::string& id) const;

 private:
  std::unordered_map<std::string, std::size_t> text_rows_;
  std::unordered_map<std::string, std::size_t> image_rows_;
};

/// Text features for every campaign; image features when `sidecar_dir` is set
/// (campaigns without images get no image row).
ExperimentData prepare_experiment_data(const Corpus& corpus, const TextProviders& providers,
                                       const std::optional<std::filesystem::path>& sidecar_dir,
                                       ImageAggregation aggregation = ImageAggregation::Mean);

// ---------------------------------------------------------------- protocols

struct Split {
  std::vector<LabeledEntry> train;
  std::vector<LabeledEntry> test;
};

/// Keeps the minority class whole, under-samples the majority without
/// replacement to the same size, then splits each class by
/// round(train_fraction * class size) clamped to [1, size-1]. Outputs are
/// sorted by id. Throws InvalidArgument when a class has fewer than 2 members.
Split balanced_split(const LabeledSet& labeled, double train_fraction, Rng& rng);

/// Minority whole plus an equal-size uniform sample of the majority, sorted by id.
std::vector<LabeledEntry> balanced_pool(const LabeledSet& labeled, Rng& rng);

/// Mean of the present probabilities. Throws InvalidArgument when both are absent.
double ensemble_combine(std::optional<double> text_probability, std::optional<double> image_probability);

/// One modality's fitted pipeline: vocabulary (text), selected columns, model.
struct FittedModality {
  Modality modality = Modality::Text;
  std::optional<TfidfVocabulary> vocabulary;
  std::vector<std::string> columns;  // selected feature names, model schema order
  /// Position of each selected column in the unfiltered layout: the dense text
  /// block followed by the vocabulary (text), or the 3057 image dims.
  std::vector<std::size_t> column_index;
  Model model;
};

/// Fits `modality` (Text or Image) on `train`. `removed` groups are excluded
/// before selection. Returns nullopt when no usable training rows/columns.
std::optional<FittedModality> fit_modality(const ExperimentData& data, Modality modality,
                                           const std::vector<LabeledEntry>& train,
                                           const ExperimentConfig& cfg, std::uint64_t seed,
                                           const std::vector<FeatureGroup>& removed = {});

/// Scores a campaign already present in `data`; nullopt when the campaign has
/// no row for the modality.
std::optional<double> score_fitted(const FittedModality& fitted, const ExperimentData& data,
                                   const std::string& id);

/// Text or Image modality alone (Ensemble delegates to run_ensemble_experiment).
/// Image runs use only campaigns that have images.
MetricsDistribution run_modality_experiment(const ExperimentConfig& cfg, const ExperimentData& data,
                                            const LabeledSet& labeled);

struct EnsembleResult {
  MetricsDistribution ensemble;
  MetricsDistribution text;   // same splits, text scores only
  MetricsDistribution image;  // same splits, test campaigns with images only
};

/// Shared split per iteration; independent text and image models; test
/// campaigns scored by ensemble_combine.
EnsembleResult run_ensemble_experiment(const ExperimentConfig& cfg, const ExperimentData& data,
                                       const LabeledSet& labeled);

/// Trains on balanced pools drawn from `assignment.labeled` ({1,5}) and tests
/// on the fixed `assignment.holdout` ({2,4}) for cfg.modality.
MetricsDistribution run_label3(const ExperimentConfig& cfg, const ExperimentData& data,
                               const LabelAssignment& assignment);

struct AblationRow {
  std::string name;  // "full" or the removed group
  MetricsDistribution distribution;
  double delta_auc = 0;  // mean AUC minus the full model's
};

/// First row is the full model, then one row per group in request order.
/// Throws InvalidArgument when `groups` would remove every available group.
std::vector<AblationRow> run_ablation(const ExperimentConfig& cfg, const ExperimentData& data,
                                      const LabeledSet& labeled, const std::vector<FeatureGroup>& groups);

/// Runs the protocol selected by cfg (label setup + modality) on a corpus.
MetricsDistribution run_experiment(const ExperimentConfig& cfg, const ExperimentData& data,
                                   const Corpus& corpus);

// ---------------------------------------------------------------- scoring

/// Models fitted on a balanced pool of the whole labeled set, for `score`.
struct ScoringBundle {
  std::optional<FittedModality> text;
  std::optional<FittedModality> image;
  ImageAggregation aggregation = ImageAggregation::Mean;

  nlohmann::json to_json() const;
  static ScoringBundle from_json(const nlohmann::json& j);
};

ScoringBundle fit_scoring_bundle(const ExperimentConfig& cfg, const ExperimentData& data,
                                 const LabeledSet& labeled);

struct CampaignScore {
  std::optional<double> text;
  std::optional<double> image;
  double combined = 0;
};

CampaignScore score_campaign(const ScoringBundle& bundle, const Campaign& campaign,
                             const TextProviders& providers,
                             const std::optional<std::filesystem::path>& sidecar_dir);

}  // namespace cfraud
