// SPDX-License-Identifier: Apache-2.0
#include "cfraud/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <exception>
#include <istream>
#include <numeric>
#include <thread>

#include "cfraud/error.hpp"
#include "cfraud/text.hpp"

namespace cfraud {

using nlohmann::json;

// ---------------------------------------------------------------- enums

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::Text: return "text";
    case Modality::Image: return "image";
    case Modality::Ensemble: return "ensemble";
  }
  return "?";
}

Modality parse_modality(std::string_view s) {
  if (s == "text") return Modality::Text;
  if (s == "image") return Modality::Image;
  if (s == "ensemble" || s == "both") return Modality::Ensemble;
  throw InvalidArgument("unknown modality: " + std::string(s));
}

std::string_view to_string(SelectionMode m) { return m == SelectionMode::LeakFree ? "leak-free" : "full-dataset"; }

SelectionMode parse_selection_mode(std::string_view s) {
  if (s == "leak-free" || s == "leakfree") return SelectionMode::LeakFree;
  if (s == "paper" || s == "full-dataset" || s == "full") return SelectionMode::FullDataset;
  throw InvalidArgument("unknown selection mode: " + std::string(s));
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::Accuracy: return "accuracy";
    case Metric::Precision: return "precision";
    case Metric::Recall: return "recall";
    case Metric::F1: return "f1";
    case Metric::AUC: return "auc";
  }
  return "?";
}

double metric_value(const Metrics& m, Metric which) {
  switch (which) {
    case Metric::Accuracy: return m.accuracy;
    case Metric::Precision: return m.precision;
    case Metric::Recall: return m.recall;
    case Metric::F1: return m.f1;
    case Metric::AUC: return m.auc;
  }
  return 0;
}

// ---------------------------------------------------------------- config

std::size_t ExperimentConfig::effective_iterations() const {
  if (iterations > 0) return iterations;
  return classifier.kind == ClassifierKind::MLP ? kDefaultMlpIterations : kDefaultClassicalIterations;
}

void ExperimentConfig::validate() const {
  if (!(train_fraction > 0 && train_fraction < 1)) throw InvalidArgument("train_fraction must lie in (0,1)");
  if (!(alpha > 0 && alpha <= 1)) throw InvalidArgument("alpha must lie in (0,1]");
  if (workers == 0) throw InvalidArgument("workers must be at least 1");
  if (min_df == 0) throw InvalidArgument("min_df must be at least 1");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw InvalidArgument("config " + std::string(key) + ": bad number '" + std::string(v) + "'");
  return out;
}

}  // namespace

void apply_config_entry(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "label_setup") cfg.label_setup = parse_label_setup(value);
  else if (key == "classifier") cfg.classifier = parse_classifier_spec(value);
  else if (key == "modality") cfg.modality = parse_modality(value);
  else if (key == "iterations") cfg.iterations = parse_number<std::size_t>(key, value);
  else if (key == "train_fraction") cfg.train_fraction = parse_number<double>(key, value);
  else if (key == "seed") cfg.master_seed = parse_number<std::uint64_t>(key, value);
  else if (key == "selection") cfg.selection = parse_selection_mode(value);
  else if (key == "test") cfg.test = parse_significance_test(value);
  else if (key == "alpha") cfg.alpha = parse_number<double>(key, value);
  else if (key == "min_df") cfg.min_df = parse_number<std::size_t>(key, value);
  else if (key == "aggregation") {
    if (value == "mean") cfg.aggregation = ImageAggregation::Mean;
    else if (value == "primary") cfg.aggregation = ImageAggregation::PrimaryOnly;
    else throw InvalidArgument("aggregation must be mean or primary");
  } else if (key == "ablation_groups") {
    cfg.ablation_groups.clear();
    while (!value.empty()) {
      const auto comma = value.find(',');
      const auto item = trim(value.substr(0, comma));
      if (!item.empty()) cfg.ablation_groups.push_back(parse_feature_group(item));
      if (comma == std::string_view::npos) break;
      value.remove_prefix(comma + 1);
    }
  } else if (key == "workers") {
    cfg.workers = parse_number<std::size_t>(key, value);
  } else {
    throw InvalidArgument("unknown config key: " + std::string(key));
  }
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) throw ParseError("config: expected key=value", n);
    try {
      apply_config_entry(base, t.substr(0, eq), t.substr(eq + 1));
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), n);
    }
  }
  base.validate();
  return base;
}

json config_to_json(const ExperimentConfig& cfg) {
  json groups = json::array();
  for (auto g : cfg.ablation_groups) groups.push_back(std::string(to_string(g)));
  return {{"label_setup", std::string(to_string(cfg.label_setup))},
          {"classifier", describe(cfg.classifier)},
          {"modality", std::string(to_string(cfg.modality))},
          {"iterations", cfg.effective_iterations()},
          {"train_fraction", cfg.train_fraction},
          {"seed", cfg.master_seed},
          {"selection", std::string(to_string(cfg.selection))},
          {"test", std::string(to_string(cfg.test))},
          {"alpha", cfg.alpha},
          {"min_df", cfg.min_df},
          {"aggregation", cfg.aggregation == ImageAggregation::Mean ? "mean" : "primary"},
          {"ablation_groups", groups},
          {"workers", cfg.workers}};
}

// ---------------------------------------------------------------- summaries

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidArgument("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  if (values.size() > 1) {
    double ss = 0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (n - 1));
  }
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  s.q1 = quantile(values, 0.25);
  s.median = quantile(values, 0.5);
  s.q3 = quantile(values, 0.75);
  return s;
}

std::vector<double> MetricsDistribution::values(Metric m) const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(metric_value(s, m));
  return out;
}

// ---------------------------------------------------------------- data

void ExperimentData::index() {
  text_rows_.clear();
  image_rows_.clear();
  if (text)
    for (std::size_t r = 0; r < text->dense.rows(); ++r) text_rows_.emplace(text->dense.row_ids()[r], r);
  if (image)
    for (std::size_t r = 0; r < image->matrix.rows(); ++r) image_rows_.emplace(image->matrix.row_ids()[r], r);
}

std::optional<std::size_t> ExperimentData::text_row(const std::string& id) const {
  const auto it = text_rows_.find(id);
  if (it == text_rows_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> ExperimentData::image_row(const std::string& id) const {
  const auto it = image_rows_.find(id);
  if (it == image_rows_.end()) return std::nullopt;
  return it->second;
}

ExperimentData prepare_experiment_data(const Corpus& corpus, const TextProviders& providers,
                                       const std::optional<std::filesystem::path>& sidecar_dir,
                                       ImageAggregation aggregation) {
  ExperimentData data;
  TextModalityData text;
  std::vector<std::string> ids;
  std::vector<double> dense;
  dense.reserve(corpus.size() * kDenseTextDimensions);
  for (const auto& c : corpus.campaigns()) {
    const auto row = dense_text_features(c.description, providers);
    dense.insert(dense.end(), row.begin(), row.end());
    text.documents.push_back(term_counts(c.description));
    ids.push_back(c.id);
  }
  text.dense = FeatureMatrix(make_schema(dense_text_feature_names(*providers.catalog)), ids, std::move(dense));
  data.text = std::move(text);

  if (sidecar_dir) {
    std::vector<std::string> image_ids;
    std::vector<double> values;
    for (const auto& c : corpus.campaigns()) {
      if (c.images.empty()) continue;
      const auto v = assemble_image_features(c, *sidecar_dir, aggregation);
      if (v.missing) continue;
      values.insert(values.end(), v.values.begin(), v.values.end());
      image_ids.push_back(c.id);
    }
    data.image = ImageModalityData{FeatureMatrix(image_schema(), std::move(image_ids), std::move(values))};
  }
  data.index();
  return data;
}

// ---------------------------------------------------------------- splits

namespace {

void split_classes(const std::vector<LabeledEntry>& entries, std::vector<LabeledEntry>& fraud,
                   std::vector<LabeledEntry>& clean) {
  for (const auto& e : entries) (e.label == kFraud ? fraud : clean).push_back(e);
}

void sort_by_id(std::vector<LabeledEntry>& v) {
  std::sort(v.begin(), v.end(), [](const LabeledEntry& a, const LabeledEntry& b) { return a.id < b.id; });
}

/// Uniform sample of `m` entries without replacement.
std::vector<LabeledEntry> sample(std::vector<LabeledEntry> v, std::size_t m, Rng& rng) {
  shuffle(v, rng);
  v.resize(m);
  return v;
}

}  // namespace

std::vector<LabeledEntry> balanced_pool(const LabeledSet& labeled, Rng& rng) {
  std::vector<LabeledEntry> fraud, clean;
  split_classes(labeled.entries, fraud, clean);
  if (fraud.empty() || clean.empty()) throw InvalidArgument("balanced_pool: both classes required");
  const std::size_t m = std::min(fraud.size(), clean.size());
  if (fraud.size() > m) fraud = sample(std::move(fraud), m, rng);
  else clean = sample(std::move(clean), m, rng);
  std::vector<LabeledEntry> pool = std::move(fraud);
  pool.insert(pool.end(), clean.begin(), clean.end());
  sort_by_id(pool);
  return pool;
}

Split balanced_split(const LabeledSet& labeled, double train_fraction, Rng& rng) {
  std::vector<LabeledEntry> fraud, clean;
  split_classes(labeled.entries, fraud, clean);
  if (fraud.size() < 2 || clean.size() < 2)
    throw InvalidArgument("balanced_split: each class needs at least 2 members (fraud " +
                          std::to_string(fraud.size()) + ", not fraud " + std::to_string(clean.size()) + ")");
  const std::size_t m = std::min(fraud.size(), clean.size());
  const auto n_train = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(m))), 1, m - 1);
  Split s;
  for (auto* cls : {&fraud, &clean}) {
    auto chosen = sample(std::move(*cls), m, rng);
    s.train.insert(s.train.end(), chosen.begin(), chosen.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.test.insert(s.test.end(), chosen.begin() + static_cast<std::ptrdiff_t>(n_train), chosen.end());
  }
  sort_by_id(s.train);
  sort_by_id(s.test);
  return s;
}

double ensemble_combine(std::optional<double> text_probability, std::optional<double> image_probability) {
  if (text_probability && image_probability) return (*text_probability + *image_probability) / 2.0;
  if (text_probability) return *text_probability;
  if (image_probability) return *image_probability;
  throw InvalidArgument("ensemble_combine: no modality score available");
}

// ---------------------------------------------------------------- fitting

namespace {

/// Vocabulary and column set fixed before the iterations (FullDataset mode).
struct Preselection {
  std::optional<TfidfVocabulary> vocabulary;
  std::vector<std::size_t> columns;  // unfiltered-layout positions
};

bool removed_name(std::string_view name, const std::vector<FeatureGroup>& removed) {
  if (removed.empty()) return false;
  const auto g = group_of(name);
  return g && std::find(removed.begin(), removed.end(), *g) != removed.end();
}

std::vector<std::string> layout_names(const ExperimentData& data, Modality modality, const TfidfVocabulary* vocab) {
  if (modality == Modality::Image) return image_feature_names();
  auto names = data.text->dense.schema()->names();
  if (vocab)
    for (const auto& t : vocab->terms) names.push_back(std::string(prefix::kTfidf) + t);
  return names;
}

/// Full unfiltered row for a campaign row index.
void layout_row(const ExperimentData& data, Modality modality, std::size_t row, const TfidfVocabulary* vocab,
                std::vector<double>& out) {
  if (modality == Modality::Image) {
    const auto r = data.image->matrix.row(row);
    out.assign(r.begin(), r.end());
    return;
  }
  const auto d = data.text->dense.row(row);
  out.assign(d.begin(), d.end());
  if (!vocab) return;
  out.resize(d.size() + vocab->size(), 0.0);
  for (const auto& e : tfidf_transform(*vocab, data.text->documents[row])) out[d.size() + e.index] = e.weight;
}

std::optional<std::size_t> modality_row(const ExperimentData& data, Modality modality, const std::string& id) {
  return modality == Modality::Image ? data.image_row(id) : data.text_row(id);
}

bool has_modality(const ExperimentData& data, Modality modality) {
  return modality == Modality::Image ? data.image.has_value() : data.text.has_value();
}

struct TrainingMatrix {
  std::vector<std::size_t> candidates;  // unfiltered-layout positions of the columns
  FeatureMatrix matrix;
  std::vector<int> labels;
};

TrainingMatrix candidate_matrix(const ExperimentData& data, Modality modality, const std::vector<LabeledEntry>& rows,
                                const TfidfVocabulary* vocab, const std::vector<FeatureGroup>& removed,
                                const std::vector<std::size_t>* restrict_to) {
  const auto names = layout_names(data, modality, vocab);
  TrainingMatrix t;
  if (restrict_to) {
    t.candidates = *restrict_to;
  } else {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (!removed_name(names[i], removed)) t.candidates.push_back(i);
  }
  std::vector<std::string> cand_names;
  cand_names.reserve(t.candidates.size());
  for (auto i : t.candidates) cand_names.push_back(names[i]);

  std::vector<std::string> ids;
  std::vector<double> values;
  values.reserve(rows.size() * t.candidates.size());
  std::vector<double> full;
  for (const auto& e : rows) {
    const auto r = modality_row(data, modality, e.id);
    if (!r) continue;
    layout_row(data, modality, *r, vocab, full);
    for (auto i : t.candidates) values.push_back(full[i]);
    ids.push_back(e.id);
    t.labels.push_back(e.label);
  }
  t.matrix = FeatureMatrix(make_schema(std::move(cand_names)), std::move(ids), std::move(values));
  return t;
}

bool both_classes(const std::vector<int>& labels) {
  return std::find(labels.begin(), labels.end(), kFraud) != labels.end() &&
         std::find(labels.begin(), labels.end(), kNotFraud) != labels.end();
}

/// Mask column positions; never empty: falls back to the smallest p-value.
std::vector<std::size_t> significant_columns(const TrainingMatrix& t, const ExperimentConfig& cfg) {
  const auto mask = select_significant(t.matrix, t.labels, cfg.test, cfg.alpha);
  auto kept = mask.kept_indices();
  if (kept.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < mask.features.size(); ++i)
      if (mask.features[i].p_value < mask.features[best].p_value) best = i;
    kept.push_back(best);
  }
  return kept;
}

std::vector<std::string> text_docs_labels(const ExperimentData& data, const std::vector<LabeledEntry>& rows,
                                          std::vector<TermCounts>& docs) {
  std::vector<std::string> ids;
  for (const auto& e : rows)
    if (const auto r = data.text_row(e.id)) {
      docs.push_back(data.text->documents[*r]);
      ids.push_back(e.id);
    }
  return ids;
}

std::optional<Preselection> preselect(const ExperimentData& data, Modality modality,
                                      const std::vector<LabeledEntry>& all, const ExperimentConfig& cfg,
                                      const std::vector<FeatureGroup>& removed) {
  if (!has_modality(data, modality)) return std::nullopt;
  Preselection p;
  if (modality == Modality::Text) {
    std::vector<TermCounts> docs;
    text_docs_labels(data, all, docs);
    if (docs.empty()) return std::nullopt;
    p.vocabulary = tfidf_fit(docs, cfg.min_df);
  }
  auto t = candidate_matrix(data, modality, all, p.vocabulary ? &*p.vocabulary : nullptr, removed, nullptr);
  if (t.candidates.empty() || !both_classes(t.labels)) return std::nullopt;
  for (auto k : significant_columns(t, cfg)) p.columns.push_back(t.candidates[k]);
  return p;
}

std::optional<FittedModality> fit_modality_impl(const ExperimentData& data, Modality modality,
                                                const std::vector<LabeledEntry>& train, const ExperimentConfig& cfg,
                                                std::uint64_t seed, const std::vector<FeatureGroup>& removed,
                                                const Preselection* pre) {
  if (modality == Modality::Ensemble) throw InvalidArgument("fit_modality: Text or Image expected");
  if (!has_modality(data, modality)) return std::nullopt;
  FittedModality fitted;
  fitted.modality = modality;
  if (modality == Modality::Text) {
    if (pre) {
      fitted.vocabulary = pre->vocabulary;
    } else {
      std::vector<TermCounts> docs;
      text_docs_labels(data, train, docs);
      if (docs.empty()) return std::nullopt;
      fitted.vocabulary = tfidf_fit(docs, cfg.min_df);
    }
  }
  const TfidfVocabulary* vocab = fitted.vocabulary ? &*fitted.vocabulary : nullptr;
  auto t = candidate_matrix(data, modality, train, vocab, removed, pre ? &pre->columns : nullptr);
  if (t.candidates.empty() || !both_classes(t.labels)) return std::nullopt;

  std::vector<std::size_t> keep;
  if (pre) {
    keep.resize(t.candidates.size());
    std::iota(keep.begin(), keep.end(), std::size_t{0});
  } else {
    keep = significant_columns(t, cfg);
  }
  const auto selected = t.matrix.select_columns(keep);
  for (auto k : keep) fitted.column_index.push_back(t.candidates[k]);
  fitted.columns = selected.schema()->names();
  ClassifierSpec spec = cfg.classifier;
  spec.seed = seed;
  fitted.model = fit_classifier(spec, selected, t.labels);
  return fitted;
}

}  // namespace

std::optional<FittedModality> fit_modality(const ExperimentData& data, Modality modality,
                                           const std::vector<LabeledEntry>& train, const ExperimentConfig& cfg,
                                           std::uint64_t seed, const std::vector<FeatureGroup>& removed) {
  return fit_modality_impl(data, modality, train, cfg, seed, removed, nullptr);
}

std::optional<double> score_fitted(const FittedModality& fitted, const ExperimentData& data, const std::string& id) {
  const auto r = modality_row(data, fitted.modality, id);
  if (!r) return std::nullopt;
  std::vector<double> full;
  layout_row(data, fitted.modality, *r, fitted.vocabulary ? &*fitted.vocabulary : nullptr, full);
  std::vector<double> x;
  x.reserve(fitted.column_index.size());
  for (auto i : fitted.column_index) x.push_back(full.at(i));
  return fitted.model.predict_row(x);
}

// ---------------------------------------------------------------- protocols

namespace {

struct IterationOutcome {
  std::optional<Metrics> ensemble;
  std::optional<Metrics> text;
  std::optional<Metrics> image;
};

struct RunPlan {
  const ExperimentConfig* cfg = nullptr;
  const ExperimentData* data = nullptr;
  std::vector<FeatureGroup> removed;
  std::optional<Preselection> pre_text;
  std::optional<Preselection> pre_image;
  bool want_text = false;
  bool want_image = false;
};

std::optional<Metrics> metrics_if_valid(const std::vector<ScoredExample>& scores) {
  bool pos = false, neg = false;
  for (const auto& s : scores) (s.label == kFraud ? pos : neg) = true;
  if (!pos || !neg) return std::nullopt;
  return evaluate_metrics(scores);
}

IterationOutcome run_iteration(const RunPlan& plan, const std::vector<LabeledEntry>& train,
                               const std::vector<LabeledEntry>& test, std::uint64_t iteration_seed) {
  const auto& cfg = *plan.cfg;
  const auto& data = *plan.data;
  const bool global = cfg.selection == SelectionMode::FullDataset;
  std::optional<FittedModality> text, image;
  if (plan.want_text && (!global || plan.pre_text))
    text = fit_modality_impl(data, Modality::Text, train, cfg, derive_seed(iteration_seed, 1), plan.removed,
                             global ? &*plan.pre_text : nullptr);
  if (plan.want_image && (!global || plan.pre_image))
    image = fit_modality_impl(data, Modality::Image, train, cfg, derive_seed(iteration_seed, 2), plan.removed,
                              global ? &*plan.pre_image : nullptr);

  std::vector<ScoredExample> s_text, s_image, s_ens;
  for (const auto& e : test) {
    const auto pt = text ? score_fitted(*text, data, e.id) : std::nullopt;
    const auto pi = image ? score_fitted(*image, data, e.id) : std::nullopt;
    if (pt) s_text.push_back({e.label, *pt});
    if (pi) s_image.push_back({e.label, *pi});
    if (pt || pi) s_ens.push_back({e.label, ensemble_combine(pt, pi)});
  }
  IterationOutcome out;
  if (plan.want_text) out.text = metrics_if_valid(s_text);
  if (plan.want_image) out.image = metrics_if_valid(s_image);
  if (plan.want_text && plan.want_image) out.ensemble = metrics_if_valid(s_ens);
  return out;
}

/// Runs `job(i)` for i in [0, n) on `workers` threads and returns results in index order.
template <class Job>
std::vector<IterationOutcome> run_pool(std::size_t n, std::size_t workers, Job job) {
  std::vector<IterationOutcome> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t width = std::max<std::size_t>(1, std::min(workers, n));
  if (width == 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < width; ++w) threads.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

LabeledSet filter_rows(const LabeledSet& labeled, const ExperimentData& data, Modality modality) {
  LabeledSet out;
  for (const auto& e : labeled.entries) {
    const bool keep = modality == Modality::Ensemble ? (data.text_row(e.id) || data.image_row(e.id))
                                                     : modality_row(data, modality, e.id).has_value();
    if (keep) out.entries.push_back(e);
  }
  return out;
}

RunPlan make_plan(const ExperimentConfig& cfg, const ExperimentData& data, Modality modality,
                  const std::vector<LabeledEntry>& all, const std::vector<FeatureGroup>& removed) {
  cfg.validate();
  RunPlan plan;
  plan.cfg = &cfg;
  plan.data = &data;
  plan.removed = removed;
  plan.want_text = modality != Modality::Image;
  plan.want_image = modality != Modality::Text;
  if (plan.want_text && !data.text) throw InvalidArgument("text features not prepared");
  if (plan.want_image && !data.image) throw InvalidArgument("image features not prepared (no sidecar directory)");
  if (cfg.selection == SelectionMode::FullDataset) {
    if (plan.want_text) plan.pre_text = preselect(data, Modality::Text, all, cfg, removed);
    if (plan.want_image) plan.pre_image = preselect(data, Modality::Image, all, cfg, removed);
  }
  return plan;
}

EnsembleResult collect(const std::vector<IterationOutcome>& outcomes) {
  EnsembleResult r;
  for (const auto& o : outcomes) {
    if (o.ensemble) r.ensemble.samples.push_back(*o.ensemble);
    if (o.text) r.text.samples.push_back(*o.text);
    if (o.image) r.image.samples.push_back(*o.image);
  }
  return r;
}

EnsembleResult run_split_protocol(const ExperimentConfig& cfg, const ExperimentData& data, const LabeledSet& labeled,
                                  Modality modality, const std::vector<FeatureGroup>& removed) {
  const LabeledSet usable = filter_rows(labeled, data, modality);
  const RunPlan plan = make_plan(cfg, data, modality, usable.entries, removed);
  const auto outcomes = run_pool(cfg.effective_iterations(), cfg.workers, [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(cfg.master_seed, i);
    Rng rng = make_rng(derive_seed(seed, 0));
    const Split split = balanced_split(usable, cfg.train_fraction, rng);
    return run_iteration(plan, split.train, split.test, seed);
  });
  return collect(outcomes);
}

MetricsDistribution pick(EnsembleResult r, Modality modality) {
  switch (modality) {
    case Modality::Text: return std::move(r.text);
    case Modality::Image: return std::move(r.image);
    case Modality::Ensemble: return std::move(r.ensemble);
  }
  return {};
}

}  // namespace

MetricsDistribution run_modality_experiment(const ExperimentConfig& cfg, const ExperimentData& data,
                                            const LabeledSet& labeled) {
  if (cfg.modality == Modality::Ensemble) return run_ensemble_experiment(cfg, data, labeled).ensemble;
  return pick(run_split_protocol(cfg, data, labeled, cfg.modality, {}), cfg.modality);
}

EnsembleResult run_ensemble_experiment(const ExperimentConfig& cfg, const ExperimentData& data,
                                       const LabeledSet& labeled) {
  return run_split_protocol(cfg, data, labeled, Modality::Ensemble, {});
}

MetricsDistribution run_label3(const ExperimentConfig& cfg, const ExperimentData& data,
                               const LabelAssignment& assignment) {
  const LabeledSet train_pop = filter_rows(assignment.labeled, data, cfg.modality);
  const LabeledSet test = filter_rows(assignment.holdout, data, cfg.modality);
  if (test.entries.empty()) throw InvalidArgument("label III: no {2,4} campaigns to test on");
  const RunPlan plan = make_plan(cfg, data, cfg.modality, train_pop.entries, {});
  const auto outcomes = run_pool(cfg.effective_iterations(), cfg.workers, [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(cfg.master_seed, i);
    Rng rng = make_rng(derive_seed(seed, 0));
    const auto pool = balanced_pool(train_pop, rng);
    return run_iteration(plan, pool, test.entries, seed);
  });
  return pick(collect(outcomes), cfg.modality);
}

std::vector<AblationRow> run_ablation(const ExperimentConfig& cfg, const ExperimentData& data,
                                      const LabeledSet& labeled, const std::vector<FeatureGroup>& groups) {
  std::vector<FeatureGroup> available;
  for (auto g : kAllFeatureGroups) {
    const bool text = is_text_group(g);
    if ((text && cfg.modality != Modality::Image) || (!text && cfg.modality != Modality::Text)) available.push_back(g);
  }
  for (auto g : groups) {
    if (std::find(available.begin(), available.end(), g) == available.end())
      throw InvalidArgument("group " + std::string(to_string(g)) + " is not part of the " +
                            std::string(to_string(cfg.modality)) + " modality");
    if (available.size() == 1) throw InvalidArgument("ablation would remove every feature group");
  }
  std::vector<AblationRow> rows;
  rows.push_back({"full", pick(run_split_protocol(cfg, data, labeled, cfg.modality, {}), cfg.modality), 0.0});
  const double base = rows.front().distribution.mean(Metric::AUC);
  for (auto g : groups) {
    AblationRow row;
    row.name = std::string(to_string(g));
    row.distribution = pick(run_split_protocol(cfg, data, labeled, cfg.modality, {g}), cfg.modality);
    row.delta_auc = row.distribution.mean(Metric::AUC) - base;
    rows.push_back(std::move(row));
  }
  return rows;
}

MetricsDistribution run_experiment(const ExperimentConfig& cfg, const ExperimentData& data, const Corpus& corpus) {
  const auto assignment = apply_label_setup(corpus, corpus.scores(), cfg.label_setup);
  if (cfg.label_setup == LabelSetup::LabelIII) return run_label3(cfg, data, assignment);
  return run_modality_experiment(cfg, data, assignment.labeled);
}

// ---------------------------------------------------------------- scoring

namespace {

json fitted_to_json(const FittedModality& f) {
  json j = {{"modality", std::string(to_string(f.modality))}, {"columns", f.columns}, {"model", f.model.to_json()}};
  if (f.vocabulary)
    j["vocabulary"] = {{"terms", f.vocabulary->terms},
                       {"document_frequency", f.vocabulary->document_frequency},
                       {"document_count", f.vocabulary->document_count}};
  return j;
}

std::vector<std::size_t> resolve_columns(Modality modality, const TfidfVocabulary* vocab,
                                         const std::vector<std::string>& columns) {
  std::vector<std::size_t> out;
  if (modality == Modality::Image) {
    const auto& schema = *image_schema();
    for (const auto& c : columns) {
      const auto i = schema.index_of(c);
      if (!i) throw SchemaError("unknown image feature " + c);
      out.push_back(*i);
    }
    return out;
  }
  static const DefaultTextProviders defaults;
  const auto dense = dense_text_feature_names(*defaults.view().catalog);
  for (const auto& c : columns) {
    if (c.starts_with(prefix::kTfidf)) {
      const auto i = vocab ? vocab->index_of(std::string_view(c).substr(prefix::kTfidf.size())) : std::nullopt;
      if (!i) throw SchemaError("term not in vocabulary: " + c);
      out.push_back(dense.size() + *i);
    } else {
      const auto it = std::find(dense.begin(), dense.end(), c);
      if (it == dense.end()) throw SchemaError("unknown text feature " + c);
      out.push_back(static_cast<std::size_t>(it - dense.begin()));
    }
  }
  return out;
}

FittedModality fitted_from_json(const json& j) {
  FittedModality f;
  f.modality = parse_modality(j.at("modality").get<std::string>());
  f.columns = j.at("columns").get<std::vector<std::string>>();
  f.model = Model::from_json(j.at("model"));
  if (f.model.schema()->names() != f.columns) throw SchemaError("bundle columns differ from model schema");
  if (j.contains("vocabulary")) {
    const auto& v = j["vocabulary"];
    TfidfVocabulary vocab;
    vocab.terms = v.at("terms").get<std::vector<std::string>>();
    vocab.document_frequency = v.at("document_frequency").get<std::vector<std::size_t>>();
    vocab.document_count = v.at("document_count").get<std::size_t>();
    if (vocab.terms.size() != vocab.document_frequency.size()) throw ParseError("vocabulary arrays differ in length");
    f.vocabulary = std::move(vocab);
  }
  f.column_index = resolve_columns(f.modality, f.vocabulary ? &*f.vocabulary : nullptr, f.columns);
  return f;
}

}  // namespace

json ScoringBundle::to_json() const {
  json j = {{"format", "cfraud-bundle-1"},
            {"aggregation", aggregation == ImageAggregation::Mean ? "mean" : "primary"}};
  if (text) j["text"] = fitted_to_json(*text);
  if (image) j["image"] = fitted_to_json(*image);
  return j;
}

ScoringBundle ScoringBundle::from_json(const json& j) {
  try {
    if (j.at("format") != "cfraud-bundle-1") throw ParseError("unsupported bundle format");
    ScoringBundle b;
    b.aggregation = j.at("aggregation") == "primary" ? ImageAggregation::PrimaryOnly : ImageAggregation::Mean;
    if (j.contains("text")) b.text = fitted_from_json(j["text"]);
    if (j.contains("image")) b.image = fitted_from_json(j["image"]);
    if (!b.text && !b.image) throw ParseError("bundle holds no model");
    return b;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bundle: ") + e.what());
  }
}

ScoringBundle fit_scoring_bundle(const ExperimentConfig& cfg, const ExperimentData& data, const LabeledSet& labeled) {
  cfg.validate();
  ScoringBundle b;
  b.aggregation = cfg.aggregation;
  const bool want_text = cfg.modality != Modality::Image;
  const bool want_image = cfg.modality != Modality::Text;
  if (want_text && data.text) {
    const auto usable = filter_rows(labeled, data, Modality::Text);
    Rng rng = make_rng(derive_seed(cfg.master_seed, 0));
    b.text = fit_modality(data, Modality::Text, balanced_pool(usable, rng), cfg, derive_seed(cfg.master_seed, 1));
  }
  if (want_image && data.image) {
    const auto usable = filter_rows(labeled, data, Modality::Image);
    if (usable.count(kFraud) > 0 && usable.count(kNotFraud) > 0) {
      Rng rng = make_rng(derive_seed(cfg.master_seed, 0));
      b.image = fit_modality(data, Modality::Image, balanced_pool(usable, rng), cfg, derive_seed(cfg.master_seed, 2));
    }
  }
  if (!b.text && !b.image) throw InvalidArgument("no modality could be fitted");
  return b;
}

CampaignScore score_campaign(const ScoringBundle& bundle, const Campaign& campaign, const TextProviders& providers,
                             const std::optional<std::filesystem::path>& sidecar_dir) {
  CampaignScore s;
  if (bundle.text) {
    const auto& f = *bundle.text;
    auto full = dense_text_features(campaign.description, providers);
    const std::size_t dense = full.size();
    if (f.vocabulary) {
      full.resize(dense + f.vocabulary->size(), 0.0);
      for (const auto& e : tfidf_transform(*f.vocabulary, campaign.description)) full[dense + e.index] = e.weight;
    }
    std::vector<double> x;
    for (auto i : f.column_index) x.push_back(full.at(i));
    s.text = f.model.predict_row(x);
  }
  if (bundle.image && sidecar_dir && !campaign.images.empty()) {
    const auto v = assemble_image_features(campaign, *sidecar_dir, bundle.aggregation);
    if (!v.missing) {
      std::vector<double> x;
      for (auto i : bundle.image->column_index) x.push_back(v.values.at(i));
      s.image = bundle.image->model.predict_row(x);
    }
  }
  s.combined = ensemble_combine(s.text, s.image);
  return s;
}

}  // namespace cfraud
