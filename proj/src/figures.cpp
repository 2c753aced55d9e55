// SPDX-License-Identifier: Apache-2.0
#include "cfraud/figures.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "cfraud/csv.hpp"
#include "cfraud/error.hpp"

namespace cfraud {

std::string_view to_string(FigureKind k) {
  switch (k) {
    case FigureKind::TextEmotions: return "text-emotions";
    case FigureKind::ImageEmotions: return "image-emotions";
    case FigureKind::WordImportance: return "word-importance";
    case FigureKind::ObjectPrevalence: return "object-prevalence";
    case FigureKind::FaceHistogram: return "face-histogram";
    case FigureKind::MetricsBoxes: return "metrics-boxes";
  }
  return "?";
}

FigureKind parse_figure_kind(std::string_view s) {
  static constexpr std::pair<std::string_view, FigureKind> kAliases[] = {
      {"TextEmotions", FigureKind::TextEmotions},       {"ImageEmotions", FigureKind::ImageEmotions},
      {"WordImportance", FigureKind::WordImportance},   {"ObjectPrevalence", FigureKind::ObjectPrevalence},
      {"FaceHistogram", FigureKind::FaceHistogram},     {"MetricsBoxes", FigureKind::MetricsBoxes}};
  for (const auto& [name, kind] : kAliases)
    if (s == name || s == to_string(kind)) return kind;
  throw InvalidArgument("unknown figure kind: " + std::string(s));
}

void FigureTable::write_csv(std::ostream& out) const {
  CsvWriter w(out);
  w.row(header);
  for (const auto& r : rows) w.row(r);
}

FaceStatistics face_statistics(const std::vector<double>& face_counts) {
  FaceStatistics s;
  if (face_counts.empty()) return s;
  double sum = 0;
  for (double f : face_counts) {
    sum += f;
    const auto k = static_cast<std::size_t>(std::llround(std::max(0.0, f)));
    if (s.histogram.size() <= k) s.histogram.resize(k + 1, 0);
    ++s.histogram[k];
  }
  s.mean = sum / static_cast<double>(face_counts.size());
  s.median = quantile(face_counts, 0.5);
  return s;
}

namespace {

std::string_view label_name(int label) { return label == kFraud ? "fraud" : "not_fraud"; }

/// Per-class column means over the labeled campaigns present in `m`.
struct ClassMeans {
  std::vector<double> fraud, clean;
};

template <class RowOf>
ClassMeans class_means(const FeatureMatrix& m, const LabeledSet& labeled, RowOf row_of,
                       const std::vector<std::size_t>& cols) {
  ClassMeans out{std::vector<double>(cols.size(), 0.0), std::vector<double>(cols.size(), 0.0)};
  std::size_t nf = 0, nc = 0;
  for (const auto& e : labeled.entries) {
    const auto r = row_of(e.id);
    if (!r) continue;
    auto& acc = e.label == kFraud ? out.fraud : out.clean;
    (e.label == kFraud ? nf : nc)++;
    for (std::size_t i = 0; i < cols.size(); ++i) acc[i] += m(*r, cols[i]);
  }
  if (nf == 0 || nc == 0) throw InvalidArgument("figure data needs both classes");
  for (auto& v : out.fraud) v /= static_cast<double>(nf);
  for (auto& v : out.clean) v /= static_cast<double>(nc);
  return out;
}

std::vector<std::size_t> columns_with_prefix(const FeatureMatrix& m, std::string_view p) {
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < m.cols(); ++i)
    if (m.schema()->name(i).starts_with(p)) cols.push_back(i);
  return cols;
}

const TextModalityData& need_text(const ExperimentData& d) {
  if (!d.text) throw InvalidArgument("text features not prepared");
  return *d.text;
}

const ImageModalityData& need_image(const ExperimentData& d) {
  if (!d.image) throw InvalidArgument("image features not prepared");
  return *d.image;
}

/// Rows ranked by decreasing (fraud - not fraud); ties by name.
FigureTable ranked(std::string first, const std::vector<std::string>& names, const ClassMeans& means,
                   std::size_t top) {
  std::vector<std::size_t> order(names.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double da = means.fraud[a] - means.clean[a], db = means.fraud[b] - means.clean[b];
    if (da != db) return da > db;
    return names[a] < names[b];
  });
  if (top > 0 && order.size() > top) order.resize(top);
  FigureTable t;
  t.header = {"rank", std::move(first), "mean_fraud", "mean_not_fraud", "difference"};
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto i = order[k];
    t.rows.push_back({std::to_string(k + 1), names[i], format_number(means.fraud[i]), format_number(means.clean[i]),
                      format_number(means.fraud[i] - means.clean[i])});
  }
  return t;
}

}  // namespace

FigureTable figure_text_emotions(const ExperimentData& data, const LabeledSet& labeled) {
  const auto& m = need_text(data).dense;
  const auto cols = columns_with_prefix(m, "sent:emotion.");
  const auto means = class_means(m, labeled, [&](const std::string& id) { return data.text_row(id); }, cols);
  FigureTable t;
  t.header = {"label", "emotion", "mean"};
  for (int label : {kNotFraud, kFraud})
    for (std::size_t i = 0; i < cols.size(); ++i)
      t.rows.push_back({std::string(label_name(label)), m.schema()->name(cols[i]).substr(13),
                        format_number((label == kFraud ? means.fraud : means.clean)[i])});
  return t;
}

FigureTable figure_image_emotions(const ExperimentData& data, const LabeledSet& labeled) {
  const auto& m = need_image(data).matrix;
  std::array<double, kImageEmotionDims> sum_f{}, sum_c{};
  std::size_t nf = 0, nc = 0;
  for (const auto& e : labeled.entries) {
    const auto r = data.image_row(e.id);
    if (!r) continue;
    const auto row = m.row(*r);
    const double mx = *std::max_element(row.begin(), row.begin() + kImageEmotionDims);
    std::array<double, kImageEmotionDims> p{};
    double z = 0;
    for (std::size_t i = 0; i < kImageEmotionDims; ++i) z += p[i] = std::exp(row[i] - mx);
    auto& acc = e.label == kFraud ? sum_f : sum_c;
    (e.label == kFraud ? nf : nc)++;
    for (std::size_t i = 0; i < kImageEmotionDims; ++i) acc[i] += p[i] / z;
  }
  if (nf == 0 || nc == 0) throw InvalidArgument("figure data needs both classes");
  FigureTable t;
  t.header = {"label", "emotion", "mean"};
  for (int label : {kNotFraud, kFraud})
    for (std::size_t i = 0; i < kImageEmotionDims; ++i) {
      const double v = label == kFraud ? sum_f[i] / static_cast<double>(nf) : sum_c[i] / static_cast<double>(nc);
      t.rows.push_back({std::string(label_name(label)), std::string(kImageEmotionNames[i]), format_number(v)});
    }
  return t;
}

FigureTable figure_word_importance(const ExperimentData& data, const LabeledSet& labeled, std::size_t min_df,
                                   std::size_t top) {
  const auto& text = need_text(data);
  std::vector<TermCounts> docs;
  std::vector<int> labels;
  for (const auto& e : labeled.entries)
    if (const auto r = data.text_row(e.id)) {
      docs.push_back(text.documents[*r]);
      labels.push_back(e.label);
    }
  if (docs.empty()) throw InvalidArgument("figure data needs labeled text");
  const auto vocab = tfidf_fit(docs, min_df);
  ClassMeans means{std::vector<double>(vocab.size(), 0.0), std::vector<double>(vocab.size(), 0.0)};
  std::size_t nf = 0, nc = 0;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    auto& acc = labels[d] == kFraud ? means.fraud : means.clean;
    (labels[d] == kFraud ? nf : nc)++;
    for (const auto& e : tfidf_transform(vocab, docs[d])) acc[e.index] += e.weight;
  }
  if (nf == 0 || nc == 0) throw InvalidArgument("figure data needs both classes");
  for (auto& v : means.fraud) v /= static_cast<double>(nf);
  for (auto& v : means.clean) v /= static_cast<double>(nc);
  return ranked("term", vocab.terms, means, top);
}

FigureTable figure_object_prevalence(const ExperimentData& data, const LabeledSet& labeled, std::size_t top) {
  const auto& m = need_image(data).matrix;
  const auto cols = columns_with_prefix(m, prefix::kSemantic);
  const auto means = class_means(m, labeled, [&](const std::string& id) { return data.image_row(id); }, cols);
  std::vector<std::string> names;
  for (auto c : cols) names.push_back(m.schema()->name(c).substr(prefix::kSemantic.size()));
  return ranked("class", names, means, top);
}

FigureTable figure_face_histogram(const ExperimentData& data, const LabeledSet& labeled) {
  const auto& m = need_image(data).matrix;
  const auto col = m.schema()->index_of("img.faces:mean");
  if (!col) throw SchemaError("image matrix lacks img.faces:mean");
  std::vector<double> fraud, clean;
  for (const auto& e : labeled.entries)
    if (const auto r = data.image_row(e.id)) (e.label == kFraud ? fraud : clean).push_back(m(*r, *col));
  if (fraud.empty() || clean.empty()) throw InvalidArgument("figure data needs both classes");
  FigureTable t;
  t.header = {"label", "statistic", "value"};
  for (int label : {kNotFraud, kFraud}) {
    const auto s = face_statistics(label == kFraud ? fraud : clean);
    const std::string name(label_name(label));
    t.rows.push_back({name, "mean", format_number(s.mean)});
    t.rows.push_back({name, "median", format_number(s.median)});
    for (std::size_t k = 0; k < s.histogram.size(); ++k)
      t.rows.push_back({name, "faces=" + std::to_string(k), std::to_string(s.histogram[k])});
  }
  return t;
}

FigureTable figure_metrics_boxes(const std::vector<std::pair<std::string, MetricsDistribution>>& runs) {
  FigureTable t;
  t.header = {"model", "metric", "min", "q1", "median", "q3", "max", "mean"};
  for (const auto& [name, dist] : runs) {
    if (dist.size() == 0) continue;
    for (auto m : kAllMetrics) {
      const auto s = dist.summary(m);
      t.rows.push_back({name, std::string(to_string(m)), format_number(s.min), format_number(s.q1),
                        format_number(s.median), format_number(s.q3), format_number(s.max), format_number(s.mean)});
    }
  }
  return t;
}

FigureTable export_figure_data(FigureKind kind, const FigureInputs& in) {
  if (kind == FigureKind::MetricsBoxes) {
    if (in.runs.empty()) throw InvalidArgument("metrics-boxes needs at least one run");
    return figure_metrics_boxes(in.runs);
  }
  if (!in.data || !in.labeled) throw InvalidArgument("figure " + std::string(to_string(kind)) + " needs features and labels");
  switch (kind) {
    case FigureKind::TextEmotions: return figure_text_emotions(*in.data, *in.labeled);
    case FigureKind::ImageEmotions: return figure_image_emotions(*in.data, *in.labeled);
    case FigureKind::WordImportance: return figure_word_importance(*in.data, *in.labeled, in.min_df, in.top);
    case FigureKind::ObjectPrevalence: return figure_object_prevalence(*in.data, *in.labeled, in.top);
    case FigureKind::FaceHistogram: return figure_face_histogram(*in.data, *in.labeled);
    case FigureKind::MetricsBoxes: break;
  }
  throw InvalidArgument("unknown figure kind");
}

}  // namespace cfraud
