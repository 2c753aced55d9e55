// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "cfraud/error.hpp"
#include "cfraud/text.hpp"
#include "cfraud/textfeat.hpp"

namespace cfraud {

TermCounts term_counts(std::string_view text) {
  TermCounts out;
  for (auto& w : text::lowered_words(text)) ++out[std::move(w)];
  return out;
}

std::optional<std::size_t> TfidfVocabulary::index_of(std::string_view term) const {
  const auto it = std::lower_bound(terms.begin(), terms.end(), term);
  if (it == terms.end() || *it != term) return std::nullopt;
  return static_cast<std::size_t>(it - terms.begin());
}

double TfidfVocabulary::idf(std::size_t i) const {
  const double n = static_cast<double>(document_count);
  return std::log((1.0 + n) / (1.0 + static_cast<double>(document_frequency.at(i)))) + 1.0;
}

TfidfVocabulary tfidf_fit(std::span<const TermCounts> documents, std::size_t min_df) {
  if (documents.empty()) throw InvalidArgument("tfidf_fit: empty corpus");
  std::map<std::string_view, std::size_t> df;
  for (const auto& doc : documents)
    for (const auto& [term, count] : doc) ++df[term];
  TfidfVocabulary v;
  v.document_count = documents.size();
  for (const auto& [term, n] : df) {
    if (n < std::max<std::size_t>(min_df, 1)) continue;
    v.terms.emplace_back(term);
    v.document_frequency.push_back(n);
  }
  return v;
}

TfidfVocabulary tfidf_fit(std::span<const std::string> documents, std::size_t min_df) {
  std::vector<TermCounts> counts;
  counts.reserve(documents.size());
  for (const auto& d : documents) counts.push_back(term_counts(d));
  return tfidf_fit(std::span<const TermCounts>(counts), min_df);
}

std::vector<SparseEntry> tfidf_transform(const TfidfVocabulary& vocab, const TermCounts& doc) {
  std::vector<SparseEntry> out;
  for (const auto& [term, count] : doc) {
    const auto idx = vocab.index_of(term);
    if (!idx) continue;
    out.push_back({*idx, static_cast<double>(count) * vocab.idf(*idx)});
  }
  double sq = 0;
  for (const auto& e : out) sq += e.weight * e.weight;
  if (sq > 0) {
    const double norm = std::sqrt(sq);
    for (auto& e : out) e.weight /= norm;
  }
  return out;
}

std::vector<SparseEntry> tfidf_transform(const TfidfVocabulary& vocab, std::string_view text) {
  return tfidf_transform(vocab, term_counts(text));
}

// ---------------------------------------------------------------- assembly

std::vector<std::string> dense_text_feature_names(const ShapeCatalog& catalog) {
  std::vector<std::string> names;
  names.reserve(kDenseTextDimensions);
  const std::string sent(prefix::kSentiment);
  for (auto e : kEmotionNames) names.push_back(sent + "emotion." + std::string(e));
  for (auto t : kToneNames) names.push_back(sent + "tone." + std::string(t));
  for (auto r : kReadabilityNames) names.push_back(std::string(prefix::kReadability) + std::string(r));
  for (auto& f : form_feature_names(catalog)) names.push_back(std::move(f));
  for (auto e : kEntityTypes) names.push_back(std::string(prefix::kNer) + std::string(e));
  return names;
}

std::vector<double> dense_text_features(std::string_view text, const TextProviders& providers) {
  if (!providers.sentiment || !providers.tagger || !providers.catalog)
    throw InvalidArgument("text providers incomplete");
  std::vector<double> out;
  out.reserve(kDenseTextDimensions);
  const auto sent = sentiment_tone(text, *providers.sentiment);
  out.insert(out.end(), sent.emotions.begin(), sent.emotions.end());
  out.insert(out.end(), sent.tones.begin(), sent.tones.end());
  const auto read = readability_profile(text).values();
  out.insert(out.end(), read.begin(), read.end());
  const auto form = form_descriptors(text, *providers.catalog);
  out.insert(out.end(), form.begin(), form.end());
  const auto ner = ner_counts(text, *providers.tagger);
  out.insert(out.end(), ner.begin(), ner.end());
  return out;
}

FeatureVector assemble_text_features(const Campaign& campaign, const TextProviders& providers,
                                     const TfidfVocabulary& vocab) {
  auto names = dense_text_feature_names(*providers.catalog);
  names.reserve(names.size() + vocab.size());
  for (const auto& t : vocab.terms) names.push_back(std::string(prefix::kTfidf) + t);
  auto values = dense_text_features(campaign.description, providers);
  values.resize(kDenseTextDimensions + vocab.size(), 0.0);
  for (const auto& e : tfidf_transform(vocab, campaign.description)) values[kDenseTextDimensions + e.index] = e.weight;
  return {make_schema(std::move(names)), std::move(values)};
}

}  // namespace cfraud
