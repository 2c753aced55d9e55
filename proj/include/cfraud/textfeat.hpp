// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cfraud/corpus.hpp"
#include "cfraud/features.hpp"
#include "cfraud/resources.hpp"

namespace cfraud {

// ---------------------------------------------------------------- sentiment

inline constexpr std::array<std::string_view, 5> kEmotionNames = {"sadness", "joy", "fear",
                                                                  "disgust", "anger"};
inline constexpr std::array<std::string_view, 7> kToneNames = {
    "frustration", "satisfaction", "excitement", "politeness", "impoliteness", "sadness", "sympathy"};

struct SentimentToneProfile {
  std::array<double, 5> emotions{};  // kEmotionNames order
  std::array<double, 7> tones{};     // kToneNames order

  bool operator==(const SentimentToneProfile&) const = default;
};

class SentimentProvider {
 public:
  virtual ~SentimentProvider() = default;
  /// Throws ProviderError when the backend fails.
  virtual SentimentToneProfile analyze(std::string_view text) const = 0;
  virtual std::string name() const = 0;
};

/// Offline fallback: score = lexicon hits / word tokens per category, clipped
/// to [0,1]. Deterministic.
class LexiconSentimentProvider final : public SentimentProvider {
 public:
  LexiconSentimentProvider();  // bundled lexicon
  explicit LexiconSentimentProvider(resources::SentimentLexicon lexicon);

  SentimentToneProfile analyze(std::string_view text) const override;
  std::string name() const override { return "lexicon-v1"; }

  /// Category names in profile order: "emotion.<name>" then "tone.<name>".
  static std::vector<std::string> categories();

 private:
  resources::SentimentLexicon lexicon_;
};

/// Validates range and returns `profile`; throws ProviderError otherwise.
SentimentToneProfile checked_profile(const SentimentToneProfile& profile);

SentimentToneProfile sentiment_tone(std::string_view text, const SentimentProvider& provider);

// ---------------------------------------------------------------- readability

/// Index catalog in feature order.
inline constexpr std::array<std::string_view, 14> kReadabilityNames = {
    "ari",          "flesch_reading_ease", "flesch_kincaid_grade", "gunning_fog",
    "coleman_liau", "smog",                "dale_chall",           "characters",
    "words",        "sentences",           "syllables",            "avg_syllables_per_word",
    "function_words", "personal_pronouns"};

struct ReadabilityProfile {
  double ari = 0;
  double flesch_reading_ease = 0;
  double flesch_kincaid_grade = 0;
  double gunning_fog = 0;
  double coleman_liau = 0;
  double smog = 0;
  double dale_chall = 0;
  std::size_t characters = 0;  // word characters only
  std::size_t words = 0;
  std::size_t sentences = 0;
  std::size_t syllables = 0;
  double avg_syllables_per_word = 0;
  std::size_t function_words = 0;
  std::size_t personal_pronouns = 0;
  std::size_t polysyllables = 0;    // >= 3 syllables
  std::size_t difficult_words = 0;  // not on the Dale-Chall list

  std::array<double, kReadabilityNames.size()> values() const;
};

/// Throws InvalidArgument when no sentence (no word token) is found.
ReadabilityProfile readability_profile(std::string_view text);

// ---------------------------------------------------------------- form

/// Named counters preceding the 235 shape slots.
inline constexpr std::array<std::string_view, 20> kFormCounterNames = {
    "all_lower",   "all_upper",    "capitalized",    "emoji",       "exclamation_word",
    "apostrophe_word", "all_digit", "mixed_alnum",   "quoted",      "parenthesized",
    "ellipsis",    "repeated_punctuation", "url_like", "hashtag",   "mention",
    "currency_marked", "percent_marked", "hyphenated", "elongated", "shape_other"};

inline constexpr std::size_t kFormDimensions = 255;
inline constexpr std::size_t kShapeSlots = kFormDimensions - kFormCounterNames.size();

/// Collapsed orthographic shape: upper->X, lower->x, digit->9, emoji->E,
/// other letters->L, ASCII punctuation kept, runs of one symbol collapsed.
std::string word_shape(std::string_view chunk);

/// Frozen shape catalog; index i is slot 20 + i of the descriptor vector.
class ShapeCatalog {
 public:
  ShapeCatalog();  // bundled catalog
  /// Throws InvalidArgument unless exactly 235 unique shapes are given.
  explicit ShapeCatalog(std::vector<std::string> shapes);

  const std::vector<std::string>& shapes() const noexcept { return shapes_; }
  std::optional<std::size_t> slot(std::string_view shape) const;

 private:
  std::vector<std::string> shapes_;
  std::unordered_map<std::string, std::size_t> index_;
};

using FormDescriptorVector = std::array<double, kFormDimensions>;

FormDescriptorVector form_descriptors(std::string_view text);
FormDescriptorVector form_descriptors(std::string_view text, const ShapeCatalog& catalog);
std::vector<std::string> form_feature_names(const ShapeCatalog& catalog);

// ---------------------------------------------------------------- NER

inline constexpr std::array<std::string_view, 18> kEntityTypes = {
    "PERSON", "NORP",     "FAC",  "ORG",  "GPE",     "LOC",   "PRODUCT",  "EVENT",   "WORK_OF_ART",
    "LAW",    "LANGUAGE", "DATE", "TIME", "PERCENT", "MONEY", "QUANTITY", "ORDINAL", "CARDINAL"};

/// Index into kEntityTypes, or -1.
int entity_type_index(std::string_view label);

struct EntitySpan {
  std::size_t begin = 0;  // byte offsets
  std::size_t end = 0;
  int type = 0;           // index into kEntityTypes

  bool operator==(const EntitySpan&) const = default;
};

class EntityTagger {
 public:
  virtual ~EntityTagger() = default;
  /// May return overlapping spans. Throws ProviderError on backend failure.
  virtual std::vector<EntitySpan> tag(std::string_view text) const = 0;
  virtual std::string name() const = 0;
};

/// Offline fallback: gazetteer-resolved capitalized sequences -> PERSON / ORG /
/// GPE / NORP / LOC, currency patterns -> MONEY, weekday/month words -> DATE,
/// digits and number words -> CARDINAL. Everything else is untagged.
class RuleEntityTagger final : public EntityTagger {
 public:
  RuleEntityTagger();
  explicit RuleEntityTagger(const resources::Gazetteer& gazetteer);

  std::vector<EntitySpan> tag(std::string_view text) const override;
  std::string name() const override { return "rules-v1"; }

 private:
  const resources::Gazetteer* gazetteer_;
};

/// Keeps the longest spans first (ties: earlier start), dropping overlaps.
std::vector<EntitySpan> resolve_overlaps(std::vector<EntitySpan> spans);

using NerCountVector = std::array<double, kEntityTypes.size()>;

NerCountVector ner_counts(std::string_view text, const EntityTagger& tagger);

// ---------------------------------------------------------------- TF-IDF

/// Lower-cased unigram counts of one document.
using TermCounts = std::map<std::string, std::size_t, std::less<>>;

TermCounts term_counts(std::string_view text);

struct TfidfVocabulary {
  std::vector<std::string> terms;             // sorted
  std::vector<std::size_t> document_frequency;  // parallel to `terms`
  std::size_t document_count = 0;

  std::size_t size() const noexcept { return terms.size(); }
  std::optional<std::size_t> index_of(std::string_view term) const;
  double idf(std::size_t i) const;
};

inline constexpr std::size_t kDefaultMinDf = 2;

/// Throws InvalidArgument on an empty document list.
TfidfVocabulary tfidf_fit(std::span<const TermCounts> documents, std::size_t min_df = kDefaultMinDf);
TfidfVocabulary tfidf_fit(std::span<const std::string> documents, std::size_t min_df = kDefaultMinDf);

struct SparseEntry {
  std::size_t index = 0;
  double weight = 0;
};

/// tf * (ln((1+N)/(1+df)) + 1), L2-normalized when nonzero; OOV ignored.
std::vector<SparseEntry> tfidf_transform(const TfidfVocabulary& vocab, const TermCounts& doc);
std::vector<SparseEntry> tfidf_transform(const TfidfVocabulary& vocab, std::string_view text);

// ---------------------------------------------------------------- assembly

struct TextProviders {
  const SentimentProvider* sentiment = nullptr;
  const EntityTagger* tagger = nullptr;
  const ShapeCatalog* catalog = nullptr;
};

/// Owns the offline fallbacks; `view()` hands out a TextProviders.
class DefaultTextProviders {
 public:
  TextProviders view() const { return {&sentiment_, &tagger_, &catalog_}; }

 private:
  LexiconSentimentProvider sentiment_;
  RuleEntityTagger tagger_;
  ShapeCatalog catalog_;
};

/// Names of the fixed (vocabulary-independent) text dimensions:
/// sentiment+tone (12) | readability (14) | form (255) | NER (18).
std::vector<std::string> dense_text_feature_names(const ShapeCatalog& catalog);
inline constexpr std::size_t kDenseTextDimensions = 12 + kReadabilityNames.size() + kFormDimensions +
                                                    kEntityTypes.size();

std::vector<double> dense_text_features(std::string_view text, const TextProviders& providers);

/// Full text vector: dense block followed by one "tfidf:<term>" per vocabulary term.
FeatureVector assemble_text_features(const Campaign& campaign, const TextProviders& providers,
                                     const TfidfVocabulary& vocab);

}  // namespace cfraud
