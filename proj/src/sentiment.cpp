// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "cfraud/error.hpp"
#include "cfraud/text.hpp"
#include "cfraud/textfeat.hpp"

namespace cfraud {

std::vector<std::string> LexiconSentimentProvider::categories() {
  std::vector<std::string> out;
  for (auto e : kEmotionNames) out.push_back("emotion." + std::string(e));
  for (auto t : kToneNames) out.push_back("tone." + std::string(t));
  return out;
}

LexiconSentimentProvider::LexiconSentimentProvider()
    : lexicon_(resources::SentimentLexicon::parse(resources::sentiment_lexicon_tsv(), categories())) {}

LexiconSentimentProvider::LexiconSentimentProvider(resources::SentimentLexicon lexicon)
    : lexicon_(std::move(lexicon)) {
  if (lexicon_.categories != categories())
    throw InvalidArgument("sentiment lexicon must use the 5 emotion + 7 tone categories");
}

SentimentToneProfile LexiconSentimentProvider::analyze(std::string_view text) const {
  SentimentToneProfile p;
  const auto words = text::lowered_words(text);
  if (words.empty()) return p;
  std::array<std::size_t, 12> hits{};
  for (const auto& w : words) {
    const auto it = lexicon_.entries.find(w);
    if (it == lexicon_.entries.end()) continue;
    for (int c : it->second) ++hits[static_cast<std::size_t>(c)];
  }
  const double total = static_cast<double>(words.size());
  for (std::size_t i = 0; i < 5; ++i) p.emotions[i] = std::min(1.0, static_cast<double>(hits[i]) / total);
  for (std::size_t i = 0; i < 7; ++i) p.tones[i] = std::min(1.0, static_cast<double>(hits[5 + i]) / total);
  return p;
}

SentimentToneProfile checked_profile(const SentimentToneProfile& profile) {
  const auto ok = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  if (!std::all_of(profile.emotions.begin(), profile.emotions.end(), ok) ||
      !std::all_of(profile.tones.begin(), profile.tones.end(), ok))
    throw ProviderError("sentiment provider returned a score outside [0,1]");
  return profile;
}

SentimentToneProfile sentiment_tone(std::string_view text, const SentimentProvider& provider) {
  return checked_profile(provider.analyze(text));
}

// ---------------------------------------------------------------- readability

std::array<double, kReadabilityNames.size()> ReadabilityProfile::values() const {
  return {ari,
          flesch_reading_ease,
          flesch_kincaid_grade,
          gunning_fog,
          coleman_liau,
          smog,
          dale_chall,
          static_cast<double>(characters),
          static_cast<double>(words),
          static_cast<double>(sentences),
          static_cast<double>(syllables),
          avg_syllables_per_word,
          static_cast<double>(function_words),
          static_cast<double>(personal_pronouns)};
}

ReadabilityProfile readability_profile(std::string_view text) {
  const auto tokens = text::word_tokens(text);
  const auto sents = text::sentences(text);
  if (tokens.empty() || sents.empty()) throw InvalidArgument("readability: no sentence detected");

  ReadabilityProfile r;
  r.words = tokens.size();
  r.sentences = sents.size();
  const auto& easy = resources::dale_chall_easy_words();
  const auto& fwords = resources::function_words();
  const auto& pronouns = resources::personal_pronouns();
  for (const auto& t : tokens) {
    for (const auto& cp : text::decode_utf8(t.text))
      if (text::is_word_char(cp.value)) ++r.characters;
    const int syl = text::syllables(t.text);
    r.syllables += static_cast<std::size_t>(syl);
    if (syl >= 3) ++r.polysyllables;
    const std::string lw = text::to_lower(t.text);
    if (fwords.count(lw)) ++r.function_words;
    if (pronouns.count(lw)) ++r.personal_pronouns;
    const bool numeric = std::all_of(lw.begin(), lw.end(), [](char c) { return (c >= '0' && c <= '9') || c == '.' || c == ','; });
    if (!numeric && !easy.count(lw)) ++r.difficult_words;
  }

  const double w = static_cast<double>(r.words);
  const double s = static_cast<double>(r.sentences);
  const double chars_per_word = static_cast<double>(r.characters) / w;
  const double words_per_sentence = w / s;
  const double syll_per_word = static_cast<double>(r.syllables) / w;
  const double complex_share = static_cast<double>(r.polysyllables) / w;
  const double difficult_pct = 100.0 * static_cast<double>(r.difficult_words) / w;

  r.avg_syllables_per_word = syll_per_word;
  r.ari = 4.71 * chars_per_word + 0.5 * words_per_sentence - 21.43;
  r.flesch_reading_ease = 206.835 - 1.015 * words_per_sentence - 84.6 * syll_per_word;
  r.flesch_kincaid_grade = 0.39 * words_per_sentence + 11.8 * syll_per_word - 15.59;
  r.gunning_fog = 0.4 * (words_per_sentence + 100.0 * complex_share);
  r.coleman_liau = 0.0588 * (100.0 * chars_per_word) - 0.296 * (100.0 * s / w) - 15.8;
  r.smog = 1.043 * std::sqrt(static_cast<double>(r.polysyllables) * 30.0 / s) + 3.1291;
  r.dale_chall = 0.1579 * difficult_pct + 0.0496 * words_per_sentence + (difficult_pct > 5.0 ? 3.6365 : 0.0);
  return r;
}

}  // namespace cfraud
