// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace cfraud::resources {

// Raw bundled data files (see data/). Lines starting with "# " are comments.
std::string_view sentiment_lexicon_tsv();
std::string_view gazetteer_tsv();
std::string_view word_shapes_txt();
std::string_view function_words_txt();
std::string_view personal_pronouns_txt();
std::string_view dale_chall_easy_words_txt();

/// Non-comment, non-empty lines with trailing CR/whitespace trimmed.
std::vector<std::string> data_lines(std::string_view file);

/// word -> category indices into `categories`.
struct SentimentLexicon {
  std::vector<std::string> categories;
  std::unordered_map<std::string, std::vector<int>> entries;

  static SentimentLexicon parse(std::string_view tsv, const std::vector<std::string>& categories);
};

/// Gazetteer phrases per kind (PERSON_FIRST, ORG_SUFFIX, ORG, GPE, NORP, LOC,
/// DATE_WORD, NUMBER_WORD, CURRENCY_WORD). Multi-word phrases keep spaces.
struct Gazetteer {
  std::map<std::string, std::set<std::string>> kinds;
  std::size_t max_phrase_words = 1;

  bool contains(std::string_view kind, std::string_view phrase) const;
  /// Case-insensitive lookup, `phrase` already lower-cased.
  bool contains_folded(std::string_view kind, std::string_view lowered) const;

  static Gazetteer parse(std::string_view tsv);

 private:
  std::map<std::string, std::set<std::string>> folded_;
};

/// Shared immutable instances built from the bundled files.
const Gazetteer& default_gazetteer();
const std::vector<std::string>& default_word_shapes();
const std::unordered_set<std::string>& function_words();
const std::unordered_set<std::string>& personal_pronouns();
const std::unordered_set<std::string>& dale_chall_easy_words();

}  // namespace cfraud::resources
