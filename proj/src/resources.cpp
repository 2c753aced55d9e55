// SPDX-License-Identifier: Apache-2.0
#include "cfraud/resources.hpp"

#include <algorithm>

#include "cfraud/error.hpp"
#include "cfraud/text.hpp"

namespace cfraud::resources {

namespace embedded {
std::string_view sentiment_lexicon_tsv();
std::string_view gazetteer_tsv();
std::string_view word_shapes_txt();
std::string_view function_words_txt();
std::string_view personal_pronouns_txt();
std::string_view dale_chall_easy_words_txt();
}  // namespace embedded

std::string_view sentiment_lexicon_tsv() { return embedded::sentiment_lexicon_tsv(); }
std::string_view gazetteer_tsv() { return embedded::gazetteer_tsv(); }
std::string_view word_shapes_txt() { return embedded::word_shapes_txt(); }
std::string_view function_words_txt() { return embedded::function_words_txt(); }
std::string_view personal_pronouns_txt() { return embedded::personal_pronouns_txt(); }
std::string_view dale_chall_easy_words_txt() { return embedded::dale_chall_easy_words_txt(); }

std::vector<std::string> data_lines(std::string_view file) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= file.size()) {
    std::size_t nl = file.find('\n', pos);
    if (nl == std::string_view::npos) nl = file.size();
    std::string_view line = file.substr(pos, nl - pos);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.remove_suffix(1);
    if (!line.empty() && !line.starts_with("# ") && line != "#") out.emplace_back(line);
    pos = nl + 1;
  }
  return out;
}

SentimentLexicon SentimentLexicon::parse(std::string_view tsv, const std::vector<std::string>& categories) {
  SentimentLexicon lex;
  lex.categories = categories;
  for (const auto& line : data_lines(tsv)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("lexicon line without tab: " + line);
    const std::string word = text::to_lower(line.substr(0, tab));
    std::string_view rest(line);
    rest.remove_prefix(tab + 1);
    auto& cats = lex.entries[word];
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto cat = rest.substr(0, comma);
      const auto it = std::find(categories.begin(), categories.end(), cat);
      if (it == categories.end()) throw ParseError("unknown lexicon category: " + std::string(cat));
      const int idx = static_cast<int>(it - categories.begin());
      if (std::find(cats.begin(), cats.end(), idx) == cats.end()) cats.push_back(idx);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }
  return lex;
}

Gazetteer Gazetteer::parse(std::string_view tsv) {
  Gazetteer g;
  for (const auto& line : data_lines(tsv)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("gazetteer line without tab: " + line);
    const std::string kind = line.substr(0, tab);
    const std::string phrase = line.substr(tab + 1);
    g.kinds[kind].insert(phrase);
    g.folded_[kind].insert(text::to_lower(phrase));
    const auto words = static_cast<std::size_t>(std::count(phrase.begin(), phrase.end(), ' ')) + 1;
    g.max_phrase_words = std::max(g.max_phrase_words, words);
  }
  return g;
}

bool Gazetteer::contains(std::string_view kind, std::string_view phrase) const {
  const auto it = kinds.find(std::string(kind));
  return it != kinds.end() && it->second.count(std::string(phrase)) > 0;
}

bool Gazetteer::contains_folded(std::string_view kind, std::string_view lowered) const {
  const auto it = folded_.find(std::string(kind));
  return it != folded_.end() && it->second.count(std::string(lowered)) > 0;
}

const Gazetteer& default_gazetteer() {
  static const Gazetteer g = Gazetteer::parse(gazetteer_tsv());
  return g;
}

const std::vector<std::string>& default_word_shapes() {
  static const std::vector<std::string> shapes = data_lines(word_shapes_txt());
  return shapes;
}

namespace {

std::unordered_set<std::string> word_set(std::string_view file) {
  std::unordered_set<std::string> out;
  for (auto& line : data_lines(file)) out.insert(text::to_lower(line));
  return out;
}

}  // namespace

const std::unordered_set<std::string>& function_words() {
  static const auto s = word_set(function_words_txt());
  return s;
}

const std::unordered_set<std::string>& personal_pronouns() {
  static const auto s = word_set(personal_pronouns_txt());
  return s;
}

const std::unordered_set<std::string>& dale_chall_easy_words() {
  static const auto s = word_set(dale_chall_easy_words_txt());
  return s;
}

}  // namespace cfraud::resources
