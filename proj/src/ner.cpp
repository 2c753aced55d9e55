// SPDX-License-Identifier: Apache-2.0
#include <algorithm>

#include "cfraud/error.hpp"
#include "cfraud/text.hpp"
#include "cfraud/textfeat.hpp"

namespace cfraud {

namespace {

int type_of(std::string_view label) {
  const int t = entity_type_index(label);
  if (t < 0) throw InvalidArgument("unknown entity type " + std::string(label));
  return t;
}

bool is_numeric(std::string_view tok) {
  return !tok.empty() && std::all_of(tok.begin(), tok.end(), [](char c) { return (c >= '0' && c <= '9') || c == '.' || c == ','; });
}

bool is_capitalized(std::string_view tok) {
  const auto cps = text::decode_utf8(tok);
  return !cps.empty() && (text::is_ascii_upper(cps[0].value) || (cps[0].value >= 0xC0 && cps[0].value <= 0xDE && cps[0].value != 0xD7));
}

/// True when only spaces or tabs lie between the two byte offsets.
bool inline_gap(std::string_view s, std::size_t from, std::size_t to) {
  if (from == to) return false;
  for (std::size_t i = from; i < to; ++i)
    if (s[i] != ' ' && s[i] != '\t') return false;
  return true;
}

std::size_t currency_symbol_before(std::string_view s, std::size_t pos) {
  if (pos >= 1 && s[pos - 1] == '$') return 1;
  if (pos >= 2 && s.substr(pos - 2, 2) == "\xC2\xA3") return 2;      // pound sign
  if (pos >= 3 && s.substr(pos - 3, 3) == "\xE2\x82\xAC") return 3;  // euro sign
  return 0;
}

}  // namespace

int entity_type_index(std::string_view label) {
  for (std::size_t i = 0; i < kEntityTypes.size(); ++i)
    if (kEntityTypes[i] == label) return static_cast<int>(i);
  return -1;
}

RuleEntityTagger::RuleEntityTagger() : gazetteer_(&resources::default_gazetteer()) {}
RuleEntityTagger::RuleEntityTagger(const resources::Gazetteer& gazetteer) : gazetteer_(&gazetteer) {}

std::vector<EntitySpan> RuleEntityTagger::tag(std::string_view text) const {
  static const int kPerson = type_of("PERSON"), kOrg = type_of("ORG"), kGpe = type_of("GPE"),
                   kNorp = type_of("NORP"), kLoc = type_of("LOC"), kDate = type_of("DATE"),
                   kMoney = type_of("MONEY"), kCardinal = type_of("CARDINAL");
  const auto& g = *gazetteer_;
  const auto tokens = text::word_tokens(text);
  std::vector<EntitySpan> spans;

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    const std::string lower = text::to_lower(t.text);
    const bool number = is_numeric(t.text) || g.contains_folded("NUMBER_WORD", lower);
    if (g.contains("DATE_WORD", t.text)) spans.push_back({t.begin, t.end, kDate});
    if (!number) continue;
    spans.push_back({t.begin, t.end, kCardinal});
    if (is_numeric(t.text)) {
      if (const auto sym = currency_symbol_before(text, t.begin)) spans.push_back({t.begin - sym, t.end, kMoney});
    }
    if (i + 1 < tokens.size() && inline_gap(text, t.end, tokens[i + 1].begin) &&
        g.contains_folded("CURRENCY_WORD", text::to_lower(tokens[i + 1].text)))
      spans.push_back({t.begin, tokens[i + 1].end, kMoney});
  }

  // Capitalized runs on one line, resolved against the gazetteer.
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (!is_capitalized(tokens[i].text) || g.contains("DATE_WORD", tokens[i].text)) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < tokens.size() && is_capitalized(tokens[j].text) && !g.contains("DATE_WORD", tokens[j].text) &&
           inline_gap(text, tokens[j - 1].end, tokens[j].begin))
      ++j;
    // run is tokens[i, j)
    std::size_t p = i;
    while (p < j) {
      std::size_t suffix = j;
      for (std::size_t k = p + 1; k < j; ++k)
        if (g.contains("ORG_SUFFIX", tokens[k].text)) {
          suffix = k;
          break;
        }
      bool matched = false;
      const std::size_t max_n = std::min(g.max_phrase_words, j - p);
      for (std::size_t n = max_n; n >= 1 && !matched; --n) {
        std::string phrase = tokens[p].text;
        for (std::size_t k = p + 1; k < p + n; ++k) phrase += " " + tokens[k].text;
        const std::pair<std::string_view, int> kinds[] = {{"ORG", kOrg}, {"GPE", kGpe}, {"NORP", kNorp}, {"LOC", kLoc}};
        for (const auto& [kind, type] : kinds) {
          if (g.contains(kind, phrase)) {
            spans.push_back({tokens[p].begin, tokens[p + n - 1].end, type});
            p += n;
            matched = true;
            break;
          }
        }
      }
      if (matched) continue;
      if (suffix < j) {
        spans.push_back({tokens[p].begin, tokens[suffix].end, kOrg});
        p = suffix + 1;
        continue;
      }
      if (g.contains("PERSON_FIRST", tokens[p].text)) {
        const bool surname = p + 1 < j;
        spans.push_back({tokens[p].begin, tokens[surname ? p + 1 : p].end, kPerson});
        p += surname ? 2 : 1;
        continue;
      }
      ++p;
    }
    i = j;
  }
  return spans;
}

std::vector<EntitySpan> resolve_overlaps(std::vector<EntitySpan> spans) {
  std::stable_sort(spans.begin(), spans.end(), [](const EntitySpan& a, const EntitySpan& b) {
    const auto la = a.end - a.begin, lb = b.end - b.begin;
    if (la != lb) return la > lb;
    return a.begin < b.begin;
  });
  std::vector<EntitySpan> kept;
  for (const auto& s : spans) {
    const bool clash = std::any_of(kept.begin(), kept.end(),
                                   [&](const EntitySpan& k) { return s.begin < k.end && k.begin < s.end; });
    if (!clash) kept.push_back(s);
  }
  std::sort(kept.begin(), kept.end(), [](const EntitySpan& a, const EntitySpan& b) { return a.begin < b.begin; });
  return kept;
}

NerCountVector ner_counts(std::string_view text, const EntityTagger& tagger) {
  auto spans = tagger.tag(text);
  for (const auto& s : spans) {
    if (s.begin >= s.end || s.end > text.size())
      throw ProviderError("entity span [" + std::to_string(s.begin) + "," + std::to_string(s.end) + ") out of range");
    if (s.type < 0 || static_cast<std::size_t>(s.type) >= kEntityTypes.size())
      throw ProviderError("entity type index " + std::to_string(s.type) + " out of range");
  }
  NerCountVector out{};
  for (const auto& s : resolve_overlaps(std::move(spans))) out[static_cast<std::size_t>(s.type)] += 1;
  return out;
}

}  // namespace cfraud
