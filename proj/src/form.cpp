// SPDX-License-Identifier: Apache-2.0
#include <algorithm>

#include "cfraud/error.hpp"
#include "cfraud/text.hpp"
#include "cfraud/textfeat.hpp"

namespace cfraud {

namespace {

constexpr char32_t kZwj = 0x200D;

bool is_ignorable(char32_t cp) { return cp == kZwj || (cp >= 0xFE00 && cp <= 0xFE0F) || (cp >= 0x1F3FB && cp <= 0x1F3FF); }
bool is_ascii_punct(char32_t cp) { return cp > 0x20 && cp < 0x7F && !text::is_word_char(cp); }
bool is_upper(char32_t cp) { return text::is_ascii_upper(cp) || (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7); }
bool is_lower(char32_t cp) { return text::is_ascii_lower(cp) || (cp >= 0xDF && cp <= 0xFF && cp != 0xF7); }
bool is_letter(char32_t cp) { return text::is_word_char(cp) && !text::is_ascii_digit(cp); }
bool is_quote(char32_t cp) { return cp == '"' || cp == 0x201C || cp == 0x201D || cp == 0xAB || cp == 0xBB; }
bool is_currency(char32_t cp) { return cp == '$' || cp == 0x20AC || cp == 0xA3 || cp == 0xA5; }
bool is_closer(char32_t cp) { return is_quote(cp) || cp == ')' || cp == ']' || cp == '\'' || cp == 0x2019; }

char32_t shape_symbol(char32_t cp) {
  if (text::is_ascii_digit(cp)) return '9';
  if (text::is_emoji(cp)) return 'E';
  if (is_upper(cp)) return 'X';
  if (is_lower(cp)) return 'x';
  if (text::is_word_char(cp)) return 'L';
  if (is_ascii_punct(cp)) return cp;
  return 0;
}

enum Counter : std::size_t {
  kAllLower,
  kAllUpper,
  kCapitalized,
  kEmoji,
  kExclamation,
  kApostrophe,
  kAllDigit,
  kMixedAlnum,
  kQuoted,
  kParenthesized,
  kEllipsis,
  kRepeatedPunct,
  kUrlLike,
  kHashtag,
  kMention,
  kCurrency,
  kPercent,
  kHyphenated,
  kElongated,
  kShapeOther,
};

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    char c = s[i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    if (c != prefix[i]) return false;
  }
  return true;
}

void count_chunk(std::string_view chunk, const ShapeCatalog& catalog, FormDescriptorVector& out) {
  const auto cps = text::decode_utf8(chunk);
  std::size_t letters = 0, uppers = 0, lowers = 0, digits = 0;
  bool first_letter_upper = false;
  bool seen_letter = false;
  bool apostrophe_word = false, hyphenated = false, elongated = false, repeated = false;
  bool quoted = false, paren = false, ellipsis = false, currency = false, percent = false;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = cps[i].value;
    if (is_letter(cp)) {
      ++letters;
      if (is_upper(cp)) ++uppers;
      if (is_lower(cp)) ++lowers;
      if (!seen_letter) first_letter_upper = is_upper(cp);
      seen_letter = true;
    } else if (text::is_ascii_digit(cp)) {
      ++digits;
    }
    const bool inner = i > 0 && i + 1 < cps.size();
    if (inner && text::is_apostrophe(cp) && is_letter(cps[i - 1].value) && is_letter(cps[i + 1].value))
      apostrophe_word = true;
    if (inner && cp == '-' && text::is_word_char(cps[i - 1].value) && text::is_word_char(cps[i + 1].value))
      hyphenated = true;
    if (i >= 2 && is_letter(cp) && cps[i - 1].value == cp && cps[i - 2].value == cp) elongated = true;
    if (i >= 1 && is_ascii_punct(cp) && cps[i - 1].value == cp && cp != '.') repeated = true;
    if (i >= 2 && cp == '.' && cps[i - 1].value == '.' && cps[i - 2].value == '.') ellipsis = true;
    if (cp == 0x2026) ellipsis = true;
    if (is_quote(cp)) quoted = true;
    if (cp == '(' || cp == ')') paren = true;
    if (is_currency(cp)) currency = true;
    if (cp == '%') percent = true;
  }

  if (letters > 0 && uppers == 0) out[kAllLower] += 1;
  if (letters >= 2 && uppers == letters) out[kAllUpper] += 1;
  if (letters >= 2 && first_letter_upper && uppers == 1) out[kCapitalized] += 1;
  if (digits > 0 && letters == 0) out[kAllDigit] += 1;
  if (digits > 0 && letters > 0) out[kMixedAlnum] += 1;
  if (apostrophe_word) out[kApostrophe] += 1;
  if (hyphenated) out[kHyphenated] += 1;
  if (elongated) out[kElongated] += 1;
  if (repeated) out[kRepeatedPunct] += 1;
  if (ellipsis) out[kEllipsis] += 1;
  if (quoted) out[kQuoted] += 1;
  if (paren) out[kParenthesized] += 1;
  if (currency) out[kCurrency] += 1;
  if (percent) out[kPercent] += 1;

  std::size_t end = cps.size();
  while (end > 0 && is_closer(cps[end - 1].value)) --end;
  if (end > 0 && cps[end - 1].value == '!' && letters + digits > 0) out[kExclamation] += 1;

  if (starts_with_ci(chunk, "http://") || starts_with_ci(chunk, "https://") || starts_with_ci(chunk, "www."))
    out[kUrlLike] += 1;
  if (cps.size() >= 2 && text::is_word_char(cps[1].value)) {
    if (cps[0].value == '#') out[kHashtag] += 1;
    if (cps[0].value == '@') out[kMention] += 1;
  }

  const std::string shape = word_shape(chunk);
  if (shape.empty()) return;
  if (const auto slot = catalog.slot(shape)) out[kFormCounterNames.size() + *slot] += 1;
  else out[kShapeOther] += 1;
}

}  // namespace

std::string word_shape(std::string_view chunk) {
  std::string out;
  char32_t last = 0;
  for (const auto& cp : text::decode_utf8(chunk)) {
    const char32_t s = shape_symbol(cp.value);
    if (s == 0 || s == last) continue;
    text::append_utf8(out, s);
    last = s;
  }
  return out;
}

ShapeCatalog::ShapeCatalog() : ShapeCatalog(resources::default_word_shapes()) {}

ShapeCatalog::ShapeCatalog(std::vector<std::string> shapes) : shapes_(std::move(shapes)) {
  if (shapes_.size() != kShapeSlots)
    throw InvalidArgument("shape catalog must hold " + std::to_string(kShapeSlots) + " shapes, got " +
                          std::to_string(shapes_.size()));
  for (std::size_t i = 0; i < shapes_.size(); ++i)
    if (!index_.emplace(shapes_[i], i).second) throw InvalidArgument("duplicate shape: " + shapes_[i]);
}

std::optional<std::size_t> ShapeCatalog::slot(std::string_view shape) const {
  const auto it = index_.find(std::string(shape));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

FormDescriptorVector form_descriptors(std::string_view text) {
  static const ShapeCatalog catalog;
  return form_descriptors(text, catalog);
}

FormDescriptorVector form_descriptors(std::string_view text, const ShapeCatalog& catalog) {
  FormDescriptorVector out{};
  const auto cps = text::decode_utf8(text);
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (!text::is_emoji(cps[i].value)) continue;
    // joined sequences count once
    std::size_t j = i;
    while (j > 0 && is_ignorable(cps[j - 1].value) && cps[j - 1].value != kZwj) --j;
    if (j > 0 && cps[j - 1].value == kZwj) continue;
    if (cps[i].value >= 0x1F3FB && cps[i].value <= 0x1F3FF && i > 0 && text::is_emoji(cps[i - 1].value)) continue;
    out[kEmoji] += 1;
  }
  for (const auto chunk : text::chunks(text)) count_chunk(chunk, catalog, out);
  return out;
}

std::vector<std::string> form_feature_names(const ShapeCatalog& catalog) {
  std::vector<std::string> names;
  names.reserve(kFormDimensions);
  for (auto n : kFormCounterNames) names.push_back(std::string(prefix::kForm) + std::string(n));
  for (const auto& s : catalog.shapes()) names.push_back(std::string(prefix::kForm) + "shape=" + s);
  return names;
}

}  // namespace cfraud
