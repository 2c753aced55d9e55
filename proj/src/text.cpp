// SPDX-License-Identifier: Apache-2.0
#include "cfraud/text.hpp"

#include <algorithm>

namespace cfraud::text {

std::vector<CodePoint> decode_utf8(std::string_view s) {
  std::vector<CodePoint> out;
  out.reserve(s.size());
  std::size_t i = 0;
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  while (i < s.size()) {
    const unsigned char c = byte(i);
    std::size_t len = 0;
    char32_t cp = 0;
    if (c < 0x80) {
      len = 1;
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    }
    bool ok = len > 0 && i + len <= s.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      if ((byte(i + k) & 0xC0) != 0x80) ok = false;
      else cp = (cp << 6) | (byte(i + k) & 0x3F);
    }
    if (ok && ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
               cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))) {
      ok = false;  // overlong or out of range
    }
    if (!ok) {
      out.push_back({0xFFFD, i, 1});
      ++i;
      continue;
    }
    out.push_back({cp, i, len});
    i += len;
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool is_emoji(char32_t cp) {
  return (cp >= 0x1F000 && cp <= 0x1FAFF) || (cp >= 0x2600 && cp <= 0x27BF) ||
         (cp >= 0x2B00 && cp <= 0x2BFF) || (cp >= 0x2300 && cp <= 0x23FF);
}

bool is_ascii_upper(char32_t cp) { return cp >= 'A' && cp <= 'Z'; }
bool is_ascii_lower(char32_t cp) { return cp >= 'a' && cp <= 'z'; }
bool is_ascii_digit(char32_t cp) { return cp >= '0' && cp <= '9'; }
bool is_apostrophe(char32_t cp) { return cp == '\'' || cp == 0x2019; }

bool is_space(char32_t cp) {
  return cp == ' ' || (cp >= 0x09 && cp <= 0x0D) || cp == 0xA0 || (cp >= 0x2000 && cp <= 0x200A) ||
         cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F || cp == 0x3000;
}

bool is_word_char(char32_t cp) {
  if (cp < 0x80) return is_ascii_upper(cp) || is_ascii_lower(cp) || is_ascii_digit(cp);
  if (cp <= 0xBF || cp == 0xD7 || cp == 0xF7) return false;
  if (is_emoji(cp)) return false;
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;  // punctuation, symbols, arrows, shapes
  if (cp >= 0x3000 && cp <= 0x303F) return false;
  if (cp >= 0xD800 && cp <= 0xF8FF) return false;
  if (cp >= 0xFE00 && cp <= 0xFE0F) return false;
  if (cp >= 0xFF00 && cp <= 0xFF0F) return false;
  if (cp == 0xFFFD || cp == 0xFEFF) return false;
  return true;
}

namespace {

bool is_letter(char32_t cp) { return is_word_char(cp) && !is_ascii_digit(cp); }

char32_t fold(char32_t cp) {
  if (is_ascii_upper(cp)) return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  if (cp == 0x2019) return '\'';
  return cp;
}

}  // namespace

std::vector<Token> word_tokens(std::string_view s) {
  const auto cps = decode_utf8(s);
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (!is_word_char(cps[i].value)) {
      ++i;
      continue;
    }
    const std::size_t first = i;
    std::size_t last = i;  // inclusive
    ++i;
    while (i < cps.size()) {
      const char32_t cp = cps[i].value;
      if (is_word_char(cp)) {
        last = i++;
        continue;
      }
      const bool has_next = i + 1 < cps.size();
      const char32_t prev = cps[last].value;
      const char32_t next = has_next ? cps[i + 1].value : 0;
      if (has_next && last == i - 1 && is_apostrophe(cp) && is_letter(prev) && is_letter(next)) {
        i += 1;
        continue;
      }
      if (has_next && last == i - 1 && (cp == '.' || cp == ',') && is_ascii_digit(prev) &&
          is_ascii_digit(next)) {
        i += 1;
        continue;
      }
      break;
    }
    const std::size_t begin = cps[first].offset;
    const std::size_t end = cps[last].offset + cps[last].length;
    out.push_back({std::string(s.substr(begin, end - begin)), begin, end});
  }
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const auto& cp : decode_utf8(s)) append_utf8(out, fold(cp.value));
  return out;
}

std::vector<std::string> lowered_words(std::string_view s) {
  std::vector<std::string> out;
  for (auto& t : word_tokens(s)) out.push_back(to_lower(t.text));
  return out;
}

std::vector<std::string_view> chunks(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  bool in_chunk = false;
  for (const auto& cp : decode_utf8(s)) {
    if (is_space(cp.value)) {
      if (in_chunk) out.push_back(s.substr(start, cp.offset - start));
      in_chunk = false;
    } else if (!in_chunk) {
      start = cp.offset;
      in_chunk = true;
    }
  }
  if (in_chunk) out.push_back(s.substr(start));
  return out;
}

namespace {

bool is_terminator(char32_t cp) { return cp == '.' || cp == '!' || cp == '?' || cp == 0x2026; }
bool is_closer(char32_t cp) {
  return cp == '"' || cp == '\'' || cp == ')' || cp == ']' || cp == 0x201D || cp == 0x2019;
}

}  // namespace

std::vector<Span> sentences(std::string_view s) {
  const auto cps = decode_utf8(s);
  std::vector<Span> out;
  std::size_t seg_begin = 0;
  bool has_word = false;
  auto close = [&](std::size_t end) {
    if (has_word) out.push_back({seg_begin, end});
    seg_begin = end;
    has_word = false;
  };
  std::size_t i = 0;
  while (i < cps.size()) {
    const char32_t cp = cps[i].value;
    if (cp == '\n') {
      close(cps[i].offset);
      seg_begin = cps[i].offset + 1;
      ++i;
      continue;
    }
    if (is_word_char(cp)) has_word = true;
    if (is_terminator(cp)) {
      std::size_t j = i + 1;
      while (j < cps.size() && (is_terminator(cps[j].value) || is_closer(cps[j].value))) ++j;
      if (j == cps.size() || is_space(cps[j].value)) {
        const std::size_t end = j == cps.size() ? s.size() : cps[j].offset;
        close(end);
        i = j;
        continue;
      }
    }
    ++i;
  }
  close(s.size());
  return out;
}

bool has_sentence_terminator(std::string_view s) {
  for (const auto& cp : decode_utf8(s))
    if (is_terminator(cp.value)) return true;
  return false;
}

int syllables(std::string_view word) {
  std::string w;
  for (char c : word) {
    if (c >= 'A' && c <= 'Z') w += static_cast<char>(c + 32);
    else if (c >= 'a' && c <= 'z') w += c;
  }
  if (w.empty()) return 1;
  const auto vowel = [](char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
  };
  int count = 0;
  bool prev = false;
  for (char c : w) {
    const bool v = vowel(c);
    if (v && !prev) ++count;
    prev = v;
  }
  const std::size_t n = w.size();
  if (count > 1 && w[n - 1] == 'e' && n >= 2 && !vowel(w[n - 2])) {
    const bool consonant_le = n >= 3 && w[n - 2] == 'l' && !vowel(w[n - 3]);
    if (!consonant_le) --count;
  }
  return std::max(count, 1);
}

}  // namespace cfraud::text
