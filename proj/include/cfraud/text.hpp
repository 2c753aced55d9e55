// SPDX-License-Identifier: Apache-2.0
#pragma once

// Shared tokenization. Every text family (readability, form, NER, TF-IDF,
// sentiment) consumes these functions so their counts never drift apart.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace cfraud::text {

struct CodePoint {
  char32_t value = 0;
  std::size_t offset = 0;  // byte offset in the source
  std::size_t length = 0;  // encoded length in bytes
};

/// Decodes UTF-8; invalid sequences become U+FFFD covering one byte.
std::vector<CodePoint> decode_utf8(std::string_view s);
void append_utf8(std::string& out, char32_t cp);

bool is_emoji(char32_t cp);
/// Letter or digit, ASCII or a non-ASCII letter outside symbol/punctuation blocks.
bool is_word_char(char32_t cp);
bool is_ascii_upper(char32_t cp);
bool is_ascii_lower(char32_t cp);
bool is_ascii_digit(char32_t cp);
bool is_apostrophe(char32_t cp);
bool is_space(char32_t cp);

/// Word token: a run of word characters, allowing one apostrophe between two
/// letters ("don't") and '.'/',' between two digits ("1,500.25").
struct Token {
  std::string text;
  std::size_t begin = 0;  // byte offsets into the source
  std::size_t end = 0;
};

std::vector<Token> word_tokens(std::string_view s);

/// Lower-cased word tokens (ASCII and Latin-1 upper case folded).
std::vector<std::string> lowered_words(std::string_view s);
std::string to_lower(std::string_view s);

/// Whitespace-separated chunks with attached punctuation ("now!!", "(see").
std::vector<std::string_view> chunks(std::string_view s);

/// Byte ranges of sentences. A sentence ends at '.', '!' or '?' followed by
/// whitespace, a closing quote/bracket or end of text, and at every newline.
/// Segments without any word token are discarded.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
};
std::vector<Span> sentences(std::string_view s);

bool has_sentence_terminator(std::string_view s);

/// Vowel-group syllable estimate with silent-e correction; at least 1.
/// Non-alphabetic tokens count as one syllable.
int syllables(std::string_view word);

}  // namespace cfraud::text
