// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <sstream>

#include "cfraud/error.hpp"
#include "cfraud/resources.hpp"
#include "cfraud/seed.hpp"
#include "cfraud/text.hpp"
#include "cfraud/textfeat.hpp"

using namespace cfraud;
using Catch::Approx;

namespace {

std::size_t counter(std::string_view name) {
  for (std::size_t i = 0; i < kFormCounterNames.size(); ++i)
    if (kFormCounterNames[i] == name) return i;
  FAIL("no counter " << name);
  return 0;
}

std::size_t entity(std::string_view name) { return static_cast<std::size_t>(entity_type_index(name)); }

/// Reads the bundled lexicon independently of the library parser.
std::map<std::string, std::vector<std::string>> lexicon_oracle() {
  std::map<std::string, std::vector<std::string>> out;
  std::istringstream in{std::string(resources::sentiment_lexicon_tsv())};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    std::string cats = line.substr(tab + 1);
    while (!cats.empty() && (cats.back() == '\r' || cats.back() == ' ')) cats.pop_back();
    std::istringstream cs(cats);
    std::string c;
    while (std::getline(cs, c, ',')) out[line.substr(0, tab)].push_back(c);
  }
  return out;
}

class StubSentiment final : public SentimentProvider {
 public:
  explicit StubSentiment(SentimentToneProfile p) : p_(p) {}
  SentimentToneProfile analyze(std::string_view) const override { return p_; }
  std::string name() const override { return "stub"; }

 private:
  SentimentToneProfile p_;
};

class StubTagger final : public EntityTagger {
 public:
  explicit StubTagger(std::vector<EntitySpan> spans) : spans_(std::move(spans)) {}
  std::vector<EntitySpan> tag(std::string_view) const override { return spans_; }
  std::string name() const override { return "stub"; }

 private:
  std::vector<EntitySpan> spans_;
};

}  // namespace

// ---------------------------------------------------------------- sentiment

TEST_CASE("lexicon sentiment on joy-only text makes joy the strict argmax") {
  LexiconSentimentProvider p;
  const auto prof = sentiment_tone("happy joy delighted cheerful glad", p);
  const auto joy = prof.emotions[1];
  CHECK(joy == 1.0);
  for (std::size_t i = 0; i < 5; ++i)
    if (i != 1) CHECK(prof.emotions[i] < joy);
}

TEST_CASE("lexicon sentiment with no hits is all zero") {
  LexiconSentimentProvider p;
  const auto prof = sentiment_tone("zorbo quindle fep tarvo plem.", p);
  for (double v : prof.emotions) CHECK(v == 0);
  for (double v : prof.tones) CHECK(v == 0);
}

TEST_CASE("lexicon sentiment matches a direct count normalization") {
  const auto lex = lexicon_oracle();
  std::vector<std::string> lex_words;
  for (const auto& [w, c] : lex) lex_words.push_back(w);
  const auto cats = LexiconSentimentProvider::categories();
  REQUIRE(cats.size() == 12);
  LexiconSentimentProvider p;
  Rng rng = make_rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    std::map<std::string, double> hits;
    const auto n = 1 + uniform_index(rng, 30);
    for (std::size_t i = 0; i < n; ++i) {
      std::string w = uniform_index(rng, 2) ? lex_words[uniform_index(rng, lex_words.size())] : "filler";
      for (const auto& c : lex.count(w) ? lex.at(w) : std::vector<std::string>{}) hits[c] += 1;
      text += w + " ";
    }
    const auto prof = p.analyze(text);
    for (std::size_t i = 0; i < 12; ++i) {
      const double got = i < 5 ? prof.emotions[i] : prof.tones[i - 5];
      REQUIRE(got == Approx(std::min(1.0, hits[cats[i]] / static_cast<double>(n))).margin(1e-15));
    }
  }
}

TEST_CASE("provider output passes through and is range checked") {
  SentimentToneProfile fixed;
  fixed.emotions = {0.1, 0.2, 0.3, 0.4, 0.5};
  fixed.tones = {0, 0.25, 0.5, 0.75, 1, 0.125, 0.875};
  CHECK(sentiment_tone("anything", StubSentiment(fixed)) == fixed);
  auto bad = fixed;
  bad.tones[2] = 1.5;
  CHECK_THROWS_AS(sentiment_tone("x", StubSentiment(bad)), ProviderError);
  bad.tones[2] = std::nan("");
  CHECK_THROWS_AS(sentiment_tone("x", StubSentiment(bad)), ProviderError);
}

// ---------------------------------------------------------------- readability

TEST_CASE("readability of a hand-counted sentence") {
  const auto r = readability_profile("The cat sat on the mat.");
  CHECK(r.words == 6);
  CHECK(r.sentences == 1);
  CHECK(r.characters == 17);
  CHECK(r.syllables == 6);
  CHECK(r.polysyllables == 0);
  CHECK(r.difficult_words == 0);
  CHECK(r.function_words == 3);
  CHECK(r.ari == Approx(4.71 * (17.0 / 6) + 0.5 * 6 - 21.43).epsilon(1e-12));
  CHECK(r.flesch_reading_ease == Approx(206.835 - 1.015 * 6 - 84.6 * 1).epsilon(1e-12));
  CHECK(r.flesch_kincaid_grade == Approx(0.39 * 6 + 11.8 - 15.59).epsilon(1e-12));
  CHECK(r.gunning_fog == Approx(0.4 * 6).epsilon(1e-12));
  CHECK(r.coleman_liau == Approx(0.0588 * (1700.0 / 6) - 0.296 * (100.0 / 6) - 15.8).epsilon(1e-12));
  CHECK(r.smog == Approx(3.1291).epsilon(1e-12));
  CHECK(r.dale_chall == Approx(0.0496 * 6).epsilon(1e-12));
  const auto v = r.values();
  CHECK(v.size() == 14);
  CHECK(v[0] == r.ari);
  CHECK(v[8] == 6);
}

TEST_CASE("Dale-Chall adds the adjustment above five percent difficult words") {
  const auto r = readability_profile("The zygomorphic cat sat.");
  CHECK(r.difficult_words == 1);
  CHECK(r.dale_chall == Approx(0.1579 * 25.0 + 0.0496 * 4 + 3.6365).epsilon(1e-12));
}

TEST_CASE("readability on constant and doubled text") {
  std::string rep;
  for (int i = 0; i < 20; ++i) rep += "hospital ";
  rep += ".";
  CHECK(readability_profile(rep).avg_syllables_per_word == Approx(text::syllables("hospital")));

  const std::string base = "My brother needs urgent surgery. We are raising money for his recovery and care.";
  const auto a = readability_profile(base);
  const auto b = readability_profile(base + "\n" + base);
  CHECK(b.ari == Approx(a.ari).epsilon(1e-12));
  CHECK(b.coleman_liau == Approx(a.coleman_liau).epsilon(1e-12));
  CHECK(b.words == 2 * a.words);
  CHECK_THROWS_AS(readability_profile("   "), InvalidArgument);
}

// ---------------------------------------------------------------- form

TEST_CASE("word shapes") {
  CHECK(word_shape("Hello") == "Xx");
  CHECK(word_shape("HELLO") == "X");
  CHECK(word_shape("don't") == "x'x");
  CHECK(word_shape("2020") == "9");
  CHECK(word_shape("$5.00") == "$9.9");
  CHECK(word_shape("now!!") == "x!");
  CHECK(word_shape("\xF0\x9F\x98\x80") == "E");
  CHECK(word_shape("caf\xC3\xA9") == "x");
  CHECK(word_shape("\xC3\xA9t\xC3\xA9") == "x");
  CHECK(word_shape("\xE2\x80\x94") == "");
}

TEST_CASE("form counters on the documented examples") {
  const auto a = form_descriptors("HELLO world!");
  CHECK(a[counter("all_upper")] == 1);
  CHECK(a[counter("exclamation_word")] == 1);
  CHECK(a[counter("all_lower")] == 1);

  const auto b = form_descriptors("don't STOP \xF0\x9F\x98\x80 now!!");
  CHECK(b[counter("apostrophe_word")] == 1);
  CHECK(b[counter("emoji")] == 1);
  CHECK(b[counter("repeated_punctuation")] == 1);

  const auto z = form_descriptors("");
  for (double v : z) CHECK(v == 0);

  const auto c = form_descriptors("Visit https://x.org or www.y.com #help @ann $50 20% (soon) \"yes\" well-known sooo ... A1");
  CHECK(c[counter("url_like")] == 2);
  CHECK(c[counter("hashtag")] == 1);
  CHECK(c[counter("mention")] == 1);
  CHECK(c[counter("currency_marked")] == 1);
  CHECK(c[counter("percent_marked")] == 1);
  CHECK(c[counter("parenthesized")] == 1);
  CHECK(c[counter("quoted")] == 1);
  CHECK(c[counter("hyphenated")] == 1);
  CHECK(c[counter("elongated")] == 2);  // "sooo" and "www."
  CHECK(c[counter("ellipsis")] == 1);
  CHECK(c[counter("mixed_alnum")] == 1);
  CHECK(c[counter("capitalized")] == 1);
}

TEST_CASE("joined emoji sequences count once") {
  // man + ZWJ + laptop, then a thumbs-up with a skin tone
  const auto v = form_descriptors("\xF0\x9F\x91\xA8\xE2\x80\x8D\xF0\x9F\x92\xBB \xF0\x9F\x91\x8D\xF0\x9F\x8F\xBD");
  CHECK(v[counter("emoji")] == 2);
}

TEST_CASE("known shapes land in their catalog slot, others in the catch-all") {
  const ShapeCatalog cat;
  REQUIRE(cat.shapes().size() == kShapeSlots);
  const auto slot = cat.slot("Xx");
  REQUIRE(slot);
  const auto v = form_descriptors("Hello there", cat);
  CHECK(v[kFormCounterNames.size() + *slot] == 1);
  const auto odd = form_descriptors("x9x9x9x9x9x9x9x9!?!", cat);
  CHECK(odd[counter("shape_other")] == 1);
  CHECK_THROWS_AS(ShapeCatalog({"x", "X"}), InvalidArgument);
  const auto names = form_feature_names(cat);
  CHECK(names.size() == kFormDimensions);
  CHECK(names[0] == "form:all_lower");
  CHECK(names[20] == "form:shape=" + cat.shapes()[0]);
}

TEST_CASE("form counts agree with a manual scan on random ASCII chunks") {
  // Oracle for the letter/digit counters, written against the rules directly.
  Rng rng = make_rng(19);
  const std::string alphabet = "aAbBzZ09!?'-#@.";
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    double lower = 0, upper = 0, cap = 0, digit = 0, mixed = 0, hash = 0, mention = 0;
    const auto n_chunks = 1 + uniform_index(rng, 6);
    for (std::size_t k = 0; k < n_chunks; ++k) {
      std::string chunk;
      const auto len = 1 + uniform_index(rng, 7);
      for (std::size_t i = 0; i < len; ++i) chunk += alphabet[uniform_index(rng, alphabet.size())];
      std::size_t letters = 0, ups = 0, digits = 0;
      for (char ch : chunk) {
        if (std::isalpha(static_cast<unsigned char>(ch))) {
          ++letters;
          if (std::isupper(static_cast<unsigned char>(ch))) ++ups;
        }
        if (std::isdigit(static_cast<unsigned char>(ch))) ++digits;
      }
      const char first_letter = [&] {
        for (char ch : chunk)
          if (std::isalpha(static_cast<unsigned char>(ch))) return ch;
        return '\0';
      }();
      lower += letters > 0 && ups == 0;
      upper += letters >= 2 && ups == letters;
      cap += letters >= 2 && std::isupper(static_cast<unsigned char>(first_letter)) && ups == 1;
      digit += digits > 0 && letters == 0;
      mixed += digits > 0 && letters > 0;
      const bool wc = chunk.size() >= 2 && std::isalnum(static_cast<unsigned char>(chunk[1]));
      hash += chunk[0] == '#' && wc;
      mention += chunk[0] == '@' && wc;
      text += chunk + (uniform_index(rng, 2) ? " " : "\n");
    }
    const auto v = form_descriptors(text);
    INFO(text);
    REQUIRE(v[counter("all_lower")] == lower);
    REQUIRE(v[counter("all_upper")] == upper);
    REQUIRE(v[counter("capitalized")] == cap);
    REQUIRE(v[counter("all_digit")] == digit);
    REQUIRE(v[counter("mixed_alnum")] == mixed);
    REQUIRE(v[counter("hashtag")] == hash);
    REQUIRE(v[counter("mention")] == mention);
    for (double x : v) REQUIRE(x >= 0);
  }
}

// ---------------------------------------------------------------- NER

TEST_CASE("rule tagger on the documented sentence") {
  const RuleEntityTagger tagger;
  const auto v = ner_counts("John gave $500 on Monday", tagger);
  CHECK(v[entity("MONEY")] >= 1);
  CHECK(v[entity("DATE")] >= 1);
  CHECK(v[entity("PERSON")] >= 1);
  CHECK(v[entity("CARDINAL")] == 0);
}

TEST_CASE("rule tagger categories") {
  const RuleEntityTagger tagger;
  const auto v = ner_counts(
      "Mary Smith moved to New York with two Canadian friends.\n"
      "Acme Widgets Inc paid 40 dollars and \xE2\x82\xAC" "20 near the Pacific Ocean in March.",
      tagger);
  CHECK(v[entity("PERSON")] == 1);
  CHECK(v[entity("GPE")] == 1);
  CHECK(v[entity("NORP")] == 1);
  CHECK(v[entity("ORG")] == 1);
  CHECK(v[entity("MONEY")] == 2);
  CHECK(v[entity("CARDINAL")] == 1);
  CHECK(v[entity("LOC")] == 1);
  CHECK(v[entity("DATE")] == 1);
}

TEST_CASE("NER counts double when a text is repeated") {
  const RuleEntityTagger tagger;
  const std::string t = "John gave $500 on Monday to the Red Cross in Boston";
  const auto one = ner_counts(t, tagger);
  const auto two = ner_counts(t + "\n" + t, tagger);
  for (std::size_t i = 0; i < one.size(); ++i) CHECK(two[i] == 2 * one[i]);
}

TEST_CASE("stub taggers and span validation") {
  const auto zero = ner_counts("anything", StubTagger({}));
  for (double v : zero) CHECK(v == 0);
  CHECK_THROWS_AS(ner_counts("abc", StubTagger({{0, 10, 0}})), ProviderError);
  CHECK_THROWS_AS(ner_counts("abc", StubTagger({{0, 1, 42}})), ProviderError);
  const auto v = ner_counts("abcdef", StubTagger({{0, 6, 3}, {0, 2, 0}, {3, 5, 1}}));
  CHECK(v[3] == 1);
  CHECK(v[0] == 0);
  CHECK(v[1] == 0);
}

TEST_CASE("overlap resolution keeps the longest span, then the earliest") {
  const auto r = resolve_overlaps({{5, 7, 0}, {0, 4, 1}, {2, 6, 2}, {8, 10, 3}, {9, 11, 4}});
  REQUIRE(r.size() == 3);
  CHECK(r[0] == EntitySpan{0, 4, 1});
  CHECK(r[1] == EntitySpan{5, 7, 0});
  CHECK(r[2] == EntitySpan{8, 10, 3});
  CHECK(entity_type_index("WORK_OF_ART") == 8);
  CHECK(entity_type_index("nope") == -1);
}

TEST_CASE("form and NER are additive over concatenation with a sentence break") {
  const RuleEntityTagger tagger;
  const std::string pool[] = {"John paid $40 on Friday!", "HELP us... please", "#hope @mom 50%",
                              "Mary Jones of Boston", "don't stop (now)", "ten dollars for Texas"};
  Rng rng = make_rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const auto& a = pool[uniform_index(rng, std::size(pool))];
    const auto& b = pool[uniform_index(rng, std::size(pool))];
    const auto fa = form_descriptors(a), fb = form_descriptors(b), fab = form_descriptors(a + "\n" + b);
    for (std::size_t i = 0; i < fa.size(); ++i) REQUIRE(fab[i] == fa[i] + fb[i]);
    const auto na = ner_counts(a, tagger), nb = ner_counts(b, tagger), nab = ner_counts(a + "\n" + b, tagger);
    for (std::size_t i = 0; i < na.size(); ++i) REQUIRE(nab[i] == na[i] + nb[i]);
  }
}

// ---------------------------------------------------------------- assembly

TEST_CASE("dense text block layout") {
  const DefaultTextProviders defaults;
  const auto names = dense_text_feature_names(*defaults.view().catalog);
  REQUIRE(names.size() == kDenseTextDimensions);
  CHECK(kDenseTextDimensions == 299);
  CHECK(names[0] == "sent:emotion.sadness");
  CHECK(names[5] == "sent:tone.frustration");
  CHECK(names[12] == "read:ari");
  CHECK(names[26] == "form:all_lower");
  CHECK(names[281] == "ner:PERSON");
  const auto v = dense_text_features("John is happy. He thanks everyone!", defaults.view());
  CHECK(v.size() == names.size());
  CHECK_THROWS_AS(dense_text_features("x.", TextProviders{}), InvalidArgument);
}
