// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <sstream>

#include "cfraud/corpus.hpp"
#include "cfraud/error.hpp"
#include "cfraud/seed.hpp"

using namespace cfraud;

namespace {

const char* kLongText = "We need help paying for surgery after the accident last spring. Thank you.";

std::string record(const std::string& id, int score, const std::string& description = kLongText) {
  nlohmann::json j = {{"id", id},         {"platform", "GoFundMe"}, {"title", "Title " + id},
                      {"description", description}, {"category", "medical"}, {"created_at", "2019-03-04T05:06:07Z"},
                      {"score", score}};
  return j.dump();
}

Corpus parse(const std::string& text) {
  std::istringstream in(text);
  return read_corpus(in);
}

}  // namespace

TEST_CASE("empty input yields an empty corpus") {
  const auto c = parse("");
  CHECK(c.empty());
  CHECK(c.skipped().empty());
}

TEST_CASE("three-record fixture round trips field by field") {
  const std::string fixture =
      R"({"id":"a1","platform":"GoFundMe","title":"Help Ann","description":"Ann needs a kidney transplant soon. Every dollar helps her family today.","category":"medical","created_at":"2020-01-02T03:04:05Z","score":5,"goal_minor":1500000,"goal_currency":"USD","duration_days":30.5,"images":["img/a1.jpg","img/a1b.jpg"],"metadata":{"raised_minor":250000,"donors":17}})"
      "\n"
      R"({"id":"b2","platform":"fundly","title":"Cancer fund","description":"Please give money now, my cancer treatment is expensive and urgent!","category":"medical","created_at":"2020-05-06T07:08:09+02:00","score":1,"shares":44})"
      "\n"
      R"({"id":"c3","platform":"Crowdrise","title":"Bills","description":"Our hospital bills keep growing after three months of care. Thank you all.","category":"medical","created_at":"2021-12-31T23:59:59.5Z","score":3,"annotations":[{"score":3,"annotator":"x"},{"score":4,"annotator":"y"}]})"
      "\n";
  const auto c = parse(fixture);
  REQUIRE(c.size() == 3);

  const auto& a = c.at("a1");
  CHECK(a.platform == Platform::GoFundMe);
  CHECK(a.title == "Help Ann");
  CHECK(a.category == "medical");
  CHECK(a.created_at == "2020-01-02T03:04:05Z");
  REQUIRE(a.goal);
  CHECK(a.goal->minor_units == 1500000);
  CHECK(a.goal->currency == "USD");
  CHECK(a.duration_days == 30.5);
  CHECK(a.images == std::vector<std::string>{"img/a1.jpg", "img/a1b.jpg"});
  CHECK(a.metadata.at("donors") == 17);
  CHECK(c.scores().at("a1").score == 5);

  const auto& b = c.at("b2");
  CHECK(b.platform == Platform::Fundly);
  CHECK(b.metadata.at("shares") == 44);
  CHECK_FALSE(b.goal);

  const auto& d = c.at("c3");
  CHECK(d.platform == Platform::Other);
  CHECK(d.metadata.at("platform_name") == "Crowdrise");
  REQUIRE(c.annotations().at("c3").size() == 2);
  CHECK(c.annotations().at("c3")[1].score == 4);
  CHECK(c.annotations().at("c3")[1].annotator_id == "y");

  std::ostringstream out;
  write_corpus(out, c);
  const auto again = parse(out.str());
  CHECK(again.campaigns() == c.campaigns());
  CHECK(again.scores() == c.scores());
  CHECK(again.annotations() == c.annotations());
}

TEST_CASE("short or missing descriptions are skipped with a reason") {
  const auto c = parse(record("ok", 1) + "\n" + record("short", 1, "Help") + "\n" +
                       R"({"id":"none","platform":"Other","title":"t","category":"c","created_at":"2020-01-01T00:00:00Z","score":2})" +
                       "\n" + record("noterm", 1, "one two three four five six seven eight nine ten eleven") + "\n");
  REQUIRE(c.size() == 1);
  REQUIRE(c.skipped().size() == 3);
  CHECK(c.skipped()[0].id == "short");
  CHECK(c.skipped()[0].reason == "insufficient text");
  CHECK(c.skipped()[0].line == 2);
  CHECK(c.skipped()[1].reason == "missing description");
  CHECK(c.skipped()[2].reason == "insufficient text");
}

TEST_CASE("malformed lines report their line number") {
  try {
    parse(record("a", 1) + "\n{not json\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  try {
    parse(record("a", 1) + "\n" + record("a", 5) + "\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
  }
  CHECK_THROWS_AS(parse(record("a", 7)), ParseError);
  CHECK_THROWS_AS(parse(R"({"id":"a","platform":"x","title":"t","description":"d","category":"c","created_at":"yesterday","score":1})"),
                  ParseError);
  CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.jsonl"), IoError);
}

TEST_CASE("RFC 3339 timestamps") {
  CHECK(parse_rfc3339("1970-01-01T00:00:00Z") == 0);
  CHECK(parse_rfc3339("1970-01-01T01:00:00+01:00") == 0);
  CHECK(parse_rfc3339("2000-03-01T00:00:00Z") == 951868800);
  CHECK_FALSE(parse_rfc3339("2019-02-29T00:00:00Z"));
  CHECK_FALSE(parse_rfc3339("2019-13-01T00:00:00Z"));
  CHECK_FALSE(parse_rfc3339("2019-01-01 00:00:00"));
}

TEST_CASE("label grouping table for every score and setup") {
  // score -> expected label under I, II; -1 = dropped.
  const int table[6][2] = {{-1, -1}, {1, 1}, {1, -1}, {-1, -1}, {0, -1}, {0, 0}};
  for (int score = 0; score <= 5; ++score) {
    const auto l1 = label_for_score(LabelSetup::LabelI, score);
    const auto l2 = label_for_score(LabelSetup::LabelII, score);
    CHECK((l1 ? *l1 : -1) == table[score][0]);
    CHECK((l2 ? *l2 : -1) == table[score][1]);
    CHECK(label_for_score(LabelSetup::LabelIII, score) == l2);
    const auto h = label3_holdout_label(score);
    CHECK((h ? *h : -1) == (score == 2 ? 1 : score == 4 ? 0 : -1));
  }
}

TEST_CASE("apply_label_setup") {
  std::string text;
  for (int s = 0; s <= 5; ++s) text += record("c" + std::to_string(s), s) + "\n";
  const auto c = parse(text);

  const auto l1 = apply_label_setup(c, c.scores(), LabelSetup::LabelI);
  CHECK(l1.labeled.entries == std::vector<LabeledEntry>{{"c1", 1}, {"c2", 1}, {"c4", 0}, {"c5", 0}});
  CHECK(l1.dropped == std::vector<std::string>{"c0", "c3"});

  const auto l2 = apply_label_setup(c, c.scores(), LabelSetup::LabelII);
  CHECK(l2.labeled.entries == std::vector<LabeledEntry>{{"c1", 1}, {"c5", 0}});
  for (const auto& e : l2.labeled.entries) CHECK(l1.labeled.label_of(e.id) == e.label);

  const auto l3 = apply_label_setup(c, c.scores(), LabelSetup::LabelIII);
  CHECK(l3.labeled.entries == std::vector<LabeledEntry>{{"c1", 1}, {"c5", 0}});
  CHECK(l3.holdout.entries == std::vector<LabeledEntry>{{"c2", 1}, {"c4", 0}});
  CHECK(l3.dropped == std::vector<std::string>{"c0", "c3"});

  CHECK_THROWS_AS(apply_label_setup(c, {}, LabelSetup::LabelI), InvalidArgument);
  CHECK(parse_label_setup("label2") == LabelSetup::LabelII);
  CHECK(parse_label_setup("III") == LabelSetup::LabelIII);
}

TEST_CASE("LabelII is a subset of LabelI on random corpora") {
  Rng rng = make_rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::string text;
    const auto n = 1 + uniform_index(rng, 30);
    for (std::size_t i = 0; i < n; ++i)
      text += record("r" + std::to_string(i), static_cast<int>(uniform_index(rng, 6))) + "\n";
    const auto c = parse(text);
    const auto l1 = apply_label_setup(c, c.scores(), LabelSetup::LabelI).labeled;
    const auto l2 = apply_label_setup(c, c.scores(), LabelSetup::LabelII).labeled;
    for (const auto& e : l2.entries) REQUIRE(l1.label_of(e.id) == e.label);
  }
}

TEST_CASE("Cohen's kappa fixtures") {
  const auto same = cohens_kappa({1, 1, 0, 0}, {1, 1, 0, 0});
  CHECK(same.kappa == 1.0);
  const auto zero = cohens_kappa({1, 1, 0, 0}, {1, 0, 0, 1});
  CHECK(zero.observed == 0.5);
  CHECK(zero.expected == 0.5);
  CHECK(zero.kappa == 0.0);
  CHECK(cohens_kappa({3, 3, 3}, {3, 3, 3}).kappa == 1.0);
  CHECK(landis_koch_band(0.675) == "substantial");
  CHECK(landis_koch_band(-0.1) == "poor");
  CHECK(landis_koch_band(0.1) == "slight");
  CHECK(landis_koch_band(0.3) == "fair");
  CHECK(landis_koch_band(0.5) == "moderate");
  CHECK(landis_koch_band(0.9) == "almost perfect");
  CHECK_THROWS_AS(cohens_kappa({1}, {1, 2}), InvalidArgument);
  CHECK_THROWS_AS(cohens_kappa({}, {}), InvalidArgument);
}

TEST_CASE("kappa properties on random annotation pairs") {
  Rng rng = make_rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = 2 + uniform_index(rng, 40);
    std::vector<int> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<int>(uniform_index(rng, 4));
      b[i] = uniform_index(rng, 3) == 0 ? static_cast<int>(uniform_index(rng, 4)) : a[i];
    }
    const auto k = cohens_kappa(a, b);
    REQUIRE(k.kappa >= -1.0);
    REQUIRE(k.kappa <= 1.0);
    REQUIRE(cohens_kappa(b, a).kappa == Catch::Approx(k.kappa).margin(1e-15));
    // Relabel with a bijection applied to both sequences.
    std::vector<int> ra(n), rb(n);
    for (std::size_t i = 0; i < n; ++i) {
      ra[i] = 10 - 3 * a[i];
      rb[i] = 10 - 3 * b[i];
    }
    REQUIRE(cohens_kappa(ra, rb).kappa == Catch::Approx(k.kappa).margin(1e-12));
    if (a == b && k.expected < 1) REQUIRE(k.kappa == 1.0);
  }
}
