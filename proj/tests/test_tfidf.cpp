// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "cfraud/error.hpp"
#include "cfraud/seed.hpp"
#include "cfraud/textfeat.hpp"

using namespace cfraud;
using Catch::Approx;

namespace {

double weight_of(const std::vector<SparseEntry>& v, std::size_t index) {
  for (const auto& e : v)
    if (e.index == index) return e.weight;
  return 0;
}

}  // namespace

TEST_CASE("two-document example") {
  const std::vector<std::string> docs = {"a b", "a c"};
  const auto v1 = tfidf_fit(docs, 1);
  CHECK(v1.terms == std::vector<std::string>{"a", "b", "c"});
  CHECK(v1.document_frequency == std::vector<std::size_t>{2, 1, 1});
  CHECK(v1.idf(0) == Approx(1.0));
  CHECK(v1.idf(1) == Approx(std::log(1.5) + 1));

  const auto row = tfidf_transform(v1, std::string_view("a b"));
  const double a = 1.0, b = std::log(1.5) + 1, n = std::hypot(a, b);
  CHECK(weight_of(row, 0) == Approx(a / n));
  CHECK(weight_of(row, 1) == Approx(b / n));
  CHECK(weight_of(row, 2) == 0);

  const auto v2 = tfidf_fit(docs, 2);
  CHECK(v2.terms == std::vector<std::string>{"a"});
  CHECK(v2.index_of("a") == 0);
  CHECK_FALSE(v2.index_of("b"));
  CHECK(tfidf_transform(v2, std::string_view("b c d")).empty());
  CHECK(tfidf_fit(docs, 0).size() == 3);
}

TEST_CASE("empty corpus is rejected") {
  CHECK_THROWS_AS(tfidf_fit(std::vector<std::string>{}), InvalidArgument);
}

TEST_CASE("term counts lower-case word tokens") {
  const auto c = term_counts("Help HELP help, kidney!");
  CHECK(c.at("help") == 3);
  CHECK(c.at("kidney") == 1);
  CHECK(c.size() == 2);
}

TEST_CASE("document frequencies match a recount and rows are unit length") {
  Rng rng = make_rng(29);
  const std::vector<std::string> words = {"alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta", "iota",
                                          "kappa", "lambda", "mu"};
  std::vector<std::string> docs;
  for (int d = 0; d < 100; ++d) {
    std::string doc;
    const auto n = 1 + uniform_index(rng, 15);
    for (std::size_t i = 0; i < n; ++i) doc += words[uniform_index(rng, words.size())] + " ";
    docs.push_back(doc);
  }
  for (std::size_t min_df : {1u, 2u, 10u, 40u}) {
    const auto vocab = tfidf_fit(docs, min_df);
    for (const auto& w : words) {
      std::size_t df = 0;
      for (const auto& d : docs) df += (" " + d).find(" " + w + " ") != std::string::npos;
      const auto idx = vocab.index_of(w);
      REQUIRE(idx.has_value() == (df >= min_df));
      if (idx) REQUIRE(vocab.document_frequency[*idx] == df);
    }
    for (const auto& d : docs) {
      const auto row = tfidf_transform(vocab, std::string_view(d));
      double sq = 0;
      for (const auto& e : row) sq += e.weight * e.weight;
      if (!row.empty()) REQUIRE(sq == Approx(1.0).epsilon(1e-12));
    }
  }

  // Document order does not change the vocabulary or the weights.
  auto shuffled = docs;
  shuffle(shuffled, rng);
  const auto a = tfidf_fit(docs), b = tfidf_fit(shuffled);
  CHECK(a.terms == b.terms);
  CHECK(a.document_frequency == b.document_frequency);
  const auto ra = tfidf_transform(a, std::string_view(docs[0])), rb = tfidf_transform(b, std::string_view(docs[0]));
  REQUIRE(ra.size() == rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) CHECK(ra[i].weight == rb[i].weight);
}

TEST_CASE("vocabulary size determines the assembled text dimension") {
  // 8042 terms, each in exactly two documents.
  std::vector<TermCounts> docs(8042);
  for (std::size_t t = 0; t < 8042; ++t) {
    const std::string term = "w" + std::to_string(t);
    docs[t][term] = 1;
    docs[(t + 1) % docs.size()][term] = 1;
  }
  const auto vocab = tfidf_fit(std::span<const TermCounts>(docs), 2);
  CHECK(vocab.size() == 8042);

  const DefaultTextProviders providers;
  Campaign c;
  c.id = "x";
  c.description = "We need help w17 w18 for surgery. Thank you.";
  const auto fv = assemble_text_features(c, providers.view(), vocab);
  CHECK(fv.size() == 8341);
  CHECK(fv.schema->names().back() == "tfidf:" + vocab.terms.back());
  CHECK(fv["tfidf:w17"] > 0);
  CHECK(fv["tfidf:w5"] == 0);
}
