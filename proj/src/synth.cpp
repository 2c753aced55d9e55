// SPDX-License-Identifier: Apache-2.0
#include "cfraud/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "cfraud/error.hpp"
#include "cfraud/seed.hpp"

namespace cfraud {

namespace {

constexpr double kCueMean = 4.0;
constexpr double kCueSigma = 1.5;
constexpr std::string_view kJoyWords[] = {"blessed", "bright", "celebrate", "cheerful", "delight",
                                          "glad",    "happy",  "joy",       "joyful",   "laugh"};

enum Cue { Upper, Exclaim, Dollar, Hashtag, Joy, kCueCount };

/// Pronounceable lower-case tokens outside every bundled word list.
std::vector<std::string> filler_words(std::size_t n, Rng& rng) {
  static constexpr std::string_view kOnsets[] = {"b", "d", "k", "l", "m", "n", "r", "s", "t", "v", "z", "p"};
  static constexpr std::string_view kNuclei[] = {"a", "e", "i", "o", "u"};
  std::set<std::string> seen;
  std::vector<std::string> out;
  while (out.size() < n) {
    std::string w;
    const std::size_t syllables = 3 + uniform_index(rng, 2);
    for (std::size_t s = 0; s < syllables; ++s) {
      w += kOnsets[uniform_index(rng, std::size(kOnsets))];
      w += kNuclei[uniform_index(rng, std::size(kNuclei))];
    }
    if (seen.insert(w).second) out.push_back(w);
  }
  return out;
}

/// Fraction of the fraud shift and noise multiplier for an annotation score.
struct ScoreProfile {
  double shift = 0;  // 1: fraud means, 0: not-fraud means
  double noise = 1;
};

ScoreProfile profile_for(int score, const SyntheticSpec& spec) {
  switch (score) {
    case 1: return {1.0, 1.0};
    case 5: return {0.0, 1.0};
    case 2: return {0.5 + 0.5 * spec.holdout_signal, spec.holdout_noise};
    case 4: return {0.5 - 0.5 * spec.holdout_signal, spec.holdout_noise};
    default: return {0.5, 1.0};
  }
}

std::size_t draw_count(double mean, double sigma, Rng& rng) {
  return static_cast<std::size_t>(std::max(0.0, std::round(mean + sigma * standard_normal(rng))));
}

std::string make_description(const ScoreProfile& p, const SyntheticSpec& spec,
                             const std::vector<std::string>& filler, Rng& rng) {
  const double shift = spec.text_shift_sigmas * kCueSigma;
  std::array<std::size_t, kCueCount> counts{};
  for (int c = 0; c < kCueCount; ++c) {
    // Joy words are the not-fraud cue; the others mark fraud.
    const double frac = c == Joy ? 1.0 - p.shift : p.shift;
    counts[c] = draw_count(kCueMean + frac * shift, kCueSigma * p.noise, rng);
  }

  std::vector<std::string> tokens;
  const std::size_t n_filler = 60 + uniform_index(rng, 21);
  for (std::size_t i = 0; i < n_filler; ++i) tokens.push_back(filler[uniform_index(rng, filler.size())]);
  const auto pick = [&] { return filler[uniform_index(rng, filler.size())]; };
  for (std::size_t i = 0; i < counts[Upper]; ++i) {
    std::string w = pick();
    std::transform(w.begin(), w.end(), w.begin(), [](unsigned char ch) { return static_cast<char>(ch - 32); });
    tokens.push_back(std::move(w));
  }
  for (std::size_t i = 0; i < counts[Exclaim]; ++i) tokens.push_back(pick() + "!");
  for (std::size_t i = 0; i < counts[Dollar]; ++i) tokens.push_back("$" + std::to_string(50 * (1 + uniform_index(rng, 100))));
  for (std::size_t i = 0; i < counts[Hashtag]; ++i) tokens.push_back("#" + pick());
  for (std::size_t i = 0; i < counts[Joy]; ++i) tokens.emplace_back(kJoyWords[uniform_index(rng, std::size(kJoyWords))]);
  shuffle(tokens, rng);

  // Sentences of 8-14 tokens, each closed with a period unless it already ends in '!'.
  std::string text;
  std::size_t in_sentence = 0, target = 8 + uniform_index(rng, 7);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!text.empty()) text += ' ';
    text += tokens[i];
    if (++in_sentence == target || i + 1 == tokens.size()) {
      if (text.back() != '!') text += '.';
      in_sentence = 0;
      target = 8 + uniform_index(rng, 7);
    }
  }
  return text;
}

ImageFeatures make_image(const ScoreProfile& p, const SyntheticSpec& spec, Rng& rng) {
  std::vector<double> flat(kImageVectorDims - 1);
  for (auto& v : flat) v = standard_normal(rng) * p.noise;
  for (auto idx : kSyntheticImageSignals) flat[idx] += p.shift * spec.image_shift_sigmas;
  ImageFeatures f;
  const auto take = [&](std::size_t from, std::size_t n) {
    std::vector<float> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<float>(flat[from + i]);
    return out;
  };
  f.emotion = take(0, kImageEmotionDims);
  f.appearance = take(kImageEmotionDims, kAppearanceDims);
  f.semantic = take(kImageEmotionDims + kAppearanceDims, kSemanticDims);
  f.faces = static_cast<int>(uniform_index(rng, 4));
  f.extractor_version = "synthetic-1";
  return f;
}

}  // namespace

SyntheticCorpus generate_synthetic_corpus(const SyntheticSpec& spec) {
  for (const auto& [score, n] : spec.per_score)
    if (score < 0 || score > 5) throw InvalidArgument("synthetic score out of range: " + std::to_string(score));
  if (spec.filler_vocabulary < 10) throw InvalidArgument("filler vocabulary needs at least 10 words");

  Rng vocab_rng = make_rng(derive_seed(spec.seed, 0));
  const auto filler = filler_words(spec.filler_vocabulary, vocab_rng);

  SyntheticCorpus out;
  std::vector<Campaign> campaigns;
  std::map<std::string, AnnotationScore> scores;
  std::size_t index = 0;
  for (const auto& [score, n] : spec.per_score) {
    const auto profile = profile_for(score, spec);
    for (std::size_t k = 0; k < n; ++k, ++index) {
      Rng rng = make_rng(derive_seed(spec.seed, index + 1));
      char id[32];
      std::snprintf(id, sizeof id, "syn-%05zu", index);
      Campaign c;
      c.id = id;
      c.platform = Platform::GoFundMe;
      c.title = std::string("Campaign ") + id;
      c.category = "medical";
      c.created_at = "2020-01-01T00:00:00Z";
      c.description = make_description(profile, spec, filler, rng);
      for (std::size_t i = 0; i < spec.images_per_campaign; ++i) {
        const std::string ref = c.id + "-" + std::to_string(i) + ".jpg";
        c.images.push_back(ref);
        out.sidecars.emplace(ref, make_image(profile, spec, rng));
      }
      scores.emplace(c.id, AnnotationScore{score, std::nullopt});
      campaigns.push_back(std::move(c));
    }
  }
  out.corpus = Corpus(std::move(campaigns), std::move(scores));
  return out;
}

void write_synthetic_corpus(const SyntheticCorpus& synthetic, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "sidecars");
  {
    std::ofstream out(dir / "corpus.jsonl", std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / "corpus.jsonl").string());
    write_corpus(out, synthetic.corpus);
    if (!out) throw IoError("write failed: " + (dir / "corpus.jsonl").string());
  }
  for (const auto& [ref, features] : synthetic.sidecars) write_sidecar(features, dir / "sidecars", ref);
}

}  // namespace cfraud
