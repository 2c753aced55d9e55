// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "cfraud/corpus.hpp"
#include "cfraud/imagefeat.hpp"

namespace cfraud {

/// Seeded generator of labeled campaigns with controlled signal.
///
/// Text: neutral filler sentences plus five injected cue counts (upper-case
/// words, exclamation words, dollar amounts, hashtags, joy words), each drawn
/// from N(mu, sigma) and moved by `text_shift_sigmas * sigma` for fraud.
/// Images: N(0,1) sidecar blocks with five coordinates shifted by
/// `image_shift_sigmas` for fraud.
/// Scores 2 and 4 carry `holdout_signal` of the shift with `holdout_noise`
/// times the spread; scores 0 and 3 carry no signal.
struct SyntheticSpec {
  std::map<int, std::size_t> per_score = {{1, 200}, {5, 200}};
  std::uint64_t seed = 1;
  double text_shift_sigmas = 3.0;
  double image_shift_sigmas = 3.0;
  std::size_t images_per_campaign = 1;
  double holdout_signal = 0.75;
  double holdout_noise = 1.25;
  std::size_t filler_vocabulary = 300;
};

/// Feature names the generator moves; used by tests to check selection.
inline constexpr const char* kSyntheticTextSignals[] = {
    "form:all_upper", "form:exclamation_word", "ner:MONEY", "form:hashtag", "sent:emotion.joy"};
inline constexpr std::size_t kSyntheticImageSignals[] = {1, 8 + 10, 8 + 1000, 8 + 2048 + 5, 8 + 2048 + 500};

struct SyntheticCorpus {
  Corpus corpus;
  std::map<std::string, ImageFeatures> sidecars;  // image reference -> features
};

SyntheticCorpus generate_synthetic_corpus(const SyntheticSpec& spec);

/// Writes `<dir>/corpus.jsonl` and `<dir>/sidecars/<stem>.feat.json`.
void write_synthetic_corpus(const SyntheticCorpus& synthetic, const std::filesystem::path& dir);

}  // namespace cfraud
