// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace cfraud {

enum class Platform { GoFundMe, MightyCause, Fundly, Fundrazr, Indiegogo, Other };

std::string_view to_string(Platform p);
/// Case-insensitive; unknown names map to Platform::Other.
Platform parse_platform(std::string_view name);

struct Money {
  std::int64_t minor_units = 0;  // cents for USD
  std::string currency;          // ISO 4217, upper case

  bool operator==(const Money&) const = default;
};

/// One crowdfunding appeal as published. Only `title`/`description`/`images`
/// reach feature assembly; `metadata` carries post-publication fields (money
/// raised, donors, shares, geo tag) and is never read by extractors.
struct Campaign {
  std::string id;
  Platform platform = Platform::Other;
  std::string title;
  std::string description;
  std::string category;
  std::string created_at;  // RFC 3339, kept verbatim
  std::optional<double> duration_days;
  std::optional<Money> goal;
  std::vector<std::string> images;
  std::map<std::string, nlohmann::json> metadata;

  bool operator==(const Campaign&) const = default;
};

/// Fraud scale: 0 invalid, 1 fraud ... 5 not fraud.
struct AnnotationScore {
  int score = 0;
  std::optional<std::string> annotator_id;

  bool operator==(const AnnotationScore&) const = default;
};

struct SkippedRecord {
  std::size_t line = 0;
  std::string id;  // empty when the record had none
  std::string reason;
};

/// Immutable after load.
class Corpus {
 public:
  Corpus() = default;
  /// Throws InvalidArgument on empty or duplicate ids.
  Corpus(std::vector<Campaign> campaigns, std::map<std::string, AnnotationScore> scores,
         std::map<std::string, std::vector<AnnotationScore>> annotations = {});

  const std::vector<Campaign>& campaigns() const noexcept { return campaigns_; }
  std::size_t size() const noexcept { return campaigns_.size(); }
  bool empty() const noexcept { return campaigns_.empty(); }
  const Campaign* find(std::string_view id) const;
  const Campaign& at(std::string_view id) const;

  /// Consensus score per campaign id (the record's `score`).
  const std::map<std::string, AnnotationScore>& scores() const noexcept { return scores_; }
  /// Per-annotator scores when the record carried them.
  const std::map<std::string, std::vector<AnnotationScore>>& annotations() const noexcept {
    return annotations_;
  }

  const std::vector<SkippedRecord>& skipped() const noexcept { return skipped_; }
  void set_skipped(std::vector<SkippedRecord> skipped) { skipped_ = std::move(skipped); }

 private:
  std::vector<Campaign> campaigns_;
  std::map<std::string, std::size_t> index_;
  std::map<std::string, AnnotationScore> scores_;
  std::map<std::string, std::vector<AnnotationScore>> annotations_;
  std::vector<SkippedRecord> skipped_;
};

/// Minimum usable description: at least this many word tokens and one
/// sentence terminator.
inline constexpr std::size_t kMinDescriptionWords = 10;

/// Returns the skip reason, or nullopt when the description is usable.
std::optional<std::string> description_rejection(std::string_view description);

/// Parses JSON-lines. Records without a usable description are skipped and
/// listed in Corpus::skipped(); malformed lines and duplicate ids throw
/// ParseError carrying the line number. Unreadable file throws IoError.
Corpus load_corpus(const std::string& path);
Corpus read_corpus(std::istream& in);

/// Inverse of load_corpus for retained campaigns.
void write_corpus(std::ostream& out, const Corpus& corpus);
nlohmann::json campaign_to_json(const Campaign& c, const AnnotationScore& score,
                                const std::vector<AnnotationScore>* annotations = nullptr);

/// Validates an RFC 3339 timestamp and returns seconds since the epoch (UTC).
std::optional<std::int64_t> parse_rfc3339(std::string_view s);

// ---------------------------------------------------------------- labels

enum class LabelSetup { LabelI, LabelII, LabelIII };

std::string_view to_string(LabelSetup s);
/// Accepts "I", "II", "III" and "label1".."label3" style spellings.
LabelSetup parse_label_setup(std::string_view s);

inline constexpr int kFraud = 1;
inline constexpr int kNotFraud = 0;

struct LabeledEntry {
  std::string id;
  int label = kNotFraud;

  bool operator==(const LabeledEntry&) const = default;
};

/// Entries sorted by id.
struct LabeledSet {
  std::vector<LabeledEntry> entries;

  std::size_t size() const noexcept { return entries.size(); }
  std::size_t count(int label) const;
  std::optional<int> label_of(std::string_view id) const;
};

struct LabelAssignment {
  LabeledSet labeled;         // training population (LabelIII: the {1,5} campaigns)
  LabeledSet holdout;         // LabelIII only: {2 -> fraud, 4 -> not fraud}
  std::vector<std::string> dropped;
};

/// Binary label for `score` under `setup`, or nullopt when dropped. For
/// LabelIII this is the training grouping (identical to LabelII).
std::optional<int> label_for_score(LabelSetup setup, int score);
/// LabelIII test grouping: 2 -> fraud, 4 -> not fraud.
std::optional<int> label3_holdout_label(int score);

/// Throws InvalidArgument when a corpus id has no score.
LabelAssignment apply_label_setup(const Corpus& corpus,
                                  const std::map<std::string, AnnotationScore>& scores,
                                  LabelSetup setup);

// ---------------------------------------------------------------- agreement

struct KappaResult {
  double kappa = 0.0;
  double observed = 0.0;  // p_o
  double expected = 0.0;  // p_e
  std::string band;
};

/// Landis & Koch interpretation of a kappa value.
std::string_view landis_koch_band(double kappa);

/// Cohen's kappa for two annotators. When both annotators use a single
/// identical category (p_e = 1 and p_o = 1) kappa is defined as 1.
/// Throws InvalidArgument on length mismatch or empty input.
KappaResult cohens_kappa(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace cfraud
