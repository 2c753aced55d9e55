// SPDX-License-Identifier: Apache-2.0
#include "cfraud/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "cfraud/error.hpp"
#include "cfraud/text.hpp"

namespace cfraud {

namespace {

constexpr std::pair<Platform, std::string_view> kPlatformNames[] = {
    {Platform::GoFundMe, "GoFundMe"},   {Platform::MightyCause, "MightyCause"},
    {Platform::Fundly, "Fundly"},       {Platform::Fundrazr, "Fundrazr"},
    {Platform::Indiegogo, "Indiegogo"}, {Platform::Other, "Other"}};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

std::string_view to_string(Platform p) {
  for (auto [value, name] : kPlatformNames)
    if (value == p) return name;
  return "Other";
}

Platform parse_platform(std::string_view name) {
  for (auto [value, n] : kPlatformNames)
    if (iequals(n, name)) return value;
  return Platform::Other;
}

Corpus::Corpus(std::vector<Campaign> campaigns, std::map<std::string, AnnotationScore> scores,
               std::map<std::string, std::vector<AnnotationScore>> annotations)
    : campaigns_(std::move(campaigns)), scores_(std::move(scores)), annotations_(std::move(annotations)) {
  for (std::size_t i = 0; i < campaigns_.size(); ++i) {
    const auto& id = campaigns_[i].id;
    if (id.empty()) throw InvalidArgument("campaign with empty id");
    if (!index_.emplace(id, i).second) throw InvalidArgument("duplicate campaign id: " + id);
  }
}

const Campaign* Corpus::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &campaigns_[it->second];
}

const Campaign& Corpus::at(std::string_view id) const {
  if (const auto* c = find(id)) return *c;
  throw InvalidArgument("unknown campaign id: " + std::string(id));
}

std::optional<std::string> description_rejection(std::string_view description) {
  if (text::word_tokens(description).size() < kMinDescriptionWords ||
      !text::has_sentence_terminator(description)) {
    return "insufficient text";
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- RFC 3339

namespace {

std::optional<int> digits(std::string_view s, std::size_t pos, std::size_t n) {
  if (pos + n > s.size()) return std::nullopt;
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
    v = v * 10 + (s[i] - '0');
  }
  return v;
}

// Howard Hinnant's days_from_civil.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

}  // namespace

std::optional<std::int64_t> parse_rfc3339(std::string_view s) {
  const auto year = digits(s, 0, 4), month = digits(s, 5, 2), day = digits(s, 8, 2);
  const auto hour = digits(s, 11, 2), minute = digits(s, 14, 2), second = digits(s, 17, 2);
  if (!year || !month || !day || !hour || !minute || !second) return std::nullopt;
  if (s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != 't' && s[10] != ' ') || s[13] != ':' ||
      s[16] != ':')
    return std::nullopt;
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (*month < 1 || *month > 12 || *day < 1) return std::nullopt;
  const int mdays = kDays[*month - 1] + (*month == 2 && leap(*year) ? 1 : 0);
  if (*day > mdays || *hour > 23 || *minute > 59 || *second > 60) return std::nullopt;
  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    const std::size_t start = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (pos == start) return std::nullopt;
  }
  if (pos >= s.size()) return std::nullopt;
  std::int64_t offset = 0;
  if (s[pos] == 'Z' || s[pos] == 'z') {
    ++pos;
  } else if (s[pos] == '+' || s[pos] == '-') {
    const int sign = s[pos] == '-' ? -1 : 1;
    const auto oh = digits(s, pos + 1, 2), om = digits(s, pos + 4, 2);
    if (!oh || !om || pos + 3 >= s.size() || s[pos + 3] != ':' || *oh > 23 || *om > 59) return std::nullopt;
    offset = sign * (*oh * 3600 + *om * 60);
    pos += 6;
  } else {
    return std::nullopt;
  }
  if (pos != s.size()) return std::nullopt;
  const std::int64_t days = days_from_civil(*year, static_cast<unsigned>(*month), static_cast<unsigned>(*day));
  return days * 86400 + *hour * 3600 + *minute * 60 + *second - offset;
}

// ---------------------------------------------------------------- JSONL

namespace {

using nlohmann::json;

const std::set<std::string, std::less<>> kKnownKeys = {
    "id",     "platform",      "title",        "description", "category", "created_at", "score",
    "images", "goal_minor",    "goal_currency", "duration_days", "metadata", "annotations"};

std::string required_string(const json& j, const char* key, std::size_t line) {
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing required key '") + key + "'", line);
  if (!it->is_string()) throw ParseError(std::string("key '") + key + "' must be a string", line);
  return it->get<std::string>();
}

int parse_score(const json& v, std::size_t line) {
  if (!v.is_number_integer()) throw ParseError("score must be an integer", line);
  const auto s = v.get<std::int64_t>();
  if (s < 0 || s > 5) throw ParseError("score outside 0..5: " + std::to_string(s), line);
  return static_cast<int>(s);
}

bool is_scalar(const json& v) { return v.is_primitive(); }

struct ParsedRecord {
  Campaign campaign;
  AnnotationScore score;
  std::vector<AnnotationScore> annotations;
};

ParsedRecord parse_record(const json& j, std::size_t line) {
  if (!j.is_object()) throw ParseError("record is not a JSON object", line);
  ParsedRecord r;
  Campaign& c = r.campaign;
  c.id = required_string(j, "id", line);
  if (c.id.empty()) throw ParseError("empty id", line);
  const std::string platform = required_string(j, "platform", line);
  c.platform = parse_platform(platform);
  c.title = required_string(j, "title", line);
  c.category = required_string(j, "category", line);
  c.created_at = required_string(j, "created_at", line);
  if (!parse_rfc3339(c.created_at)) throw ParseError("created_at is not RFC 3339: " + c.created_at, line);
  const auto score = j.find("score");
  if (score == j.end()) throw ParseError("missing required key 'score'", line);
  r.score.score = parse_score(*score, line);

  if (const auto d = j.find("description"); d != j.end() && !d->is_null()) {
    if (!d->is_string()) throw ParseError("key 'description' must be a string", line);
    c.description = d->get<std::string>();
  }

  if (const auto g = j.find("goal_minor"); g != j.end() && !g->is_null()) {
    if (!g->is_number_integer()) throw ParseError("goal_minor must be an integer", line);
    Money m;
    m.minor_units = g->get<std::int64_t>();
    const auto cur = j.find("goal_currency");
    if (cur == j.end() || !cur->is_string()) throw ParseError("goal_minor requires goal_currency", line);
    m.currency = cur->get<std::string>();
    if (m.currency.size() != 3 ||
        !std::all_of(m.currency.begin(), m.currency.end(), [](char ch) { return ch >= 'A' && ch <= 'Z'; }))
      throw ParseError("goal_currency must be an ISO 4217 code: " + m.currency, line);
    c.goal = m;
  }
  if (const auto d = j.find("duration_days"); d != j.end() && !d->is_null()) {
    if (!d->is_number()) throw ParseError("duration_days must be a number", line);
    c.duration_days = d->get<double>();
  }
  if (const auto imgs = j.find("images"); imgs != j.end() && !imgs->is_null()) {
    if (!imgs->is_array()) throw ParseError("images must be a list", line);
    for (const auto& v : *imgs) {
      if (!v.is_string()) throw ParseError("image references must be strings", line);
      c.images.push_back(v.get<std::string>());
    }
  }
  if (const auto md = j.find("metadata"); md != j.end() && !md->is_null()) {
    if (!md->is_object()) throw ParseError("metadata must be an object", line);
    for (const auto& [k, v] : md->items()) {
      if (!is_scalar(v)) throw ParseError("metadata value for '" + k + "' is not a scalar", line);
      c.metadata[k] = v;
    }
  }
  if (const auto an = j.find("annotations"); an != j.end() && !an->is_null()) {
    if (!an->is_array()) throw ParseError("annotations must be a list", line);
    for (const auto& a : *an) {
      if (!a.is_object() || !a.contains("score")) throw ParseError("annotation needs a score", line);
      AnnotationScore s;
      s.score = parse_score(a["score"], line);
      if (a.contains("annotator")) s.annotator_id = a["annotator"].get<std::string>();
      r.annotations.push_back(s);
    }
  }
  for (const auto& [k, v] : j.items()) {
    if (kKnownKeys.count(k)) continue;
    if (c.metadata.count(k)) throw ParseError("key '" + k + "' present both top-level and in metadata", line);
    c.metadata[k] = v;
  }
  if (c.platform == Platform::Other && !iequals(platform, "Other")) {
    c.metadata.emplace("platform_name", platform);
  }
  return r;
}

}  // namespace

Corpus read_corpus(std::istream& in) {
  std::vector<Campaign> campaigns;
  std::map<std::string, AnnotationScore> scores;
  std::map<std::string, std::vector<AnnotationScore>> annotations;
  std::vector<SkippedRecord> skipped;
  std::map<std::string, std::size_t> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (std::all_of(line.begin(), line.end(), [](unsigned char ch) { return std::isspace(ch); })) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), lineno);
    }
    ParsedRecord r;
    try {
      r = parse_record(j, lineno);
    } catch (const json::exception& e) {
      throw ParseError(std::string("invalid record: ") + e.what(), lineno);
    }
    if (auto [it, inserted] = seen.emplace(r.campaign.id, lineno); !inserted) {
      throw ParseError("duplicate id '" + r.campaign.id + "' (first seen on line " + std::to_string(it->second) + ")",
                       lineno);
    }
    if (r.campaign.description.empty()) {
      skipped.push_back({lineno, r.campaign.id, "missing description"});
      continue;
    }
    if (auto reason = description_rejection(r.campaign.description)) {
      skipped.push_back({lineno, r.campaign.id, *reason});
      continue;
    }
    scores[r.campaign.id] = r.score;
    if (!r.annotations.empty()) annotations[r.campaign.id] = std::move(r.annotations);
    campaigns.push_back(std::move(r.campaign));
  }
  Corpus corpus(std::move(campaigns), std::move(scores), std::move(annotations));
  corpus.set_skipped(std::move(skipped));
  return corpus;
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read corpus file " + path);
  return read_corpus(in);
}

nlohmann::json campaign_to_json(const Campaign& c, const AnnotationScore& score,
                                const std::vector<AnnotationScore>* annotations) {
  json j = json::object();
  j["id"] = c.id;
  j["platform"] = std::string(to_string(c.platform));
  j["title"] = c.title;
  j["description"] = c.description;
  j["category"] = c.category;
  j["created_at"] = c.created_at;
  j["score"] = score.score;
  if (c.goal) {
    j["goal_minor"] = c.goal->minor_units;
    j["goal_currency"] = c.goal->currency;
  }
  if (c.duration_days) j["duration_days"] = *c.duration_days;
  j["images"] = c.images;
  json md = json::object();
  for (const auto& [k, v] : c.metadata) md[k] = v;
  j["metadata"] = md;
  if (annotations && !annotations->empty()) {
    json arr = json::array();
    for (const auto& a : *annotations) {
      json e = {{"score", a.score}};
      if (a.annotator_id) e["annotator"] = *a.annotator_id;
      arr.push_back(e);
    }
    j["annotations"] = arr;
  }
  return j;
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& c : corpus.campaigns()) {
    const auto sit = corpus.scores().find(c.id);
    const AnnotationScore score = sit == corpus.scores().end() ? AnnotationScore{} : sit->second;
    const auto ait = corpus.annotations().find(c.id);
    const auto* ann = ait == corpus.annotations().end() ? nullptr : &ait->second;
    out << campaign_to_json(c, score, ann).dump() << '\n';
  }
}

// ---------------------------------------------------------------- labels

std::string_view to_string(LabelSetup s) {
  switch (s) {
    case LabelSetup::LabelI: return "I";
    case LabelSetup::LabelII: return "II";
    case LabelSetup::LabelIII: return "III";
  }
  return "II";
}

LabelSetup parse_label_setup(std::string_view s) {
  std::string v;
  for (char c : s) v += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (v.starts_with("label")) v.erase(0, 5);
  if (!v.empty() && (v.front() == '_' || v.front() == '-' || v.front() == ' ')) v.erase(0, 1);
  if (v == "i" || v == "1") return LabelSetup::LabelI;
  if (v == "ii" || v == "2") return LabelSetup::LabelII;
  if (v == "iii" || v == "3") return LabelSetup::LabelIII;
  throw InvalidArgument("unknown label setup: " + std::string(s));
}

std::size_t LabeledSet::count(int label) const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [&](const LabeledEntry& e) { return e.label == label; }));
}

std::optional<int> LabeledSet::label_of(std::string_view id) const {
  const auto it = std::lower_bound(entries.begin(), entries.end(), id,
                                   [](const LabeledEntry& e, std::string_view v) { return e.id < v; });
  if (it == entries.end() || it->id != id) return std::nullopt;
  return it->label;
}

std::optional<int> label_for_score(LabelSetup setup, int score) {
  switch (setup) {
    case LabelSetup::LabelI:
      if (score == 1 || score == 2) return kFraud;
      if (score == 4 || score == 5) return kNotFraud;
      return std::nullopt;
    case LabelSetup::LabelII:
    case LabelSetup::LabelIII:
      if (score == 1) return kFraud;
      if (score == 5) return kNotFraud;
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<int> label3_holdout_label(int score) {
  if (score == 2) return kFraud;
  if (score == 4) return kNotFraud;
  return std::nullopt;
}

LabelAssignment apply_label_setup(const Corpus& corpus, const std::map<std::string, AnnotationScore>& scores,
                                  LabelSetup setup) {
  LabelAssignment out;
  for (const auto& c : corpus.campaigns()) {
    const auto it = scores.find(c.id);
    if (it == scores.end()) throw InvalidArgument("no annotation score for campaign " + c.id);
    const int score = it->second.score;
    if (auto label = label_for_score(setup, score)) {
      out.labeled.entries.push_back({c.id, *label});
    } else if (setup == LabelSetup::LabelIII && label3_holdout_label(score)) {
      out.holdout.entries.push_back({c.id, *label3_holdout_label(score)});
    } else {
      out.dropped.push_back(c.id);
    }
  }
  const auto by_id = [](const LabeledEntry& a, const LabeledEntry& b) { return a.id < b.id; };
  std::sort(out.labeled.entries.begin(), out.labeled.entries.end(), by_id);
  std::sort(out.holdout.entries.begin(), out.holdout.entries.end(), by_id);
  std::sort(out.dropped.begin(), out.dropped.end());
  return out;
}

// ---------------------------------------------------------------- kappa

std::string_view landis_koch_band(double kappa) {
  if (kappa < 0) return "poor";
  if (kappa <= 0.20) return "slight";
  if (kappa <= 0.40) return "fair";
  if (kappa <= 0.60) return "moderate";
  if (kappa <= 0.80) return "substantial";
  return "almost perfect";
}

KappaResult cohens_kappa(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size())
    throw InvalidArgument("annotation sequences differ in length: " + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()));
  if (a.empty()) throw InvalidArgument("cohens_kappa needs at least one item");
  const double n = static_cast<double>(a.size());
  std::map<int, std::pair<double, double>> marginals;
  double agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    marginals[a[i]].first += 1;
    marginals[b[i]].second += 1;
    if (a[i] == b[i]) agree += 1;
  }
  KappaResult r;
  r.observed = agree / n;
  for (const auto& [label, counts] : marginals) r.expected += (counts.first / n) * (counts.second / n);
  r.kappa = r.expected >= 1.0 ? 1.0 : (r.observed - r.expected) / (1.0 - r.expected);
  r.band = std::string(landis_koch_band(r.kappa));
  return r;
}

}  // namespace cfraud
