// SPDX-License-Identifier: Apache-2.0
#include "cfraud/features.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>
#include <unordered_set>

#include "cfraud/csv.hpp"
#include "cfraud/error.hpp"
#include "cfraud/hash.hpp"

namespace cfraud {

std::uint64_t schema_hash(const std::vector<std::string>& names) {
  Fnv1a h;
  for (const auto& n : names) h.update(n).update(std::string_view("\n", 1));
  return h.digest();
}

FeatureSchema::FeatureSchema(std::vector<std::string> names) : names_(std::move(names)) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(names_.size());
  for (const auto& n : names_)
    if (!seen.insert(n).second) throw InvalidArgument("duplicate feature name: " + n);
  hash_ = schema_hash(names_);
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

SchemaPtr make_schema(std::vector<std::string> names) {
  return std::make_shared<const FeatureSchema>(std::move(names));
}

double FeatureVector::operator[](std::string_view name) const {
  const auto idx = schema ? schema->index_of(name) : std::nullopt;
  if (!idx) throw InvalidArgument("no feature named " + std::string(name));
  return values[*idx];
}

FeatureMatrix::FeatureMatrix(SchemaPtr schema, std::vector<std::string> row_ids)
    : schema_(std::move(schema)), row_ids_(std::move(row_ids)) {
  data_.assign(rows() * cols(), 0.0);
}

FeatureMatrix::FeatureMatrix(SchemaPtr schema, std::vector<std::string> row_ids, std::vector<double> data)
    : schema_(std::move(schema)), row_ids_(std::move(row_ids)), data_(std::move(data)) {
  if (data_.size() != rows() * cols())
    throw DimensionError("matrix data has " + std::to_string(data_.size()) + " values, expected " +
                         std::to_string(rows() * cols()));
}

std::vector<double> FeatureMatrix::column(std::size_t c) const {
  std::vector<double> out(rows());
  const std::size_t n = cols();
  for (std::size_t r = 0; r < rows(); ++r) out[r] = data_[r * n + c];
  return out;
}

FeatureVector FeatureMatrix::vector_at(std::size_t r) const {
  const auto v = row(r);
  return {schema_, std::vector<double>(v.begin(), v.end())};
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  std::vector<double> data;
  data.reserve(rows.size() * cols());
  for (auto r : rows) {
    ids.push_back(row_ids_.at(r));
    const auto v = row(r);
    data.insert(data.end(), v.begin(), v.end());
  }
  return FeatureMatrix(schema_, std::move(ids), std::move(data));
}

FeatureMatrix FeatureMatrix::select_columns(std::span<const std::size_t> cols) const {
  std::vector<std::string> names;
  names.reserve(cols.size());
  for (auto c : cols) names.push_back(schema_->name(c));
  std::vector<double> data;
  data.reserve(rows() * cols.size());
  for (std::size_t r = 0; r < rows(); ++r) {
    const auto v = row(r);
    for (auto c : cols) data.push_back(v[c]);
  }
  return FeatureMatrix(make_schema(std::move(names)), row_ids_, std::move(data));
}

FeatureMatrix FeatureMatrix::hstack(const FeatureMatrix& left, const FeatureMatrix& right) {
  if (left.row_ids_ != right.row_ids_) throw InvalidArgument("hstack: row ids differ");
  std::vector<std::string> names = left.schema_->names();
  names.insert(names.end(), right.schema_->names().begin(), right.schema_->names().end());
  std::vector<double> data;
  data.reserve(left.rows() * (left.cols() + right.cols()));
  for (std::size_t r = 0; r < left.rows(); ++r) {
    const auto a = left.row(r);
    const auto b = right.row(r);
    data.insert(data.end(), a.begin(), a.end());
    data.insert(data.end(), b.begin(), b.end());
  }
  return FeatureMatrix(make_schema(std::move(names)), left.row_ids_, std::move(data));
}

FeatureMatrix FeatureMatrix::from_vectors(std::span<const FeatureVector> vectors, std::vector<std::string> row_ids) {
  if (vectors.size() != row_ids.size()) throw InvalidArgument("from_vectors: row id count mismatch");
  if (vectors.empty()) return FeatureMatrix(make_schema({}), {});
  const SchemaPtr schema = vectors.front().schema;
  std::vector<double> data;
  data.reserve(vectors.size() * schema->size());
  for (const auto& v : vectors) {
    if (v.schema != schema && !(*v.schema == *schema)) throw SchemaError("from_vectors: mixed schemas");
    data.insert(data.end(), v.values.begin(), v.values.end());
  }
  return FeatureMatrix(schema, std::move(row_ids), std::move(data));
}

void write_feature_csv(std::ostream& out, const FeatureMatrix& m) {
  CsvWriter w(out);
  std::vector<std::string> header{"id"};
  header.insert(header.end(), m.schema()->names().begin(), m.schema()->names().end());
  w.row(header);
  std::vector<std::string> fields;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    fields.clear();
    fields.push_back(m.row_ids()[r]);
    for (double v : m.row(r)) fields.push_back(format_number(v));
    w.row(fields);
  }
}

// ---------------------------------------------------------------- groups

namespace {

struct GroupInfo {
  FeatureGroup group;
  std::string_view name;
  std::string_view prefix;
  bool text;
};

constexpr GroupInfo kGroups[] = {
    {FeatureGroup::TFIDF, "TFIDF", prefix::kTfidf, true},
    {FeatureGroup::Sentiment, "Sentiment", prefix::kSentiment, true},
    {FeatureGroup::NER, "NER", prefix::kNer, true},
    {FeatureGroup::WordShape, "WordShape", prefix::kForm, true},
    {FeatureGroup::Readability, "Readability", prefix::kReadability, true},
    {FeatureGroup::Appearance, "Appearance", prefix::kAppearance, false},
    {FeatureGroup::Objects, "Objects", prefix::kSemantic, false},
    {FeatureGroup::ImageEmotion, "ImageEmotion", prefix::kImageEmotion, false},
    {FeatureGroup::Faces, "Faces", prefix::kFaces, false},
};

const GroupInfo& info(FeatureGroup g) {
  for (const auto& i : kGroups)
    if (i.group == g) return i;
  throw InvalidArgument("unknown feature group");
}

}  // namespace

std::string_view to_string(FeatureGroup g) { return info(g).name; }
std::string_view group_prefix(FeatureGroup g) { return info(g).prefix; }
bool is_text_group(FeatureGroup g) { return info(g).text; }

FeatureGroup parse_feature_group(std::string_view name) {
  std::string lowered;
  for (char c : name)
    if (c != '_' && c != '-') lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (const auto& i : kGroups) {
    std::string n;
    for (char c : i.name) n += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (n == lowered) return i.group;
  }
  if (lowered == "shape" || lowered == "form") return FeatureGroup::WordShape;
  if (lowered == "semantic") return FeatureGroup::Objects;
  if (lowered == "emotion") return FeatureGroup::ImageEmotion;
  throw InvalidArgument("unknown feature group: " + std::string(name));
}

std::optional<FeatureGroup> group_of(std::string_view feature_name) {
  for (const auto& i : kGroups)
    if (feature_name.starts_with(i.prefix)) return i.group;
  return std::nullopt;
}

}  // namespace cfraud
