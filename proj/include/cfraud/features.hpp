// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cfraud {

/// Ordered, unique feature names. Shared between vectors, matrices and
/// fitted models; `hash()` identifies the layout.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  /// Throws InvalidArgument on duplicate names.
  explicit FeatureSchema(std::vector<std::string> names);

  const std::vector<std::string>& names() const noexcept { return names_; }
  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  std::uint64_t hash() const noexcept { return hash_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  bool operator==(const FeatureSchema& o) const { return hash_ == o.hash_ && names_ == o.names_; }

 private:
  std::vector<std::string> names_;
  std::uint64_t hash_ = 0;
};

using SchemaPtr = std::shared_ptr<const FeatureSchema>;

SchemaPtr make_schema(std::vector<std::string> names);
std::uint64_t schema_hash(const std::vector<std::string>& names);

struct FeatureVector {
  SchemaPtr schema;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  /// Throws InvalidArgument when `name` is not in the schema.
  double operator[](std::string_view name) const;
};

/// Row-major dense matrix with one row per campaign.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(SchemaPtr schema, std::vector<std::string> row_ids);
  FeatureMatrix(SchemaPtr schema, std::vector<std::string> row_ids, std::vector<double> data);

  const SchemaPtr& schema() const noexcept { return schema_; }
  std::size_t rows() const noexcept { return row_ids_.size(); }
  std::size_t cols() const noexcept { return schema_ ? schema_->size() : 0; }
  const std::vector<std::string>& row_ids() const noexcept { return row_ids_; }

  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols(), cols()}; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols(), cols()}; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  const std::vector<double>& data() const noexcept { return data_; }

  std::vector<double> column(std::size_t c) const;
  FeatureVector vector_at(std::size_t r) const;

  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;
  FeatureMatrix select_columns(std::span<const std::size_t> cols) const;
  /// Column-wise concatenation; row ids must agree.
  static FeatureMatrix hstack(const FeatureMatrix& left, const FeatureMatrix& right);

  /// Builds a matrix from vectors sharing one schema.
  static FeatureMatrix from_vectors(std::span<const FeatureVector> vectors,
                                    std::vector<std::string> row_ids);

 private:
  SchemaPtr schema_;
  std::vector<std::string> row_ids_;
  std::vector<double> data_;
};

/// CSV with header `id,<feature names...>`.
void write_feature_csv(std::ostream& out, const FeatureMatrix& m);

// ---------------------------------------------------------------- groups

enum class FeatureGroup {
  TFIDF,
  Sentiment,
  NER,
  WordShape,
  Readability,
  Appearance,
  Objects,
  ImageEmotion,
  Faces,
};

inline constexpr FeatureGroup kAllFeatureGroups[] = {
    FeatureGroup::TFIDF,      FeatureGroup::Sentiment,  FeatureGroup::NER,
    FeatureGroup::WordShape,  FeatureGroup::Readability, FeatureGroup::Appearance,
    FeatureGroup::Objects,    FeatureGroup::ImageEmotion, FeatureGroup::Faces,
};

// Feature-name prefixes. Each prefix maps to exactly one group.
namespace prefix {
inline constexpr std::string_view kTfidf = "tfidf:";
inline constexpr std::string_view kSentiment = "sent:";
inline constexpr std::string_view kNer = "ner:";
inline constexpr std::string_view kForm = "form:";
inline constexpr std::string_view kReadability = "read:";
inline constexpr std::string_view kAppearance = "img.appearance:";
inline constexpr std::string_view kSemantic = "img.semantic:";
inline constexpr std::string_view kImageEmotion = "img.emotion:";
inline constexpr std::string_view kFaces = "img.faces:";
}  // namespace prefix

std::string_view to_string(FeatureGroup g);
/// Throws InvalidArgument on unknown names. Case-insensitive.
FeatureGroup parse_feature_group(std::string_view name);
std::string_view group_prefix(FeatureGroup g);
/// Group owning `feature_name`, or nullopt for names outside every family.
std::optional<FeatureGroup> group_of(std::string_view feature_name);
bool is_text_group(FeatureGroup g);

}  // namespace cfraud
