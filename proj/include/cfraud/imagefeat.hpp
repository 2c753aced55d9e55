// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cfraud/corpus.hpp"
#include "cfraud/features.hpp"

namespace cfraud {

inline constexpr std::size_t kImageEmotionDims = 8;
inline constexpr std::size_t kAppearanceDims = 2048;
inline constexpr std::size_t kSemanticDims = 1000;
inline constexpr std::size_t kImageVectorDims = kImageEmotionDims + kAppearanceDims + kSemanticDims + 1;
static_assert(kImageVectorDims == 3057);

inline constexpr std::array<std::string_view, kImageEmotionDims> kImageEmotionNames = {
    "amusement", "anger", "awe", "contentment", "disgust", "excitement", "fear", "sadness"};

/// One image's sidecar. Values are held at 32-bit precision, as serialized.
struct ImageFeatures {
  std::vector<float> emotion;     // 8 logits
  std::vector<float> appearance;  // 2048
  std::vector<float> semantic;    // 1000 logits
  int faces = 0;
  std::string extractor_version;

  bool operator==(const ImageFeatures&) const = default;
};

/// Throws DimensionError naming the offending block, or on non-finite values
/// and negative face counts.
void validate(const ImageFeatures& f);

/// `<image-stem>.feat.json` for an image reference such as "img/a1.jpg".
std::string sidecar_name(std::string_view image_ref);

ImageFeatures parse_sidecar(std::string_view json_text, const std::string& origin = "sidecar");
ImageFeatures load_sidecar(const std::filesystem::path& path);
/// Canonical serialization: keys emotion, appearance, semantic, faces,
/// extractor_version; floats in shortest 32-bit round-trip form.
std::string serialize_sidecar(const ImageFeatures& f);
/// Writes atomically (temp file + rename). Returns the written path.
std::filesystem::path write_sidecar(const ImageFeatures& f, const std::filesystem::path& dir,
                                    std::string_view image_ref);

enum class ImageAggregation { Mean, PrimaryOnly };

struct CampaignImageVector {
  std::vector<double> values;  // 3057 when present, empty when missing
  std::size_t image_count = 0;
  bool missing = true;
};

CampaignImageVector aggregate_campaign_images(std::span<const ImageFeatures> images,
                                              ImageAggregation mode = ImageAggregation::Mean);

/// Stable names for the 3057 dims: img.emotion:<name> | img.appearance:NNNN |
/// img.semantic:NNNN | img.faces:mean.
const std::vector<std::string>& image_feature_names();
SchemaPtr image_schema();

/// Loads every referenced sidecar from `sidecar_dir` and aggregates. Throws
/// IoError listing every missing sidecar path.
CampaignImageVector assemble_image_features(const Campaign& campaign,
                                            const std::filesystem::path& sidecar_dir,
                                            ImageAggregation mode = ImageAggregation::Mean);

}  // namespace cfraud
