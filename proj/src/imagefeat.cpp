// SPDX-License-Identifier: Apache-2.0
#include "cfraud/imagefeat.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cfraud/error.hpp"

namespace cfraud {

namespace {

using nlohmann::json;

void check_block(const std::vector<float>& v, std::size_t expected, std::string_view block) {
  if (v.size() != expected)
    throw DimensionError(std::string(block) + " block has " + std::to_string(v.size()) + " values, expected " +
                         std::to_string(expected));
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i])) throw DimensionError(std::string(block) + "[" + std::to_string(i) + "] is not finite");
}

std::vector<float> read_block(const json& j, const char* key, const std::string& origin) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_array()) throw ParseError(origin + ": missing array '" + key + "'");
  std::vector<float> out;
  out.reserve(it->size());
  for (const auto& v : *it) {
    if (!v.is_number()) throw ParseError(origin + ": non-numeric value in '" + key + "'");
    out.push_back(static_cast<float>(v.get<double>()));
  }
  return out;
}

void append_block(std::string& out, const std::vector<float>& v) {
  out += '[';
  char buf[32];
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    const auto r = std::to_chars(buf, buf + sizeof buf, v[i]);
    out.append(buf, r.ptr);
  }
  out += ']';
}

}  // namespace

void validate(const ImageFeatures& f) {
  check_block(f.emotion, kImageEmotionDims, "emotion");
  check_block(f.appearance, kAppearanceDims, "appearance");
  check_block(f.semantic, kSemanticDims, "semantic");
  if (f.faces < 0) throw DimensionError("faces count is negative");
}

std::string sidecar_name(std::string_view image_ref) {
  const std::filesystem::path p{std::string(image_ref)};
  auto out = p.parent_path() / (p.stem().string() + ".feat.json");
  return out.generic_string();
}

ImageFeatures parse_sidecar(std::string_view json_text, const std::string& origin) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
  if (!j.is_object()) throw ParseError(origin + ": sidecar must be a JSON object");
  ImageFeatures f;
  f.emotion = read_block(j, "emotion", origin);
  f.appearance = read_block(j, "appearance", origin);
  f.semantic = read_block(j, "semantic", origin);
  const auto faces = j.find("faces");
  if (faces == j.end() || !faces->is_number_integer()) throw ParseError(origin + ": missing integer 'faces'");
  f.faces = faces->get<int>();
  if (const auto v = j.find("extractor_version"); v != j.end() && v->is_string()) f.extractor_version = v->get<std::string>();
  try {
    validate(f);
  } catch (const DimensionError& e) {
    throw DimensionError(origin + ": " + e.what());
  }
  return f;
}

ImageFeatures load_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open sidecar " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_sidecar(ss.str(), path.string());
}

std::string serialize_sidecar(const ImageFeatures& f) {
  validate(f);
  std::string out = "{\"emotion\":";
  append_block(out, f.emotion);
  out += ",\"appearance\":";
  append_block(out, f.appearance);
  out += ",\"semantic\":";
  append_block(out, f.semantic);
  out += ",\"faces\":" + std::to_string(f.faces);
  out += ",\"extractor_version\":" + json(f.extractor_version).dump() + "}\n";
  return out;
}

std::filesystem::path write_sidecar(const ImageFeatures& f, const std::filesystem::path& dir,
                                    std::string_view image_ref) {
  const auto target = dir / sidecar_name(image_ref);
  std::filesystem::create_directories(target.parent_path());
  const std::string body = serialize_sidecar(f);
  auto tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out || !(out << body)) throw IoError("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
  return target;
}

CampaignImageVector aggregate_campaign_images(std::span<const ImageFeatures> images, ImageAggregation mode) {
  CampaignImageVector out;
  if (images.empty()) return out;
  for (const auto& img : images) validate(img);
  if (mode == ImageAggregation::PrimaryOnly) images = images.first(1);

  out.missing = false;
  out.image_count = images.size();
  out.values.resize(kImageVectorDims);
  const double k = static_cast<double>(images.size());
  std::vector<double> column(images.size());
  // Sorting each coordinate before summing makes the mean independent of image order.
  const auto mean_of = [&](auto&& get) {
    for (std::size_t i = 0; i < images.size(); ++i) column[i] = get(images[i]);
    std::sort(column.begin(), column.end());
    double s = 0;
    for (double v : column) s += v;
    return s / k;
  };
  std::size_t o = 0;
  for (std::size_t d = 0; d < kImageEmotionDims; ++d)
    out.values[o++] = mean_of([d](const ImageFeatures& f) { return static_cast<double>(f.emotion[d]); });
  for (std::size_t d = 0; d < kAppearanceDims; ++d)
    out.values[o++] = mean_of([d](const ImageFeatures& f) { return static_cast<double>(f.appearance[d]); });
  for (std::size_t d = 0; d < kSemanticDims; ++d)
    out.values[o++] = mean_of([d](const ImageFeatures& f) { return static_cast<double>(f.semantic[d]); });
  out.values[o++] = mean_of([](const ImageFeatures& f) { return static_cast<double>(f.faces); });
  return out;
}

const std::vector<std::string>& image_feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    n.reserve(kImageVectorDims);
    char buf[8];
    const auto indexed = [&](std::string_view prefix, std::size_t i) {
      std::snprintf(buf, sizeof buf, "%04zu", i);
      return std::string(prefix) + buf;
    };
    for (auto e : kImageEmotionNames) n.push_back(std::string(prefix::kImageEmotion) + std::string(e));
    for (std::size_t i = 0; i < kAppearanceDims; ++i) n.push_back(indexed(prefix::kAppearance, i));
    for (std::size_t i = 0; i < kSemanticDims; ++i) n.push_back(indexed(prefix::kSemantic, i));
    n.push_back(std::string(prefix::kFaces) + "mean");
    if (n.size() != kImageVectorDims) throw DimensionError("image layout mismatch");
    return n;
  }();
  return names;
}

SchemaPtr image_schema() {
  static const SchemaPtr schema = make_schema(image_feature_names());
  return schema;
}

CampaignImageVector assemble_image_features(const Campaign& campaign, const std::filesystem::path& sidecar_dir,
                                            ImageAggregation mode) {
  std::vector<ImageFeatures> images;
  std::vector<std::string> missing;
  for (const auto& ref : campaign.images) {
    const auto path = sidecar_dir / sidecar_name(ref);
    if (!std::filesystem::exists(path)) {
      missing.push_back(path.string());
      continue;
    }
    images.push_back(load_sidecar(path));
  }
  if (!missing.empty()) {
    std::string msg = "campaign " + campaign.id + ": missing sidecar";
    for (const auto& m : missing) msg += " " + m;
    throw IoError(msg);
  }
  return aggregate_campaign_images(images, mode);
}

}  // namespace cfraud
