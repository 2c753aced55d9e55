// SPDX-License-Identifier: Apache-2.0
#include "cfraud/providers.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "cfraud/error.hpp"
#include "cfraud/hash.hpp"

namespace cfraud {

namespace {

using nlohmann::json;

std::optional<std::string> env(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

std::filesystem::path cache_path(const std::filesystem::path& dir, std::string_view kind, std::string_view text) {
  return dir / (std::string(kind) + "-" + to_hex(fnv1a(text)) + ".json");
}

std::optional<std::string> read_cache(const HttpEndpoint& ep, std::string_view kind, std::string_view text) {
  if (!ep.cache_dir) return std::nullopt;
  std::ifstream in(cache_path(*ep.cache_dir, kind, text), std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_cache(const HttpEndpoint& ep, std::string_view kind, std::string_view text, const std::string& body) {
  if (!ep.cache_dir) return;
  std::error_code ec;
  std::filesystem::create_directories(*ep.cache_dir, ec);
  const auto target = cache_path(*ep.cache_dir, kind, text);
  auto tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write provider cache " + tmp.string());
    out << body;
  }
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw IoError("cannot write provider cache " + target.string() + ": " + ec.message());
}

/// POSTs {"text": ...} to `<base><path>` and returns the response body.
std::string post(const HttpEndpoint& ep, const std::string& path, std::string_view text) {
  std::string origin = ep.base_url;
  std::string prefix;
  const auto scheme_end = origin.find("://");
  const auto slash = origin.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  if (slash != std::string::npos) {
    prefix = origin.substr(slash);
    origin.resize(slash);
  }
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  httplib::Client client(origin);
  client.set_connection_timeout(ep.timeout_seconds, 0);
  client.set_read_timeout(ep.timeout_seconds, 0);
  httplib::Headers headers;
  if (!ep.credential_env.empty()) {
    if (const auto token = env(ep.credential_env)) headers.emplace("Authorization", "Bearer " + *token);
  }
  const std::string payload = json{{"text", std::string(text)}}.dump();
  const auto res = client.Post(prefix + path, headers, payload, "application/json");
  if (!res) throw ProviderError(ep.base_url + path + ": " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw ProviderError(ep.base_url + path + ": HTTP " + std::to_string(res->status));
  return res->body;
}

json parse_json(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw ProviderError(std::string("malformed provider response: ") + e.what());
  }
}

}  // namespace

std::optional<HttpEndpoint> HttpEndpoint::from_env(const std::string& prefix) {
  const auto url = env(prefix + "_URL");
  if (!url) return std::nullopt;
  HttpEndpoint ep;
  ep.base_url = *url;
  ep.credential_env = env(prefix + "_TOKEN_ENV").value_or(prefix + "_TOKEN");
  if (const auto cache = env(prefix + "_CACHE")) ep.cache_dir = *cache;
  return ep;
}

HttpSentimentProvider::HttpSentimentProvider(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

SentimentToneProfile HttpSentimentProvider::parse_response(const std::string& body) {
  const json j = parse_json(body);
  SentimentToneProfile p;
  try {
    for (std::size_t i = 0; i < kEmotionNames.size(); ++i)
      p.emotions[i] = j.at("emotions").at(std::string(kEmotionNames[i])).get<double>();
    for (std::size_t i = 0; i < kToneNames.size(); ++i)
      p.tones[i] = j.at("tones").at(std::string(kToneNames[i])).get<double>();
  } catch (const json::exception& e) {
    throw ProviderError(std::string("sentiment response missing field: ") + e.what());
  }
  return checked_profile(p);
}

SentimentToneProfile HttpSentimentProvider::analyze(std::string_view text) const {
  std::lock_guard lock(mutex_);
  if (const auto cached = read_cache(endpoint_, "sentiment", text)) return parse_response(*cached);
  const std::string body = post(endpoint_, "/v1/sentiment", text);
  auto profile = parse_response(body);
  write_cache(endpoint_, "sentiment", text, body);
  return profile;
}

HttpEntityTagger::HttpEntityTagger(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

std::vector<EntitySpan> HttpEntityTagger::parse_response(const std::string& body, std::size_t text_size) {
  const json j = parse_json(body);
  std::vector<EntitySpan> spans;
  try {
    for (const auto& e : j.at("entities")) {
      EntitySpan s;
      s.begin = e.at("start").get<std::size_t>();
      s.end = e.at("end").get<std::size_t>();
      const auto label = e.at("label").get<std::string>();
      s.type = entity_type_index(label);
      if (s.type < 0) throw ProviderError("unknown entity label " + label);
      if (s.begin >= s.end || s.end > text_size) throw ProviderError("entity offsets out of range");
      spans.push_back(s);
    }
  } catch (const json::exception& e) {
    throw ProviderError(std::string("entity response malformed: ") + e.what());
  }
  return spans;
}

std::vector<EntitySpan> HttpEntityTagger::tag(std::string_view text) const {
  std::lock_guard lock(mutex_);
  if (const auto cached = read_cache(endpoint_, "entities", text)) return parse_response(*cached, text.size());
  const std::string body = post(endpoint_, "/v1/entities", text);
  auto spans = parse_response(body, text.size());
  write_cache(endpoint_, "entities", text, body);
  return spans;
}

}  // namespace cfraud
