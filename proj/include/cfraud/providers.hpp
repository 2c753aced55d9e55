// SPDX-License-Identifier: Apache-2.0
#pragma once

// HTTP adapters for external sentiment/tone and entity services.
//
// Wire format (JSON over HTTP POST, `Authorization: Bearer <token>` when the
// credential variable is set):
//
//   POST <base>/v1/sentiment   {"text": "..."}
//     -> {"emotions": {"sadness": 0.1, ...5 keys},
//         "tones": {"frustration": 0.0, ...7 keys}}
//
//   POST <base>/v1/entities    {"text": "..."}
//     -> {"entities": [{"start": 0, "end": 4, "label": "PERSON"}, ...]}
//
// Offsets are UTF-8 byte offsets. Responses are cached on disk under
// `cache_dir` as `<kind>-<fnv1a(text)>.json` so reruns are deterministic and
// offline once warm.

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

#include "cfraud/textfeat.hpp"

namespace cfraud {

struct HttpEndpoint {
  std::string base_url;                 // e.g. "http://127.0.0.1:8080"
  std::string credential_env;           // env var holding the bearer token; may be empty
  std::optional<std::filesystem::path> cache_dir;
  int timeout_seconds = 30;

  /// Reads `<prefix>_URL`, `<prefix>_TOKEN_ENV` (default `<prefix>_TOKEN`) and
  /// `<prefix>_CACHE`. Returns nullopt when the URL variable is unset.
  static std::optional<HttpEndpoint> from_env(const std::string& prefix);
};

/// Thread safe: requests are serialized per instance.
class HttpSentimentProvider final : public SentimentProvider {
 public:
  explicit HttpSentimentProvider(HttpEndpoint endpoint);
  SentimentToneProfile analyze(std::string_view text) const override;
  std::string name() const override { return "http:" + endpoint_.base_url; }

  static SentimentToneProfile parse_response(const std::string& body);

 private:
  HttpEndpoint endpoint_;
  mutable std::mutex mutex_;
};

class HttpEntityTagger final : public EntityTagger {
 public:
  explicit HttpEntityTagger(HttpEndpoint endpoint);
  std::vector<EntitySpan> tag(std::string_view text) const override;
  std::string name() const override { return "http:" + endpoint_.base_url; }

  static std::vector<EntitySpan> parse_response(const std::string& body, std::size_t text_size);

 private:
  HttpEndpoint endpoint_;
  mutable std::mutex mutex_;
};

}  // namespace cfraud
