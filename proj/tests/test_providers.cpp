// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <atomic>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "cfraud/error.hpp"
#include "cfraud/providers.hpp"

using namespace cfraud;

namespace {

const char* kSentimentBody =
    R"({"emotions":{"sadness":0.1,"joy":0.2,"fear":0.3,"disgust":0.4,"anger":0.5},)"
    R"("tones":{"frustration":0,"satisfaction":0.1,"excitement":0.2,"politeness":0.3,)"
    R"("impoliteness":0.4,"sadness":0.5,"sympathy":0.6}})";

/// Local server answering both endpoints; records hits and the last auth header.
struct FakeService {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> hits{0};
  std::string last_auth;
  int status = 200;

  FakeService() {
    server.Post("/api/v1/sentiment", [this](const httplib::Request& req, httplib::Response& res) {
      ++hits;
      last_auth = req.get_header_value("Authorization");
      res.status = status;
      res.set_content(kSentimentBody, "application/json");
    });
    server.Post("/api/v1/entities", [this](const httplib::Request& req, httplib::Response& res) {
      ++hits;
      const auto text = nlohmann::json::parse(req.body).at("text").get<std::string>();
      nlohmann::json out = {{"entities", nlohmann::json::array()}};
      if (text.rfind("John", 0) == 0) out["entities"].push_back({{"start", 0}, {"end", 4}, {"label", "PERSON"}});
      res.status = status;
      res.set_content(out.dump(), "application/json");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~FakeService() {
    server.stop();
    thread.join();
  }

  HttpEndpoint endpoint() const {
    HttpEndpoint ep;
    ep.base_url = "http://127.0.0.1:" + std::to_string(port) + "/api";
    ep.timeout_seconds = 5;
    return ep;
  }
};

}  // namespace

TEST_CASE("sentiment response parsing") {
  const auto p = HttpSentimentProvider::parse_response(kSentimentBody);
  CHECK(p.emotions[4] == 0.5);
  CHECK(p.tones[6] == 0.6);
  CHECK_THROWS_AS(HttpSentimentProvider::parse_response("{"), ProviderError);
  CHECK_THROWS_AS(HttpSentimentProvider::parse_response(R"({"emotions":{}})"), ProviderError);
  std::string out_of_range = kSentimentBody;
  out_of_range.replace(out_of_range.find("0.5"), 3, "1.5");
  CHECK_THROWS_AS(HttpSentimentProvider::parse_response(out_of_range), ProviderError);
}

TEST_CASE("entity response parsing") {
  const auto spans = HttpEntityTagger::parse_response(R"({"entities":[{"start":0,"end":4,"label":"GPE"}]})", 10);
  REQUIRE(spans.size() == 1);
  CHECK(spans[0] == EntitySpan{0, 4, 4});
  CHECK_THROWS_AS(HttpEntityTagger::parse_response(R"({"entities":[{"start":0,"end":40,"label":"GPE"}]})", 10),
                  ProviderError);
  CHECK_THROWS_AS(HttpEntityTagger::parse_response(R"({"entities":[{"start":0,"end":4,"label":"CITY"}]})", 10),
                  ProviderError);
  CHECK_THROWS_AS(HttpEntityTagger::parse_response(R"({"spans":[]})", 10), ProviderError);
}

TEST_CASE("HTTP adapters call the service, send the token and cache responses") {
  FakeService svc;
  const auto cache = std::filesystem::temp_directory_path() / ("cfraud-provider-cache-" + std::to_string(svc.port));
  std::filesystem::remove_all(cache);
  ::setenv("CFRAUD_TEST_PROVIDER_TOKEN", "s3cret", 1);

  auto ep = svc.endpoint();
  ep.credential_env = "CFRAUD_TEST_PROVIDER_TOKEN";
  ep.cache_dir = cache;
  const HttpSentimentProvider sentiment(ep);
  const auto p = sentiment.analyze("some text");
  CHECK(p.emotions[0] == 0.1);
  CHECK(svc.hits == 1);
  CHECK(svc.last_auth == "Bearer s3cret");
  CHECK(sentiment.analyze("some text") == p);
  CHECK(svc.hits == 1);
  sentiment.analyze("other text");
  CHECK(svc.hits == 2);

  const HttpEntityTagger tagger(ep);
  const auto counts = ner_counts("John walked", tagger);
  CHECK(counts[0] == 1);
  CHECK(ner_counts("nobody", tagger)[0] == 0);
  std::filesystem::remove_all(cache);
}

TEST_CASE("HTTP failures surface as provider errors") {
  FakeService svc;
  svc.status = 503;
  const HttpSentimentProvider sentiment(svc.endpoint());
  CHECK_THROWS_AS(sentiment.analyze("x"), ProviderError);

  auto dead = svc.endpoint();
  dead.base_url = "http://127.0.0.1:1";
  dead.timeout_seconds = 1;
  CHECK_THROWS_AS(HttpEntityTagger(dead).tag("x"), ProviderError);
}

TEST_CASE("endpoint configuration from the environment") {
  ::unsetenv("CFRAUD_TEST_EP_URL");
  CHECK_FALSE(HttpEndpoint::from_env("CFRAUD_TEST_EP"));
  ::setenv("CFRAUD_TEST_EP_URL", "http://h:1", 1);
  ::setenv("CFRAUD_TEST_EP_CACHE", "/tmp/c", 1);
  const auto ep = HttpEndpoint::from_env("CFRAUD_TEST_EP");
  REQUIRE(ep);
  CHECK(ep->base_url == "http://h:1");
  CHECK(ep->credential_env == "CFRAUD_TEST_EP_TOKEN");
  CHECK(ep->cache_dir == std::filesystem::path("/tmp/c"));
}
