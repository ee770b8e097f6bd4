// Copyright 2026 The rttqe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rttqe/providers.h"

#include <stdlib.h>

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "absl/strings/str_cat.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "httplib.h"
#include "json.hpp"
#include "test_util.h"

namespace rttqe::providers {
namespace {

using json = nlohmann::json;
using ::testing::ElementsAre;
using ::testing::HasSubstr;

// A local stand-in for a translation/embedding service. Handlers run on the
// server's thread pool; the counters are safe to read from the test.
class MockServer {
 public:
  using Handler = std::function<void(const json& body, httplib::Response& res)>;

  MockServer() {
    server_.Post(R"(/v1/(translate|embed))", [this](const httplib::Request& req,
                                                    httplib::Response& res) {
      const int now = ++in_flight_;
      int seen = max_in_flight_.load();
      while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
      }
      ++hits_;
      json body = json::parse(req.body, nullptr, false);
      {
        std::lock_guard lock(mu_);
        bodies_.push_back(body);
        paths_.push_back(req.path);
        authorization_ = req.get_header_value("Authorization");
      }
      if (delay_ms_ > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_));
      handler_(body, res);
      --in_flight_;
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockServer() {
    server_.stop();
    thread_.join();
  }

  void set_handler(Handler h) { handler_ = std::move(h); }
  void set_delay_ms(int ms) { delay_ms_ = ms; }
  std::string endpoint() const { return absl::StrCat("http://127.0.0.1:", port_, "/v1/"); }
  int hits() const { return hits_.load(); }
  int max_in_flight() const { return max_in_flight_.load(); }
  std::vector<json> bodies() {
    std::lock_guard lock(mu_);
    return bodies_;
  }
  std::vector<std::string> paths() {
    std::lock_guard lock(mu_);
    return paths_;
  }
  std::string authorization() {
    std::lock_guard lock(mu_);
    return authorization_;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  Handler handler_ = [](const json&, httplib::Response& res) { res.status = 500; };
  std::atomic<int> delay_ms_{0};
  std::atomic<int> hits_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_{0};
  std::mutex mu_;
  std::vector<json> bodies_;
  std::vector<std::string> paths_;
  std::string authorization_;
};

void UppercaseTranslations(const json& body, httplib::Response& res) {
  json out = json::array();
  for (const auto& t : body["texts"]) {
    std::string s = t.get<std::string>();
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    out.push_back(s);
  }
  res.set_content(json{{"translations", out}}.dump(), "application/json");
}

// Sentence vectors of dimension 2 derived from the text length.
void LengthEmbeddings(const json& body, httplib::Response& res) {
  json items = json::array();
  for (const auto& t : body["texts"]) {
    const double n = static_cast<double>(t.get<std::string>().size());
    if (body["level"] == "sentence") {
      items.push_back({{"sentence_vector", {n, 1.0}}});
    } else {
      items.push_back({{"wordpieces", {t}}, {"token_vectors", {{n, 1.0}}}});
    }
  }
  res.set_content(json{{"dim", 2}, {"items", items}}.dump(), "application/json");
}

ProviderConfig HttpConfig(const MockServer& server, ProviderKind kind) {
  ProviderConfig c;
  c.provider_id = "mock";
  c.kind = kind;
  c.type = "http";
  c.endpoint = server.endpoint();
  c.rate_limit = 1000;
  c.timeout = 5;
  c.max_retries = 3;
  c.initial_backoff = 0.001;
  return c;
}

std::unique_ptr<TranslationService> Translator(const ProviderConfig& c,
                                               std::shared_ptr<DiskCache> cache = nullptr) {
  auto s = MakeTranslationService(c, std::move(cache), /*offline=*/false);
  EXPECT_TRUE(s.ok()) << s.status();
  return std::move(*s);
}

TEST(HttpTranslationTest, SpeaksTranslateProtocol) {
  MockServer server;
  server.set_handler(UppercaseTranslations);
  auto svc = Translator(HttpConfig(server, ProviderKind::kTranslation));
  const std::vector<std::string> texts = {"hallo", "welt"};
  auto out = svc->TranslateBatch(texts, "de", "en");
  ASSERT_TRUE(out.ok()) << out.status();
  EXPECT_THAT(*out, ElementsAre("HALLO", "WELT"));
  ASSERT_EQ(server.bodies().size(), 1u);
  const json body = server.bodies()[0];
  EXPECT_EQ(body["texts"], json({"hallo", "welt"}));
  EXPECT_EQ(body["src"], "de");
  EXPECT_EQ(body["tgt"], "en");
  EXPECT_EQ(server.paths()[0], "/v1/translate");
}

TEST(HttpTranslationTest, SendsBearerTokenFromEnvironment) {
  MockServer server;
  server.set_handler(UppercaseTranslations);
  ProviderConfig c = HttpConfig(server, ProviderKind::kTranslation);
  ASSERT_EQ(CredentialVariable(c), "RTTQE_MOCK_TOKEN");
  ::setenv("RTTQE_MOCK_TOKEN", "s3cret", 1);
  const std::vector<std::string> texts = {"x"};
  ASSERT_TRUE(Translator(c)->TranslateBatch(texts, "de", "en").ok());
  EXPECT_EQ(server.authorization(), "Bearer s3cret");
  ::unsetenv("RTTQE_MOCK_TOKEN");

  c.auth = "CUSTOM_BT_KEY";
  ::setenv("CUSTOM_BT_KEY", "k2", 1);
  ASSERT_TRUE(Translator(c)->TranslateBatch(texts, "de", "en").ok());
  EXPECT_EQ(server.authorization(), "Bearer k2");
  ::unsetenv("CUSTOM_BT_KEY");
}

TEST(HttpTranslationTest, RetriesAfterTooManyRequests) {
  MockServer server;
  std::atomic<int> calls{0};
  server.set_handler([&](const json& body, httplib::Response& res) {
    if (calls++ == 0) {
      res.status = 429;
      res.set_header("Retry-After", "0.2");
      return;
    }
    UppercaseTranslations(body, res);
  });
  auto svc = Translator(HttpConfig(server, ProviderKind::kTranslation));
  const std::vector<std::string> texts = {"a"};
  const auto start = std::chrono::steady_clock::now();
  auto out = svc->TranslateBatch(texts, "de", "en");
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ASSERT_TRUE(out.ok()) << out.status();
  EXPECT_EQ(server.hits(), 2);
  EXPECT_GE(elapsed, 0.2);
  EXPECT_EQ(svc->stats().requests, 1);
}

TEST(HttpTranslationTest, GivesUpAfterMaxRetriesOnServerErrors) {
  MockServer server;
  server.set_handler([](const json&, httplib::Response& res) { res.status = 503; });
  ProviderConfig c = HttpConfig(server, ProviderKind::kTranslation);
  c.max_retries = 2;
  const std::vector<std::string> texts = {"a"};
  auto out = Translator(c)->TranslateBatch(texts, "de", "en");
  ASSERT_FALSE(out.ok());
  EXPECT_EQ(out.status().code(), absl::StatusCode::kUnavailable);
  EXPECT_THAT(out.status().message(), HasSubstr("3 attempts"));
  EXPECT_EQ(server.hits(), 3);
}

TEST(HttpTranslationTest, ClientErrorsAreNotRetried) {
  MockServer server;
  server.set_handler([](const json&, httplib::Response& res) {
    res.status = 400;
    res.set_content("bad language pair", "text/plain");
  });
  const std::vector<std::string> texts = {"a"};
  auto out = Translator(HttpConfig(server, ProviderKind::kTranslation))
                 ->TranslateBatch(texts, "de", "en");
  ASSERT_FALSE(out.ok());
  EXPECT_EQ(out.status().code(), absl::StatusCode::kUnavailable);
  EXPECT_THAT(out.status().message(), HasSubstr("HTTP 400"));
  EXPECT_EQ(server.hits(), 1);
}

TEST(HttpTranslationTest, MalformedResponsesAreDataLoss) {
  MockServer server;
  server.set_handler([](const json&, httplib::Response& res) {
    res.set_content("{not json", "application/json");
  });
  const std::vector<std::string> texts = {"a"};
  auto svc = Translator(HttpConfig(server, ProviderKind::kTranslation));
  EXPECT_EQ(svc->TranslateBatch(texts, "de", "en").status().code(),
            absl::StatusCode::kDataLoss);

  server.set_handler([](const json&, httplib::Response& res) {
    res.set_content(R"({"translations": ["one", "two"]})", "application/json");
  });
  EXPECT_EQ(svc->TranslateBatch(texts, "de", "en").status().code(),
            absl::StatusCode::kDataLoss);
}

TEST(HttpTranslationTest, TransportErrorIsUnavailable) {
  ProviderConfig c;
  c.provider_id = "down";
  c.type = "http";
  c.endpoint = "http://127.0.0.1:1";
  c.max_retries = 1;
  c.initial_backoff = 0.001;
  c.rate_limit = 1000;
  c.timeout = 1;
  const std::vector<std::string> texts = {"a"};
  auto out = Translator(c)->TranslateBatch(texts, "de", "en");
  EXPECT_EQ(out.status().code(), absl::StatusCode::kUnavailable);
  EXPECT_THAT(out.status().message(), HasSubstr("transport error"));
}

TEST(HttpTranslationTest, RateLimitSpacesRequests) {
  MockServer server;
  server.set_handler(UppercaseTranslations);
  ProviderConfig c = HttpConfig(server, ProviderKind::kTranslation);
  c.rate_limit = 10;
  c.batch_size = 1;
  const std::vector<std::string> texts = {"a", "b", "c"};
  const auto start = std::chrono::steady_clock::now();
  ASSERT_TRUE(Translator(c)->TranslateBatch(texts, "de", "en").ok());
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_GE(elapsed, 0.19);
  EXPECT_EQ(server.hits(), 3);
}

TEST(TranslationServiceTest, CacheHitsIssueNoRequests) {
  test_util::TempDir dir;
  auto cache = std::make_shared<DiskCache>(dir.path());
  MockServer server;
  server.set_handler(UppercaseTranslations);
  const ProviderConfig c = HttpConfig(server, ProviderKind::kTranslation);
  const std::vector<std::string> texts = {"a", "b"};
  ASSERT_TRUE(Translator(c, cache)->TranslateBatch(texts, "de", "en").ok());
  EXPECT_EQ(server.hits(), 1);

  auto warm = Translator(c, cache);
  auto out = warm->TranslateBatch(texts, "de", "en");
  ASSERT_TRUE(out.ok());
  EXPECT_THAT(*out, ElementsAre("A", "B"));
  EXPECT_EQ(server.hits(), 1);
  EXPECT_EQ(warm->stats().requests, 0);
  EXPECT_EQ(warm->stats().cache_hits, 2);

  // The direction is part of the key.
  ASSERT_TRUE(warm->TranslateBatch(texts, "fr", "en").ok());
  EXPECT_EQ(server.hits(), 2);
}

TEST(TranslationServiceTest, DeduplicatesAndBatches) {
  MockServer server;
  server.set_handler(UppercaseTranslations);
  ProviderConfig c = HttpConfig(server, ProviderKind::kTranslation);
  c.batch_size = 2;
  const std::vector<std::string> texts = {"a", "b", "a", "c", "d", "b", "e"};
  auto out = Translator(c)->TranslateBatch(texts, "de", "en");
  ASSERT_TRUE(out.ok());
  EXPECT_THAT(*out, ElementsAre("A", "B", "A", "C", "D", "B", "E"));
  const auto bodies = server.bodies();
  ASSERT_EQ(bodies.size(), 3u);
  size_t sent = 0;
  for (const auto& b : bodies) {
    EXPECT_LE(b["texts"].size(), 2u);
    sent += b["texts"].size();
  }
  EXPECT_EQ(sent, 5u);
}

TEST(TranslationServiceTest, ParallelismOverlapsBatches) {
  MockServer server;
  server.set_handler(UppercaseTranslations);
  server.set_delay_ms(150);
  ProviderConfig c = HttpConfig(server, ProviderKind::kTranslation);
  c.batch_size = 1;
  c.parallelism = 4;
  const std::vector<std::string> texts = {"a", "b", "c", "d"};
  const auto start = std::chrono::steady_clock::now();
  ASSERT_TRUE(Translator(c)->TranslateBatch(texts, "de", "en").ok());
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_GE(server.max_in_flight(), 2);
  EXPECT_LT(elapsed, 0.55);
}

TEST(TranslationServiceTest, ErrorNamesFailingIndicesAndKeepsSuccesses) {
  test_util::TempDir dir;
  auto cache = std::make_shared<DiskCache>(dir.path());
  ProviderConfig c;
  c.provider_id = "tbl";
  c.type = "table";
  auto backend = std::make_unique<TableTranslationBackend>(
      std::map<std::string, std::string>{{"a", "A"}, {"c", "C"}});
  TranslationService svc(c, std::move(backend), cache);
  const std::vector<std::string> texts = {"a", "b", "c", "d"};
  auto out = svc.TranslateBatch(texts, "de", "en");
  ASSERT_FALSE(out.ok());
  EXPECT_EQ(out.status().code(), absl::StatusCode::kUnavailable);
  EXPECT_THAT(out.status().message(), HasSubstr("2 of 4 items (indices 1,3)"));
  EXPECT_EQ(cache->Load(CacheKey::For("tbl", "de", "en", "a")), "A");
  EXPECT_EQ(cache->Load(CacheKey::For("tbl", "de", "en", "c")), "C");
  EXPECT_FALSE(cache->Load(CacheKey::For("tbl", "de", "en", "b")).has_value());
}

TEST(TranslationServiceTest, OfflineServesOnlyCachedEntries) {
  test_util::TempDir dir;
  auto cache = std::make_shared<DiskCache>(dir.path());
  ProviderConfig c;
  c.provider_id = "remote";
  c.type = "http";
  c.endpoint = "http://127.0.0.1:1/v1";
  const std::vector<std::string> texts = {"a", "b"};
  auto offline = MakeTranslationService(c, cache, /*offline=*/true);
  ASSERT_TRUE(offline.ok());
  auto out = (*offline)->TranslateBatch(texts, "de", "en");
  EXPECT_EQ(out.status().code(), absl::StatusCode::kUnavailable);
  EXPECT_THAT(out.status().message(), HasSubstr("offline"));

  ASSERT_TRUE(cache->Store(CacheKey::For("remote", "de", "en", "a"), "A", "remote").ok());
  ASSERT_TRUE(cache->Store(CacheKey::For("remote", "de", "en", "b"), "B", "remote").ok());
  out = (*offline)->TranslateBatch(texts, "de", "en");
  ASSERT_TRUE(out.ok());
  EXPECT_THAT(*out, ElementsAre("A", "B"));
}

TEST(TranslationServiceTest, EchoAndTable) {
  ProviderConfig echo;
  echo.provider_id = "echo";
  echo.type = "echo";
  const std::vector<std::string> texts = {"x y", ""};
  EXPECT_THAT(*Translator(echo)->TranslateBatch(texts, "de", "en"), ElementsAre("x y", ""));

  test_util::TempDir dir;
  test_util::WriteFileOrDie(dir / "t.tsv", "x y\tX Y\r\n\tempty\n");
  ProviderConfig table;
  table.provider_id = "t";
  table.type = "table";
  table.path = dir / "t.tsv";
  EXPECT_THAT(*Translator(table)->TranslateBatch(texts, "de", "en"), ElementsAre("X Y", "empty"));

  test_util::WriteFileOrDie(dir / "bad.tsv", "no tab here\n");
  table.path = dir / "bad.tsv";
  auto bad = MakeTranslationService(table, nullptr, false);
  EXPECT_EQ(bad.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_THAT(bad.status().message(), HasSubstr("bad.tsv:1"));
}

TEST(HttpEmbeddingTest, SpeaksEmbedProtocol) {
  MockServer server;
  server.set_handler(LengthEmbeddings);
  auto svc = MakeEmbeddingService(HttpConfig(server, ProviderKind::kEmbedding), nullptr, false);
  ASSERT_TRUE(svc.ok()) << svc.status();
  const std::vector<std::string> texts = {"ab", "abcd"};
  auto sentences = (*svc)->FetchSentenceEmbeddings(texts);
  ASSERT_TRUE(sentences.ok()) << sentences.status();
  EXPECT_THAT((*sentences)[1].vector, ElementsAre(4.0, 1.0));
  EXPECT_EQ((*sentences)[0].provider_id, "mock");
  auto tokens = (*svc)->FetchTokenEmbeddings(texts);
  ASSERT_TRUE(tokens.ok()) << tokens.status();
  EXPECT_THAT((*tokens)[0].wordpieces, ElementsAre("ab"));
  const auto bodies = server.bodies();
  ASSERT_EQ(bodies.size(), 2u);
  EXPECT_EQ(bodies[0]["level"], "sentence");
  EXPECT_EQ(bodies[1]["level"], "token");
  EXPECT_EQ(server.paths()[0], "/v1/embed");
}

TEST(HttpEmbeddingTest, DeclaredDimensionIsChecked) {
  MockServer server;
  server.set_handler([](const json&, httplib::Response& res) {
    res.set_content(R"({"dim": 3, "items": [{"sentence_vector": [1, 2]}]})",
                    "application/json");
  });
  auto svc = MakeEmbeddingService(HttpConfig(server, ProviderKind::kEmbedding), nullptr, false);
  const std::vector<std::string> texts = {"a"};
  auto out = (*svc)->FetchSentenceEmbeddings(texts);
  EXPECT_EQ(out.status().code(), absl::StatusCode::kDataLoss);
}

TEST(HttpEmbeddingTest, DimensionDriftAcrossBatchesIsRejected) {
  MockServer server;
  server.set_handler([](const json& body, httplib::Response& res) {
    const size_t dim = body["texts"][0].get<std::string>().size();
    json item = {{"sentence_vector", std::vector<double>(dim, 1.0)}};
    res.set_content(json{{"dim", dim}, {"items", {item}}}.dump(), "application/json");
  });
  ProviderConfig c = HttpConfig(server, ProviderKind::kEmbedding);
  c.batch_size = 1;
  auto svc = MakeEmbeddingService(c, nullptr, false);
  const std::vector<std::string> texts = {"ab", "abc"};
  auto out = (*svc)->FetchSentenceEmbeddings(texts);
  EXPECT_EQ(out.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_THAT(out.status().message(), HasSubstr("index 1"));
}

TEST(EmbeddingServiceTest, WarmCacheIssuesNoRequests) {
  test_util::TempDir dir;
  auto cache = std::make_shared<DiskCache>(dir.path());
  MockServer server;
  server.set_handler(LengthEmbeddings);
  const ProviderConfig c = HttpConfig(server, ProviderKind::kEmbedding);
  const std::vector<std::string> texts = {"a", "bb", "a"};
  auto cold = MakeEmbeddingService(c, cache, false);
  ASSERT_TRUE((*cold)->FetchTokenEmbeddings(texts).ok());
  EXPECT_EQ(server.hits(), 1);
  EXPECT_EQ(server.bodies()[0]["texts"].size(), 2u);

  auto warm = MakeEmbeddingService(c, cache, /*offline=*/true);
  auto out = (*warm)->FetchTokenEmbeddings(texts);
  ASSERT_TRUE(out.ok()) << out.status();
  EXPECT_EQ((*warm)->stats().requests, 0);
  EXPECT_EQ((*out)[1].matrix[0][0], 2.0);
  // Sentence level is cached separately.
  EXPECT_FALSE((*warm)->FetchSentenceEmbeddings(texts).ok());
}

TEST(FixtureEmbeddingTest, LoadsAndServesByLevel) {
  test_util::TempDir dir;
  test_util::WriteFileOrDie(
      dir / "emb.jsonl",
      R"({"text": "hi", "sentence_vector": [1, 0], "wordpieces": ["hi"], "token_vectors": [[0, 1, 0]]})"
      "\n"
      R"({"text": "only sentence", "sentence_vector": [0, 1]})"
      "\n");
  auto fixture = FixtureEmbeddingBackend::Load(dir / "emb.jsonl");
  ASSERT_TRUE(fixture.ok()) << fixture.status();
  EXPECT_EQ((*fixture)->size(), 2u);
  const std::vector<std::string> texts = {"hi", "only sentence", "missing"};
  auto sentence = (*fixture)->Embed(texts, EmbeddingLevel::kSentence);
  EXPECT_TRUE(sentence[0].ok());
  EXPECT_TRUE(sentence[1].ok());
  EXPECT_EQ(sentence[2].status().code(), absl::StatusCode::kNotFound);
  auto token = (*fixture)->Embed(texts, EmbeddingLevel::kToken);
  EXPECT_TRUE(token[0].ok());
  EXPECT_EQ(token[1].status().code(), absl::StatusCode::kNotFound);
}

TEST(FixtureEmbeddingTest, ValidationErrorsNameTheLine) {
  test_util::TempDir dir;
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"{\"text\": \"a\", \"sentence_vector\": [1]}\nnot json\n", "emb.jsonl:2: not a JSON"},
      {"{\"sentence_vector\": [1]}\n", "missing \"text\""},
      {"{\"text\": \"a\", \"sentence_vector\": [1]}\n{\"text\": \"b\", \"sentence_vector\": [1, 2]}\n",
       "emb.jsonl:2: sentence_vector dimension"},
      {"{\"text\": \"a\", \"wordpieces\": [\"a\", \"b\"], \"token_vectors\": [[1]]}\n",
       "2 wordpieces but 1 token vectors"},
      {"{\"text\": \"a\", \"sentence_vector\": [1, \"x\"]}\n", "non-numeric"},
  };
  for (const auto& [contents, message] : cases) {
    test_util::WriteFileOrDie(dir / "emb.jsonl", contents);
    auto fixture = FixtureEmbeddingBackend::Load(dir / "emb.jsonl");
    ASSERT_FALSE(fixture.ok()) << contents;
    EXPECT_EQ(fixture.status().code(), absl::StatusCode::kInvalidArgument);
    EXPECT_THAT(fixture.status().message(), HasSubstr(message));
  }
  EXPECT_EQ(FixtureEmbeddingBackend::Load(dir / "absent.jsonl").status().code(),
            absl::StatusCode::kNotFound);
}

TEST(EmbeddingRecordTest, JsonRoundTrip) {
  EmbeddingRecord r;
  r.sentence_vector = {0.1, -2.5};
  r.wordpieces = {"un", "##able"};
  r.token_vectors = {{1, 2}, {3, 4}};
  auto back = EmbeddingRecord::FromJson(r.ToJson());
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(back->sentence_vector, r.sentence_vector);
  EXPECT_EQ(back->wordpieces, r.wordpieces);
  EXPECT_EQ(back->token_vectors, r.token_vectors);
  EXPECT_EQ(EmbeddingRecord::FromJson("{").status().code(), absl::StatusCode::kDataLoss);
}

TEST(ProviderConfigTest, Validation) {
  ProviderConfig c;
  c.provider_id = "p";
  c.type = "echo";
  EXPECT_TRUE(c.Validate().ok());
  c.type = "fixture";
  EXPECT_THAT(c.Validate().message(), HasSubstr("unknown translation provider type"));
  c.type = "http";
  EXPECT_THAT(c.Validate().message(), HasSubstr("needs an endpoint"));
  c.endpoint = "http://x";
  c.batch_size = 0;
  EXPECT_THAT(c.Validate().message(), HasSubstr("batch_size"));
  c.batch_size = 1;
  c.rate_limit = 0;
  EXPECT_THAT(c.Validate().message(), HasSubstr("rate_limit"));
  c.rate_limit = 1;
  c.kind = ProviderKind::kEmbedding;
  c.type = "table";
  EXPECT_THAT(c.Validate().message(), HasSubstr("unknown embedding provider type"));
  c.type = "fixture";
  EXPECT_THAT(c.Validate().message(), HasSubstr("needs a path"));
  c.provider_id = "";
  EXPECT_FALSE(c.Validate().ok());
}

TEST(ProviderConfigTest, CredentialVariableName) {
  ProviderConfig c;
  c.provider_id = "my-bt.v2";
  EXPECT_EQ(CredentialVariable(c), "RTTQE_MY_BT_V2_TOKEN");
  c.auth = "OTHER";
  EXPECT_EQ(CredentialVariable(c), "OTHER");
}

}  // namespace
}  // namespace rttqe::providers
