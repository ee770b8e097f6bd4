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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "httplib.h"
#include "json.hpp"
#include "parallel.h"

namespace rttqe::providers {

namespace {

using json = nlohmann::json;

std::string Preview(absl::string_view text) {
  constexpr size_t kMax = 60;
  if (text.size() <= kMax) return std::string(text);
  return absl::StrCat(text.substr(0, kMax), "...");
}

// Collapses per-item failures into one status naming each failing index.
template <typename T>
absl::Status SummarizeFailures(const std::vector<absl::StatusOr<T>>& results,
                               absl::string_view provider_id) {
  std::vector<size_t> failed;
  const absl::Status* first = nullptr;
  for (size_t i = 0; i < results.size(); ++i) {
    if (!results[i].ok()) {
      failed.push_back(i);
      if (first == nullptr) first = &results[i].status();
    }
  }
  if (failed.empty()) return absl::OkStatus();
  return absl::Status(
      first->code(),
      absl::StrCat("provider '", provider_id, "' failed for ", failed.size(),
                   " of ", results.size(), " items (indices ",
                   absl::StrJoin(failed, ","), "); first error: ",
                   first->message()));
}

absl::StatusOr<std::vector<double>> ParseVector(const json& j,
                                                absl::string_view what) {
  if (!j.is_array()) {
    return absl::InvalidArgumentError(absl::StrCat(what, " is not an array"));
  }
  std::vector<double> v;
  v.reserve(j.size());
  for (const json& x : j) {
    if (!x.is_number()) {
      return absl::InvalidArgumentError(absl::StrCat(what, " has a non-numeric entry"));
    }
    const double d = x.get<double>();
    if (!std::isfinite(d)) {
      return absl::InvalidArgumentError(absl::StrCat(what, " has a non-finite entry"));
    }
    v.push_back(d);
  }
  return v;
}

absl::StatusOr<EmbeddingRecord> RecordFromJson(const json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("record is not an object");
  EmbeddingRecord record;
  if (j.contains("sentence_vector")) {
    auto v = ParseVector(j.at("sentence_vector"), "sentence_vector");
    if (!v.ok()) return v.status();
    record.sentence_vector = std::move(*v);
  }
  if (j.contains("wordpieces")) {
    const json& pieces = j.at("wordpieces");
    if (!pieces.is_array()) return absl::InvalidArgumentError("wordpieces is not an array");
    for (const json& p : pieces) {
      if (!p.is_string()) return absl::InvalidArgumentError("wordpiece is not a string");
      record.wordpieces.push_back(p.get<std::string>());
    }
  }
  if (j.contains("token_vectors")) {
    const json& rows = j.at("token_vectors");
    if (!rows.is_array()) return absl::InvalidArgumentError("token_vectors is not an array");
    for (const json& row : rows) {
      auto v = ParseVector(row, "token vector");
      if (!v.ok()) return v.status();
      record.token_vectors.push_back(std::move(*v));
    }
  }
  semantic::TokenEmbeddings check{record.wordpieces, record.token_vectors};
  if (absl::Status s = check.Validate(); !s.ok()) return s;
  return record;
}

class RateLimiter {
 public:
  explicit RateLimiter(double per_second)
      : interval_(std::chrono::duration_cast<std::chrono::steady_clock::duration>(
            std::chrono::duration<double>(1.0 / per_second))) {}

  void Acquire() {
    std::chrono::steady_clock::time_point slot;
    {
      std::lock_guard lock(mu_);
      const auto now = std::chrono::steady_clock::now();
      slot = std::max(now, next_);
      next_ = slot + interval_;
    }
    std::this_thread::sleep_until(slot);
  }

 private:
  std::mutex mu_;
  std::chrono::steady_clock::duration interval_;
  std::chrono::steady_clock::time_point next_{};
};

struct ParsedEndpoint {
  std::string scheme_host_port;
  std::string path_prefix;
};

absl::StatusOr<ParsedEndpoint> ParseEndpoint(absl::string_view url) {
  const size_t scheme_end = url.find("://");
  if (scheme_end == absl::string_view::npos) {
    return absl::InvalidArgumentError(absl::StrCat("endpoint '", url, "' has no scheme"));
  }
  const size_t path_start = url.find('/', scheme_end + 3);
  ParsedEndpoint out;
  if (path_start == absl::string_view::npos) {
    out.scheme_host_port = std::string(url);
  } else {
    out.scheme_host_port = std::string(url.substr(0, path_start));
    out.path_prefix = std::string(url.substr(path_start));
    while (!out.path_prefix.empty() && out.path_prefix.back() == '/') {
      out.path_prefix.pop_back();
    }
  }
  return out;
}

class HttpJsonClient {
 public:
  explicit HttpJsonClient(const ProviderConfig& config)
      : config_(config), limiter_(config.rate_limit) {}

  absl::StatusOr<json> Post(absl::string_view route, const json& body) {
    auto endpoint = ParseEndpoint(config_.endpoint);
    if (!endpoint.ok()) return endpoint.status();
    const std::string path = absl::StrCat(endpoint->path_prefix, route);
    httplib::Headers headers;
    if (const char* token = std::getenv(CredentialVariable(config_).c_str());
        token != nullptr && *token != '\0') {
      headers.emplace("Authorization", absl::StrCat("Bearer ", token));
    }
    const std::string payload = body.dump();
    const auto timeout = std::chrono::duration<double>(config_.timeout);
    const auto timeout_us =
        std::chrono::duration_cast<std::chrono::microseconds>(timeout).count();

    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
      limiter_.Acquire();
      httplib::Client client(endpoint->scheme_host_port);
      client.set_connection_timeout(0, timeout_us);
      client.set_read_timeout(0, timeout_us);
      client.set_write_timeout(0, timeout_us);
      auto res = client.Post(path, headers, payload, "application/json");

      double retry_after = 0.0;
      if (!res) {
        last_error = absl::StrCat("transport error: ", httplib::to_string(res.error()));
      } else if (res->status == 200) {
        json parsed = json::parse(res->body, nullptr, /*allow_exceptions=*/false);
        if (parsed.is_discarded()) {
          return absl::DataLossError(absl::StrCat(
              "provider '", config_.provider_id, "' returned malformed JSON"));
        }
        return parsed;
      } else if (res->status == 429 || res->status >= 500) {
        last_error = absl::StrCat("HTTP ", res->status);
        if (res->status == 429 && res->has_header("Retry-After")) {
          double seconds = 0.0;
          if (absl::SimpleAtod(res->get_header_value("Retry-After"), &seconds)) {
            retry_after = seconds;
          }
        }
      } else {
        return absl::UnavailableError(absl::StrCat(
            "provider '", config_.provider_id, "' rejected the request: HTTP ",
            res->status, " ", Preview(res->body)));
      }
      if (attempt == config_.max_retries) break;
      const double backoff =
          std::max(config_.initial_backoff * std::pow(2.0, attempt), retry_after);
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
    }
    return absl::UnavailableError(absl::StrCat(
        "provider '", config_.provider_id, "' failed after ",
        config_.max_retries + 1, " attempts: ", last_error));
  }

 private:
  ProviderConfig config_;
  RateLimiter limiter_;
};

class HttpTranslationBackend : public TranslationBackend {
 public:
  explicit HttpTranslationBackend(const ProviderConfig& config)
      : client_(config) {}

  std::vector<absl::StatusOr<std::string>> Translate(
      std::span<const std::string> texts, absl::string_view src,
      absl::string_view tgt) override {
    json body = {{"texts", json(std::vector<std::string>(texts.begin(), texts.end()))},
                 {"src", std::string(src)},
                 {"tgt", std::string(tgt)}};
    auto response = client_.Post("/translate", body);
    std::vector<absl::StatusOr<std::string>> out;
    out.reserve(texts.size());
    absl::Status failure = response.status();
    if (failure.ok()) {
      const json& tr = (*response)["translations"];
      if (!tr.is_array() || tr.size() != texts.size()) {
        failure = absl::DataLossError(absl::StrCat(
            "translation response has ", tr.is_array() ? tr.size() : 0,
            " items for ", texts.size(), " inputs"));
      } else {
        for (const json& t : tr) {
          if (t.is_string()) {
            out.push_back(t.get<std::string>());
          } else {
            out.push_back(absl::DataLossError("translation is not a string"));
          }
        }
        return out;
      }
    }
    out.assign(texts.size(), failure);
    return out;
  }

 private:
  HttpJsonClient client_;
};

class HttpEmbeddingBackend : public EmbeddingBackend {
 public:
  explicit HttpEmbeddingBackend(const ProviderConfig& config) : client_(config) {}

  std::vector<absl::StatusOr<EmbeddingRecord>> Embed(
      std::span<const std::string> texts, EmbeddingLevel level) override {
    json body = {{"texts", json(std::vector<std::string>(texts.begin(), texts.end()))},
                 {"level", std::string(LevelName(level))}};
    auto response = client_.Post("/embed", body);
    std::vector<absl::StatusOr<EmbeddingRecord>> out;
    absl::Status failure = response.status();
    if (failure.ok()) {
      failure = ParseItems(*response, texts.size(), level, out);
      if (failure.ok()) return out;
    }
    out.assign(texts.size(), failure);
    return out;
  }

 private:
  static absl::Status ParseItems(const json& response, size_t expected,
                                 EmbeddingLevel level,
                                 std::vector<absl::StatusOr<EmbeddingRecord>>& out) {
    if (!response.contains("dim") || !response["dim"].is_number_integer()) {
      return absl::DataLossError("embedding response lacks an integer 'dim'");
    }
    const size_t dim = response["dim"].get<size_t>();
    const json& items = response.contains("items") ? response["items"] : json();
    if (!items.is_array() || items.size() != expected) {
      return absl::DataLossError(absl::StrCat(
          "embedding response has ", items.is_array() ? items.size() : 0,
          " items for ", expected, " inputs"));
    }
    for (const json& item : items) {
      auto record = RecordFromJson(item);
      if (!record.ok()) {
        return absl::DataLossError(absl::StrCat("bad embedding item: ",
                                                record.status().message()));
      }
      const bool sentence_ok = level != EmbeddingLevel::kSentence ||
                               record->sentence_vector.size() == dim;
      const bool token_ok =
          level != EmbeddingLevel::kToken ||
          (!record->token_vectors.empty() && record->token_vectors[0].size() == dim);
      if (!sentence_ok || !token_ok) {
        return absl::DataLossError(
            absl::StrCat("embedding item does not match declared dim ", dim));
      }
      out.push_back(std::move(*record));
    }
    return absl::OkStatus();
  }

  HttpJsonClient client_;
};

std::vector<std::vector<size_t>> Chunk(const std::vector<size_t>& items,
                                       int batch_size) {
  std::vector<std::vector<size_t>> chunks;
  const size_t size = static_cast<size_t>(std::max(1, batch_size));
  for (size_t i = 0; i < items.size(); i += size) {
    chunks.emplace_back(items.begin() + i,
                        items.begin() + std::min(items.size(), i + size));
  }
  return chunks;
}

}  // namespace

absl::Status ProviderConfig::Validate() const {
  if (provider_id.empty()) return absl::InvalidArgumentError("provider id is empty");
  auto bad = [&](absl::string_view what) {
    return absl::InvalidArgumentError(
        absl::StrCat("provider '", provider_id, "': ", what));
  };
  if (!(rate_limit > 0.0)) return bad("rate_limit must be > 0");
  if (max_retries < 0) return bad("max_retries must be >= 0");
  if (!(timeout > 0.0)) return bad("timeout must be > 0");
  if (batch_size < 1) return bad("batch_size must be >= 1");
  if (parallelism < 1) return bad("parallelism must be >= 1");
  if (initial_backoff < 0.0) return bad("initial_backoff must be >= 0");
  if (kind == ProviderKind::kTranslation) {
    if (type != "echo" && type != "table" && type != "http") {
      return bad(absl::StrCat("unknown translation provider type '", type,
                              "' (expected echo, table or http)"));
    }
  } else if (type != "fixture" && type != "http") {
    return bad(absl::StrCat("unknown embedding provider type '", type,
                            "' (expected fixture or http)"));
  }
  if (type == "http" && endpoint.empty()) return bad("http provider needs an endpoint");
  if ((type == "table" || type == "fixture") && path.empty()) {
    return bad(absl::StrCat(type, " provider needs a path"));
  }
  return absl::OkStatus();
}

std::string CredentialVariable(const ProviderConfig& config) {
  if (!config.auth.empty()) return config.auth;
  std::string name = "RTTQE_";
  for (char c : config.provider_id) {
    name.push_back(absl::ascii_isalnum(static_cast<unsigned char>(c))
                       ? absl::ascii_toupper(static_cast<unsigned char>(c))
                       : '_');
  }
  return name + "_TOKEN";
}

absl::string_view LevelName(EmbeddingLevel level) {
  return level == EmbeddingLevel::kSentence ? "sentence" : "token";
}

std::string EmbeddingRecord::ToJson() const {
  json j = json::object();
  if (!sentence_vector.empty()) j["sentence_vector"] = sentence_vector;
  if (!wordpieces.empty() || !token_vectors.empty()) {
    j["wordpieces"] = wordpieces;
    j["token_vectors"] = token_vectors;
  }
  return j.dump();
}

absl::StatusOr<EmbeddingRecord> EmbeddingRecord::FromJson(absl::string_view text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) return absl::DataLossError("embedding record is not valid JSON");
  return RecordFromJson(j);
}

std::vector<absl::StatusOr<std::string>> EchoTranslationBackend::Translate(
    std::span<const std::string> texts, absl::string_view, absl::string_view) {
  return {texts.begin(), texts.end()};
}

absl::StatusOr<std::unique_ptr<TableTranslationBackend>>
TableTranslationBackend::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open translation table ", path));
  std::map<std::string, std::string> table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line_no, ": expected source<TAB>translation"));
    }
    table[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return std::make_unique<TableTranslationBackend>(std::move(table));
}

std::vector<absl::StatusOr<std::string>> TableTranslationBackend::Translate(
    std::span<const std::string> texts, absl::string_view, absl::string_view) {
  std::vector<absl::StatusOr<std::string>> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) {
    auto it = table_.find(t);
    if (it == table_.end()) {
      out.push_back(absl::UnavailableError(
          absl::StrCat("no translation for \"", Preview(t), "\"")));
    } else {
      out.push_back(it->second);
    }
  }
  return out;
}

absl::StatusOr<std::unique_ptr<FixtureEmbeddingBackend>>
FixtureEmbeddingBackend::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open embedding fixture ", path));
  auto backend = std::unique_ptr<FixtureEmbeddingBackend>(new FixtureEmbeddingBackend);
  std::optional<size_t> sentence_dim;
  std::optional<size_t> token_dim;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fail = [&](absl::string_view what) {
      return absl::InvalidArgumentError(absl::StrCat(path, ":", line_no, ": ", what));
    };
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) return fail("not a JSON object");
    if (!j.contains("text") || !j["text"].is_string()) return fail("missing \"text\"");
    auto record = RecordFromJson(j);
    if (!record.ok()) return fail(record.status().message());
    if (!record->sentence_vector.empty()) {
      if (sentence_dim && *sentence_dim != record->sentence_vector.size()) {
        return fail("sentence_vector dimension differs from earlier records");
      }
      sentence_dim = record->sentence_vector.size();
    }
    if (!record->token_vectors.empty()) {
      if (token_dim && *token_dim != record->token_vectors[0].size()) {
        return fail("token_vectors dimension differs from earlier records");
      }
      token_dim = record->token_vectors[0].size();
    }
    backend->records_[j["text"].get<std::string>()] = std::move(*record);
  }
  return backend;
}

std::vector<absl::StatusOr<EmbeddingRecord>> FixtureEmbeddingBackend::Embed(
    std::span<const std::string> texts, EmbeddingLevel level) {
  std::vector<absl::StatusOr<EmbeddingRecord>> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) {
    auto it = records_.find(t);
    if (it == records_.end()) {
      out.push_back(absl::NotFoundError(
          absl::StrCat("missing embedding for text \"", Preview(t), "\"")));
      continue;
    }
    EmbeddingRecord r;
    if (level == EmbeddingLevel::kSentence) {
      if (it->second.sentence_vector.empty()) {
        out.push_back(absl::NotFoundError(
            absl::StrCat("no sentence vector for text \"", Preview(t), "\"")));
        continue;
      }
      r.sentence_vector = it->second.sentence_vector;
    } else {
      if (it->second.wordpieces.empty()) {
        out.push_back(absl::NotFoundError(
            absl::StrCat("no wordpiece vectors for text \"", Preview(t), "\"")));
        continue;
      }
      r.wordpieces = it->second.wordpieces;
      r.token_vectors = it->second.token_vectors;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<absl::StatusOr<std::string>> OfflineTranslationBackend::Translate(
    std::span<const std::string> texts, absl::string_view, absl::string_view) {
  return std::vector<absl::StatusOr<std::string>>(
      texts.size(), absl::UnavailableError("offline mode: translation not in cache"));
}

std::vector<absl::StatusOr<EmbeddingRecord>> OfflineEmbeddingBackend::Embed(
    std::span<const std::string> texts, EmbeddingLevel) {
  return std::vector<absl::StatusOr<EmbeddingRecord>>(
      texts.size(), absl::UnavailableError("offline mode: embedding not in cache"));
}

std::unique_ptr<TranslationBackend> MakeHttpTranslationBackend(
    const ProviderConfig& config) {
  return std::make_unique<HttpTranslationBackend>(config);
}

std::unique_ptr<EmbeddingBackend> MakeHttpEmbeddingBackend(
    const ProviderConfig& config) {
  return std::make_unique<HttpEmbeddingBackend>(config);
}

TranslationService::TranslationService(ProviderConfig config,
                                       std::unique_ptr<TranslationBackend> backend,
                                       std::shared_ptr<DiskCache> cache)
    : config_(std::move(config)),
      backend_(std::move(backend)),
      cache_(std::move(cache)) {}

ServiceStats TranslationService::stats() const {
  return {requests_.load(), hits_.load(), misses_.load()};
}

std::vector<absl::StatusOr<std::string>> TranslationService::TranslateEach(
    std::span<const std::string> texts, absl::string_view src,
    absl::string_view tgt) {
  std::vector<absl::StatusOr<std::string>> results(
      texts.size(), absl::UnknownError("not translated"));
  // Distinct uncached texts, each mapped to every index it appears at.
  std::map<std::string, std::vector<size_t>> pending;
  for (size_t i = 0; i < texts.size(); ++i) {
    if (cache_) {
      if (auto hit = cache_->Load(CacheKey::For(config_.provider_id, src, tgt, texts[i]))) {
        results[i] = std::move(*hit);
        ++hits_;
        continue;
      }
    }
    ++misses_;
    pending[texts[i]].push_back(i);
  }
  if (pending.empty()) return results;

  std::vector<size_t> order;
  for (const auto& [text, indices] : pending) {
    order.push_back(indices.front());
  }
  std::sort(order.begin(), order.end());
  const auto chunks = Chunk(order, config_.batch_size);
  std::mutex write_mu;
  internal::ParallelFor(chunks.size(), config_.parallelism, [&](size_t c) {
    std::vector<std::string> batch;
    for (size_t idx : chunks[c]) batch.push_back(texts[idx]);
    ++requests_;
    auto translated = backend_->Translate(batch, src, tgt);
    if (translated.size() != batch.size()) {
      translated.assign(batch.size(),
                        absl::InternalError("backend returned a misaligned batch"));
    }
    for (size_t k = 0; k < batch.size(); ++k) {
      if (translated[k].ok() && cache_) {
        absl::Status stored = cache_->Store(
            CacheKey::For(config_.provider_id, src, tgt, batch[k]), *translated[k],
            config_.provider_id);
        if (!stored.ok()) translated[k] = stored;
      }
      std::lock_guard lock(write_mu);
      for (size_t idx : pending.at(batch[k])) results[idx] = translated[k];
    }
  });
  return results;
}

absl::StatusOr<std::vector<std::string>> TranslationService::TranslateBatch(
    std::span<const std::string> texts, absl::string_view src,
    absl::string_view tgt) {
  if (texts.empty()) return absl::InvalidArgumentError("nothing to translate");
  auto results = TranslateEach(texts, src, tgt);
  if (absl::Status s = SummarizeFailures(results, config_.provider_id); !s.ok()) {
    return s;
  }
  std::vector<std::string> out;
  out.reserve(results.size());
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

EmbeddingService::EmbeddingService(ProviderConfig config,
                                   std::unique_ptr<EmbeddingBackend> backend,
                                   std::shared_ptr<DiskCache> cache)
    : config_(std::move(config)),
      backend_(std::move(backend)),
      cache_(std::move(cache)) {}

ServiceStats EmbeddingService::stats() const {
  return {requests_.load(), hits_.load(), misses_.load()};
}

absl::StatusOr<std::vector<EmbeddingRecord>> EmbeddingService::Fetch(
    std::span<const std::string> texts, EmbeddingLevel level) {
  const std::string level_name(LevelName(level));
  std::vector<absl::StatusOr<EmbeddingRecord>> results(
      texts.size(), absl::UnknownError("not fetched"));
  std::map<std::string, std::vector<size_t>> pending;
  for (size_t i = 0; i < texts.size(); ++i) {
    if (cache_) {
      if (auto hit = cache_->Load(
              CacheKey::For(config_.provider_id, "embed", level_name, texts[i]))) {
        auto record = EmbeddingRecord::FromJson(*hit);
        if (record.ok()) {
          results[i] = std::move(*record);
          ++hits_;
          continue;
        }
      }
    }
    ++misses_;
    pending[texts[i]].push_back(i);
  }

  if (!pending.empty()) {
    std::vector<size_t> order;
    for (const auto& [text, indices] : pending) order.push_back(indices.front());
    std::sort(order.begin(), order.end());
    const auto chunks = Chunk(order, config_.batch_size);
    std::mutex write_mu;
    internal::ParallelFor(chunks.size(), config_.parallelism, [&](size_t c) {
      std::vector<std::string> batch;
      for (size_t idx : chunks[c]) batch.push_back(texts[idx]);
      ++requests_;
      auto fetched = backend_->Embed(batch, level);
      if (fetched.size() != batch.size()) {
        fetched.assign(batch.size(),
                       absl::InternalError("backend returned a misaligned batch"));
      }
      for (size_t k = 0; k < batch.size(); ++k) {
        if (fetched[k].ok() && cache_) {
          absl::Status stored = cache_->Store(
              CacheKey::For(config_.provider_id, "embed", level_name, batch[k]),
              fetched[k]->ToJson(), config_.provider_id);
          if (!stored.ok()) fetched[k] = stored;
        }
        std::lock_guard lock(write_mu);
        for (size_t idx : pending.at(batch[k])) results[idx] = fetched[k];
      }
    });
  }

  if (absl::Status s = SummarizeFailures(results, config_.provider_id); !s.ok()) {
    return s;
  }
  std::vector<EmbeddingRecord> out;
  out.reserve(results.size());
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

absl::StatusOr<std::vector<semantic::SentenceEmbedding>>
EmbeddingService::FetchSentenceEmbeddings(std::span<const std::string> texts) {
  auto records = Fetch(texts, EmbeddingLevel::kSentence);
  if (!records.ok()) return records.status();
  std::vector<semantic::SentenceEmbedding> out;
  out.reserve(records->size());
  for (size_t i = 0; i < records->size(); ++i) {
    auto& r = (*records)[i];
    if (r.sentence_vector.empty()) {
      return absl::NotFoundError(
          absl::StrCat("no sentence vector for text \"", Preview(texts[i]), "\""));
    }
    if (!out.empty() && out.front().vector.size() != r.sentence_vector.size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "provider '", config_.provider_id, "' returned ", r.sentence_vector.size(),
          "-dimensional vector at index ", i, " after ",
          out.front().vector.size(), "-dimensional ones"));
    }
    out.push_back({std::move(r.sentence_vector), config_.provider_id});
  }
  return out;
}

absl::StatusOr<std::vector<semantic::TokenEmbeddings>>
EmbeddingService::FetchTokenEmbeddings(std::span<const std::string> texts) {
  auto records = Fetch(texts, EmbeddingLevel::kToken);
  if (!records.ok()) return records.status();
  std::vector<semantic::TokenEmbeddings> out;
  out.reserve(records->size());
  for (size_t i = 0; i < records->size(); ++i) {
    auto& r = (*records)[i];
    semantic::TokenEmbeddings e{std::move(r.wordpieces), std::move(r.token_vectors)};
    if (e.matrix.empty()) {
      return absl::NotFoundError(
          absl::StrCat("no wordpiece vectors for text \"", Preview(texts[i]), "\""));
    }
    if (!out.empty() && out.front().dim() != e.dim()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "provider '", config_.provider_id, "' returned ", e.dim(),
          "-dimensional token vectors at index ", i, " after ",
          out.front().dim(), "-dimensional ones"));
    }
    out.push_back(std::move(e));
  }
  return out;
}

absl::StatusOr<std::unique_ptr<TranslationService>> MakeTranslationService(
    const ProviderConfig& config, std::shared_ptr<DiskCache> cache, bool offline) {
  if (config.kind != ProviderKind::kTranslation) {
    return absl::InvalidArgumentError(
        absl::StrCat("provider '", config.provider_id, "' is not a translation provider"));
  }
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  std::unique_ptr<TranslationBackend> backend;
  if (config.type == "echo") {
    backend = std::make_unique<EchoTranslationBackend>();
  } else if (config.type == "table") {
    auto table = TableTranslationBackend::Load(config.path);
    if (!table.ok()) return table.status();
    backend = std::move(*table);
  } else if (offline) {
    backend = std::make_unique<OfflineTranslationBackend>();
  } else {
    backend = MakeHttpTranslationBackend(config);
  }
  return std::make_unique<TranslationService>(config, std::move(backend),
                                              std::move(cache));
}

absl::StatusOr<std::unique_ptr<EmbeddingService>> MakeEmbeddingService(
    const ProviderConfig& config, std::shared_ptr<DiskCache> cache, bool offline) {
  if (config.kind != ProviderKind::kEmbedding) {
    return absl::InvalidArgumentError(
        absl::StrCat("provider '", config.provider_id, "' is not an embedding provider"));
  }
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  std::unique_ptr<EmbeddingBackend> backend;
  if (config.type == "fixture") {
    auto fixture = FixtureEmbeddingBackend::Load(config.path);
    if (!fixture.ok()) return fixture.status();
    backend = std::move(*fixture);
  } else if (offline) {
    backend = std::make_unique<OfflineEmbeddingBackend>();
  } else {
    backend = MakeHttpEmbeddingBackend(config);
  }
  return std::make_unique<EmbeddingService>(config, std::move(backend),
                                            std::move(cache));
}

}  // namespace rttqe::providers
