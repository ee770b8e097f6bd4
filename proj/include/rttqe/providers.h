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

// Backward-translation and embedding providers.
//
// A provider is a backend (offline fixture, echo, or an HTTP service speaking
// the /translate and /embed protocols) wrapped in a service that caches every
// result on disk, batches requests and keeps outputs aligned with inputs.

#ifndef RTTQE_PROVIDERS_H_
#define RTTQE_PROVIDERS_H_

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "rttqe/cache.h"
#include "rttqe/semantic_metrics.h"

namespace rttqe::providers {

enum class ProviderKind { kTranslation, kEmbedding };

struct ProviderConfig {
  std::string provider_id;
  ProviderKind kind = ProviderKind::kTranslation;
  // "echo" | "table" (translation), "fixture" (embedding), "http" (both).
  std::string type;
  // Base URL for "http", e.g. http://localhost:8080/v1.
  std::string endpoint;
  // Fixture file for "table" and "fixture".
  std::string path;
  // Name of the environment variable holding the credential. Empty means
  // RTTQE_<PROVIDER_ID>_TOKEN. The value is sent as a bearer token and is
  // never logged or cached.
  std::string auth;
  double rate_limit = 2.0;  // requests per second
  double timeout = 30.0;    // seconds
  int max_retries = 3;
  int batch_size = 32;
  int parallelism = 1;
  double initial_backoff = 0.5;  // seconds, doubled per retry

  absl::Status Validate() const;
  bool UsesNetwork() const { return type == "http"; }
};

std::string CredentialVariable(const ProviderConfig& config);

enum class EmbeddingLevel { kSentence, kToken };
absl::string_view LevelName(EmbeddingLevel level);

// One item of the /embed response or of an embedding fixture file.
struct EmbeddingRecord {
  std::vector<double> sentence_vector;
  std::vector<std::string> wordpieces;
  std::vector<std::vector<double>> token_vectors;

  std::string ToJson() const;
  static absl::StatusOr<EmbeddingRecord> FromJson(absl::string_view json);
};

class TranslationBackend {
 public:
  virtual ~TranslationBackend() = default;
  // One result per input, in input order.
  virtual std::vector<absl::StatusOr<std::string>> Translate(
      std::span<const std::string> texts, absl::string_view src,
      absl::string_view tgt) = 0;
};

class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  virtual std::vector<absl::StatusOr<EmbeddingRecord>> Embed(
      std::span<const std::string> texts, EmbeddingLevel level) = 0;
};

// Offline backends.
class EchoTranslationBackend : public TranslationBackend {
 public:
  std::vector<absl::StatusOr<std::string>> Translate(
      std::span<const std::string> texts, absl::string_view src,
      absl::string_view tgt) override;
};

// TSV of "source<TAB>translation" rows.
class TableTranslationBackend : public TranslationBackend {
 public:
  static absl::StatusOr<std::unique_ptr<TableTranslationBackend>> Load(
      const std::string& path);
  explicit TableTranslationBackend(std::map<std::string, std::string> table)
      : table_(std::move(table)) {}

  std::vector<absl::StatusOr<std::string>> Translate(
      std::span<const std::string> texts, absl::string_view src,
      absl::string_view tgt) override;

 private:
  std::map<std::string, std::string> table_;
};

// JSON-lines fixture: {"text", "sentence_vector", "wordpieces",
// "token_vectors"} per line. Records are validated when loaded.
class FixtureEmbeddingBackend : public EmbeddingBackend {
 public:
  static absl::StatusOr<std::unique_ptr<FixtureEmbeddingBackend>> Load(
      const std::string& path);

  std::vector<absl::StatusOr<EmbeddingRecord>> Embed(
      std::span<const std::string> texts, EmbeddingLevel level) override;

  size_t size() const { return records_.size(); }

 private:
  std::map<std::string, EmbeddingRecord> records_;
};

// Stands in for a network backend under --offline: every request fails, so
// only cached entries can be served.
class OfflineTranslationBackend : public TranslationBackend {
 public:
  std::vector<absl::StatusOr<std::string>> Translate(
      std::span<const std::string> texts, absl::string_view src,
      absl::string_view tgt) override;
};

class OfflineEmbeddingBackend : public EmbeddingBackend {
 public:
  std::vector<absl::StatusOr<EmbeddingRecord>> Embed(
      std::span<const std::string> texts, EmbeddingLevel level) override;
};

// HTTP backends. Rate limiting, retry with exponential backoff on transport
// errors, 429 and 5xx responses.
std::unique_ptr<TranslationBackend> MakeHttpTranslationBackend(
    const ProviderConfig& config);
std::unique_ptr<EmbeddingBackend> MakeHttpEmbeddingBackend(
    const ProviderConfig& config);

struct ServiceStats {
  int64_t requests = 0;  // backend calls issued
  int64_t cache_hits = 0;
  int64_t cache_misses = 0;
};

class TranslationService {
 public:
  TranslationService(ProviderConfig config,
                     std::unique_ptr<TranslationBackend> backend,
                     std::shared_ptr<DiskCache> cache);

  // Per-item results aligned with `texts`. Successful items are cached
  // before this returns; cached items are never requested again.
  std::vector<absl::StatusOr<std::string>> TranslateEach(
      std::span<const std::string> texts, absl::string_view src,
      absl::string_view tgt);

  // As TranslateEach, failing as a whole if any item failed. The error
  // names every failing index.
  absl::StatusOr<std::vector<std::string>> TranslateBatch(
      std::span<const std::string> texts, absl::string_view src,
      absl::string_view tgt);

  const ProviderConfig& config() const { return config_; }
  ServiceStats stats() const;

 private:
  ProviderConfig config_;
  std::unique_ptr<TranslationBackend> backend_;
  std::shared_ptr<DiskCache> cache_;
  std::atomic<int64_t> requests_{0};
  std::atomic<int64_t> hits_{0};
  std::atomic<int64_t> misses_{0};
};

class EmbeddingService {
 public:
  EmbeddingService(ProviderConfig config,
                   std::unique_ptr<EmbeddingBackend> backend,
                   std::shared_ptr<DiskCache> cache);

  absl::StatusOr<std::vector<semantic::SentenceEmbedding>>
  FetchSentenceEmbeddings(std::span<const std::string> texts);

  absl::StatusOr<std::vector<semantic::TokenEmbeddings>> FetchTokenEmbeddings(
      std::span<const std::string> texts);

  const ProviderConfig& config() const { return config_; }
  ServiceStats stats() const;

 private:
  absl::StatusOr<std::vector<EmbeddingRecord>> Fetch(
      std::span<const std::string> texts, EmbeddingLevel level);

  ProviderConfig config_;
  std::unique_ptr<EmbeddingBackend> backend_;
  std::shared_ptr<DiskCache> cache_;
  std::atomic<int64_t> requests_{0};
  std::atomic<int64_t> hits_{0};
  std::atomic<int64_t> misses_{0};
};

// Builds the backend named by config.type. With `offline`, network backends
// are replaced by ones that can only serve cache hits.
absl::StatusOr<std::unique_ptr<TranslationService>> MakeTranslationService(
    const ProviderConfig& config, std::shared_ptr<DiskCache> cache,
    bool offline);

absl::StatusOr<std::unique_ptr<EmbeddingService>> MakeEmbeddingService(
    const ProviderConfig& config, std::shared_ptr<DiskCache> cache,
    bool offline);

}  // namespace rttqe::providers

#endif  // RTTQE_PROVIDERS_H_
