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

// Round-trip orchestration: backward-translate each system's outputs, score
// input against round trip with the configured metrics, and aggregate to
// system level.

#ifndef RTTQE_RTT_PIPELINE_H_
#define RTTQE_RTT_PIPELINE_H_

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "rttqe/corpus_io.h"
#include "rttqe/lexical_metrics.h"
#include "rttqe/providers.h"
#include "rttqe/semantic_metrics.h"
#include "rttqe/textnorm.h"

namespace rttqe::pipeline {

inline constexpr int kFormatVersion = 1;

using textnorm::RawSegment;

struct RoundTripRecord {
  std::string system_id;
  std::string segment_id;
  RawSegment input;       // source-language x
  RawSegment ft_output;   // target-language system output
  RawSegment round_trip;  // source-language backward translation of ft_output
  std::string bt_provider_id;
  std::string cache_key;

  bool operator==(const RoundTripRecord&) const = default;
};

enum class MetricId { kBleu, kSentBleu, kChrf, kSbert, kBertScore };

absl::string_view MetricName(MetricId metric);
// Accepts the names returned by MetricName; the error lists them.
absl::StatusOr<MetricId> ParseMetricId(absl::string_view name);
// Parses a comma-separated list, keeping order and dropping duplicates.
absl::StatusOr<std::vector<MetricId>> ParseMetricList(absl::string_view list);
std::vector<MetricId> AllMetrics();
bool IsSemantic(MetricId metric);

enum class Aggregation { kMeanOfSegments, kCorpusLevel };
absl::string_view AggregationName(Aggregation aggregation);
Aggregation AggregationFor(MetricId metric);

struct MetricScoreSet {
  MetricId metric = MetricId::kSentBleu;
  std::string system_id;
  std::vector<std::string> segment_ids;
  std::vector<double> segment_scores;  // aligned with segment_ids, 0-100
  double system_score = 0.0;
  Aggregation aggregation = Aggregation::kMeanOfSegments;
};

// Backward-translates `submission` into the test set's source language. On
// failure the error lists the failing segment ids; segments that succeeded
// are already cached by `bt`.
absl::StatusOr<std::vector<RoundTripRecord>> RunRoundTrip(
    const corpus::SystemSubmission& submission, const corpus::TestSet& testset,
    providers::TranslationService& bt);

// Maps a language tag to the embedding provider for that language, falling
// back to a default.
class EmbeddingRouter {
 public:
  void SetDefault(std::shared_ptr<providers::EmbeddingService> service);
  void Set(const std::string& lang,
           std::shared_ptr<providers::EmbeddingService> service);
  absl::StatusOr<providers::EmbeddingService*> For(absl::string_view lang) const;
  bool empty() const { return by_lang_.empty() && default_ == nullptr; }

 private:
  std::map<std::string, std::shared_ptr<providers::EmbeddingService>, std::less<>>
      by_lang_;
  std::shared_ptr<providers::EmbeddingService> default_;
};

struct ScoringResources {
  // Required for rtt-sbert and rtt-bertscore; serves both embedding levels.
  const EmbeddingRouter* embeddings = nullptr;
  int workers = 1;
  lexical::SentenceBleuSmoothing smoothing =
      lexical::SentenceBleuSmoothing::kAddOneAllOrders;
  // When set, receives the input-side idf table built for rtt-bertscore.
  semantic::IdfTable* idf_sink = nullptr;
};

// Scores one system's records (hyp = round trip, ref = input). Lexical
// inputs are lowercased and tokenized with the international tokenizer
// (Chinese split into characters first) for BLEU, and taken as mixed-case
// character streams for chrF. Semantic scores are scaled by 100.
absl::StatusOr<MetricScoreSet> ScoreMetric(MetricId metric,
                                           std::span<const RoundTripRecord> records,
                                           const ScoringResources& resources);

// Segment ids by descending score; ties by ascending id (numeric ids compare
// numerically). A segment's rank is its 1-based position.
std::vector<std::string> RankSegments(const MetricScoreSet& scores);

// Splits records by system, keeping first-appearance order.
std::vector<std::vector<RoundTripRecord>> GroupBySystem(
    std::span<const RoundTripRecord> records);

// JSON-lines persistence. Every line carries "format_version".
std::string RecordsToJsonl(std::span<const RoundTripRecord> records);
absl::StatusOr<std::vector<RoundTripRecord>> RecordsFromJsonl(
    absl::string_view jsonl);
std::string ScoresToJsonl(std::span<const MetricScoreSet> scores);
absl::StatusOr<std::vector<MetricScoreSet>> ScoresFromJsonl(
    absl::string_view jsonl);

}  // namespace rttqe::pipeline

#endif  // RTTQE_RTT_PIPELINE_H_
