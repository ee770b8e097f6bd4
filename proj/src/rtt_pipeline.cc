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

#include "rttqe/rtt_pipeline.h"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "json.hpp"
#include "parallel.h"
#include "rttqe/cache.h"
#include "rttqe/semantic_metrics.h"
#include "rttqe/status_macros.h"

namespace rttqe::pipeline {
namespace {

using json = nlohmann::json;

constexpr MetricId kAllMetrics[] = {MetricId::kBleu, MetricId::kSentBleu,
                                    MetricId::kChrf, MetricId::kSbert,
                                    MetricId::kBertScore};

// Pieces of text the lexical metrics see.
struct LexicalView {
  textnorm::TokenSequence words;  // BLEU tokens
  textnorm::TokenSequence chars;  // chrF character stream
};

LexicalView ViewOf(const RawSegment& segment) {
  const bool chinese = segment.lang == "zh" || absl::StartsWith(segment.lang, "zh-");
  const std::string text =
      chinese ? textnorm::SplitCjkChars(segment.text) : segment.text;
  return {textnorm::Tokenize(text, textnorm::TokenizationScheme::kIntl,
                             /*lowercase=*/true),
          textnorm::CharStream(segment.text)};
}

// Identical empty texts count as a perfect round trip; an empty side
// against a non-empty one scores 0.
std::optional<double> EmptyCase(const textnorm::TokenSequence& hyp,
                                const textnorm::TokenSequence& ref) {
  if (hyp.empty() && ref.empty()) return 100.0;
  if (hyp.empty() || ref.empty()) return 0.0;
  return std::nullopt;
}

absl::StatusOr<MetricScoreSet> ScoreLexical(MetricId metric,
                                            std::span<const RoundTripRecord> records,
                                            const ScoringResources& resources,
                                            MetricScoreSet set) {
  const size_t n = records.size();
  std::vector<lexical::TokenPair> pairs(n);
  std::vector<absl::StatusOr<double>> scores(n, 0.0);
  internal::ParallelFor(n, resources.workers, [&](size_t i) {
    LexicalView hyp = ViewOf(records[i].round_trip);
    LexicalView ref = ViewOf(records[i].input);
    const bool chrf = metric == MetricId::kChrf;
    lexical::TokenPair& pair = pairs[i];
    pair.hyp = std::move(chrf ? hyp.chars : hyp.words);
    pair.ref = std::move(chrf ? ref.chars : ref.words);
    if (auto fixed = EmptyCase(pair.hyp, pair.ref)) {
      scores[i] = *fixed;
    } else if (metric == MetricId::kSentBleu) {
      scores[i] = lexical::SentenceBleu(pair.hyp, pair.ref, resources.smoothing);
    } else if (metric == MetricId::kBleu) {
      scores[i] = lexical::BleuFromStats(lexical::ComputeBleuStats(pair.hyp, pair.ref));
    } else {
      scores[i] = lexical::Chrf(pair.hyp, pair.ref);
    }
  });
  for (size_t i = 0; i < n; ++i) {
    if (!scores[i].ok()) {
      return absl::Status(scores[i].status().code(),
                          absl::StrCat("segment ", records[i].segment_id, ": ",
                                       scores[i].status().message()));
    }
    set.segment_scores.push_back(*scores[i]);
  }

  if (set.aggregation == Aggregation::kMeanOfSegments) {
    set.system_score = std::accumulate(set.segment_scores.begin(),
                                       set.segment_scores.end(), 0.0) /
                       static_cast<double>(n);
    return set;
  }
  int64_t hyp_len = 0, ref_len = 0;
  for (const auto& p : pairs) {
    hyp_len += static_cast<int64_t>(p.hyp.size());
    ref_len += static_cast<int64_t>(p.ref.size());
  }
  if (hyp_len == 0 || ref_len == 0) {
    set.system_score = hyp_len == ref_len ? 100.0 : 0.0;
    return set;
  }
  auto corpus = metric == MetricId::kBleu ? lexical::CorpusBleu(pairs)
                                          : lexical::ChrfCorpus(pairs);
  if (!corpus.ok()) return corpus.status();
  set.system_score = *corpus;
  return set;
}

absl::StatusOr<MetricScoreSet> ScoreSemantic(MetricId metric,
                                             std::span<const RoundTripRecord> records,
                                             const ScoringResources& resources,
                                             MetricScoreSet set) {
  if (resources.embeddings == nullptr || resources.embeddings->empty()) {
    return absl::NotFoundError(absl::StrCat(
        MetricName(metric), " needs an embedding provider; none is configured"));
  }
  const std::string& lang = records.front().input.lang;
  RTTQE_ASSIGN_OR_RETURN(providers::EmbeddingService * service,
                         resources.embeddings->For(lang));
  const size_t n = records.size();
  std::vector<std::string> texts;
  texts.reserve(2 * n);
  for (const auto& r : records) texts.push_back(r.input.text);
  for (const auto& r : records) texts.push_back(r.round_trip.text);

  std::vector<absl::StatusOr<double>> scores(n, 0.0);
  if (metric == MetricId::kSbert) {
    RTTQE_ASSIGN_OR_RETURN(auto vectors, service->FetchSentenceEmbeddings(texts));
    internal::ParallelFor(n, resources.workers, [&](size_t i) {
      scores[i] = semantic::CosineSimilarity(vectors[i], vectors[n + i]);
    });
  } else {
    RTTQE_ASSIGN_OR_RETURN(auto tokens, service->FetchTokenEmbeddings(texts));
    std::vector<std::vector<std::string>> input_pieces;
    input_pieces.reserve(n);
    for (size_t i = 0; i < n; ++i) input_pieces.push_back(tokens[i].wordpieces);
    RTTQE_ASSIGN_OR_RETURN(semantic::IdfTable idf,
                           semantic::IdfTable::Build(input_pieces));
    if (resources.idf_sink != nullptr) *resources.idf_sink = idf;
    internal::ParallelFor(n, resources.workers, [&](size_t i) {
      auto match = semantic::GreedyMatchFScore(tokens[i], tokens[n + i], idf);
      scores[i] = match.ok() ? absl::StatusOr<double>(match->f)
                             : absl::StatusOr<double>(match.status());
    });
  }
  for (size_t i = 0; i < n; ++i) {
    if (!scores[i].ok()) {
      return absl::Status(scores[i].status().code(),
                          absl::StrCat("segment ", records[i].segment_id, ": ",
                                       scores[i].status().message()));
    }
    set.segment_scores.push_back(100.0 * *scores[i]);
  }
  set.system_score = std::accumulate(set.segment_scores.begin(),
                                     set.segment_scores.end(), 0.0) /
                     static_cast<double>(n);
  return set;
}

json SegmentToJson(const RawSegment& s) {
  return {{"id", s.id}, {"text", s.text}, {"lang", s.lang}};
}

absl::StatusOr<RawSegment> SegmentFromJson(const json& j, absl::string_view field) {
  if (!j.is_object() || !j.contains("id") || !j.contains("text") ||
      !j.contains("lang") || !j["id"].is_string() || !j["text"].is_string() ||
      !j["lang"].is_string()) {
    return absl::InvalidArgumentError(
        absl::StrCat("field '", field, "' is not a segment {id, text, lang}"));
  }
  return RawSegment{j["id"].get<std::string>(), j["text"].get<std::string>(),
                    j["lang"].get<std::string>()};
}

// Parses one JSON line and checks its format_version.
absl::StatusOr<json> ParseVersionedLine(absl::string_view line, size_t line_no) {
  json j = json::parse(line.begin(), line.end(), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError(absl::StrCat("line ", line_no, ": not a JSON object"));
  }
  if (!j.contains("format_version") || j["format_version"] != kFormatVersion) {
    return absl::InvalidArgumentError(absl::StrCat(
        "line ", line_no, ": unsupported format_version (expected ", kFormatVersion, ")"));
  }
  return j;
}

template <typename T>
absl::StatusOr<T> Field(const json& j, const char* name, size_t line_no) {
  auto it = j.find(name);
  if (it == j.end()) {
    return absl::InvalidArgumentError(
        absl::StrCat("line ", line_no, ": missing field '", name, "'"));
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    return absl::InvalidArgumentError(
        absl::StrCat("line ", line_no, ": field '", name, "' has the wrong type"));
  }
}

bool IdLess(const std::string& a, const std::string& b) {
  int64_t x = 0, y = 0;
  if (absl::SimpleAtoi(a, &x) && absl::SimpleAtoi(b, &y) && x != y) return x < y;
  return a < b;
}

}  // namespace

absl::string_view MetricName(MetricId metric) {
  switch (metric) {
    case MetricId::kBleu:
      return "rtt-bleu";
    case MetricId::kSentBleu:
      return "rtt-sentbleu";
    case MetricId::kChrf:
      return "rtt-chrf";
    case MetricId::kSbert:
      return "rtt-sbert";
    case MetricId::kBertScore:
      return "rtt-bertscore";
  }
  return "unknown";
}

absl::StatusOr<MetricId> ParseMetricId(absl::string_view name) {
  for (MetricId m : kAllMetrics) {
    if (MetricName(m) == name) return m;
  }
  std::vector<std::string> valid;
  for (MetricId m : kAllMetrics) valid.emplace_back(MetricName(m));
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown metric '", name, "'; valid metrics: ", absl::StrJoin(valid, ", ")));
}

absl::StatusOr<std::vector<MetricId>> ParseMetricList(absl::string_view list) {
  std::vector<MetricId> out;
  for (absl::string_view name : absl::StrSplit(list, ',', absl::SkipWhitespace())) {
    RTTQE_ASSIGN_OR_RETURN(MetricId m,
                           ParseMetricId(absl::StripAsciiWhitespace(name)));
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  if (out.empty()) return absl::InvalidArgumentError("empty metric list");
  return out;
}

std::vector<MetricId> AllMetrics() {
  return {std::begin(kAllMetrics), std::end(kAllMetrics)};
}

bool IsSemantic(MetricId metric) {
  return metric == MetricId::kSbert || metric == MetricId::kBertScore;
}

absl::string_view AggregationName(Aggregation aggregation) {
  return aggregation == Aggregation::kCorpusLevel ? "corpus_level"
                                                  : "mean_of_segments";
}

Aggregation AggregationFor(MetricId metric) {
  return metric == MetricId::kBleu || metric == MetricId::kChrf
             ? Aggregation::kCorpusLevel
             : Aggregation::kMeanOfSegments;
}

absl::StatusOr<std::vector<RoundTripRecord>> RunRoundTrip(
    const corpus::SystemSubmission& submission, const corpus::TestSet& testset,
    providers::TranslationService& bt) {
  if (submission.outputs.size() != testset.sources.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "system '", submission.system_id, "' has ", submission.outputs.size(),
        " outputs for ", testset.sources.size(), " source segments"));
  }
  if (!(submission.pair == testset.pair)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "system '", submission.system_id, "' is for ", submission.pair.Tag(),
        ", the test set for ", testset.pair.Tag()));
  }
  const std::string& src = testset.pair.src;
  const std::string& tgt = testset.pair.tgt;
  std::vector<std::string> texts;
  texts.reserve(submission.outputs.size());
  for (const RawSegment& s : submission.outputs) texts.push_back(s.text);

  auto translated = bt.TranslateEach(texts, tgt, src);
  std::vector<std::string> failed;
  const absl::Status* first = nullptr;
  for (size_t i = 0; i < translated.size(); ++i) {
    if (!translated[i].ok()) {
      failed.push_back(testset.sources[i].id);
      if (first == nullptr) first = &translated[i].status();
    }
  }
  if (first != nullptr) {
    return absl::Status(first->code(),
                        absl::StrCat("backward translation of system '",
                                     submission.system_id, "' failed at segments ",
                                     absl::StrJoin(failed, ","), ": ",
                                     first->message()));
  }

  const std::string& provider = bt.config().provider_id;
  std::vector<RoundTripRecord> records;
  records.reserve(texts.size());
  for (size_t i = 0; i < texts.size(); ++i) {
    const RawSegment& input = testset.sources[i];
    RoundTripRecord r;
    r.system_id = submission.system_id;
    r.segment_id = input.id;
    r.input = input;
    r.input.lang = src;
    r.ft_output = submission.outputs[i];
    r.ft_output.lang = tgt;
    r.round_trip = {input.id, std::move(*translated[i]), src};
    r.bt_provider_id = provider;
    r.cache_key = CacheKey::For(provider, tgt, src, texts[i]).hex;
    records.push_back(std::move(r));
  }
  return records;
}

void EmbeddingRouter::SetDefault(
    std::shared_ptr<providers::EmbeddingService> service) {
  default_ = std::move(service);
}

void EmbeddingRouter::Set(const std::string& lang,
                          std::shared_ptr<providers::EmbeddingService> service) {
  by_lang_[lang] = std::move(service);
}

absl::StatusOr<providers::EmbeddingService*> EmbeddingRouter::For(
    absl::string_view lang) const {
  if (auto it = by_lang_.find(lang); it != by_lang_.end()) return it->second.get();
  if (default_ != nullptr) return default_.get();
  return absl::NotFoundError(
      absl::StrCat("no embedding provider configured for language '", lang, "'"));
}

absl::StatusOr<MetricScoreSet> ScoreMetric(MetricId metric,
                                           std::span<const RoundTripRecord> records,
                                           const ScoringResources& resources) {
  if (records.empty()) return absl::InvalidArgumentError("no records to score");
  MetricScoreSet set;
  set.metric = metric;
  set.system_id = records.front().system_id;
  set.aggregation = AggregationFor(metric);
  for (const RoundTripRecord& r : records) {
    if (r.system_id != set.system_id) {
      return absl::InvalidArgumentError(absl::StrCat(
          "records mix systems '", set.system_id, "' and '", r.system_id, "'"));
    }
    if (r.input.lang != r.round_trip.lang) {
      return absl::InvalidArgumentError(absl::StrCat(
          "segment ", r.segment_id, ": round trip is '", r.round_trip.lang,
          "' but the input is '", r.input.lang, "'"));
    }
    set.segment_ids.push_back(r.segment_id);
  }
  if (IsSemantic(metric)) return ScoreSemantic(metric, records, resources, std::move(set));
  return ScoreLexical(metric, records, resources, std::move(set));
}

std::vector<std::string> RankSegments(const MetricScoreSet& scores) {
  std::vector<size_t> order(scores.segment_ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (scores.segment_scores[a] != scores.segment_scores[b]) {
      return scores.segment_scores[a] > scores.segment_scores[b];
    }
    return IdLess(scores.segment_ids[a], scores.segment_ids[b]);
  });
  std::vector<std::string> ids;
  ids.reserve(order.size());
  for (size_t i : order) ids.push_back(scores.segment_ids[i]);
  return ids;
}

std::vector<std::vector<RoundTripRecord>> GroupBySystem(
    std::span<const RoundTripRecord> records) {
  std::vector<std::vector<RoundTripRecord>> groups;
  std::map<std::string, size_t> index;
  for (const RoundTripRecord& r : records) {
    auto [it, inserted] = index.emplace(r.system_id, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(r);
  }
  return groups;
}

std::string RecordsToJsonl(std::span<const RoundTripRecord> records) {
  std::string out;
  for (const RoundTripRecord& r : records) {
    json j = {{"format_version", kFormatVersion},
              {"system", r.system_id},
              {"segment_id", r.segment_id},
              {"input", SegmentToJson(r.input)},
              {"ft_output", SegmentToJson(r.ft_output)},
              {"round_trip", SegmentToJson(r.round_trip)},
              {"bt_provider", r.bt_provider_id},
              {"cache_key", r.cache_key}};
    absl::StrAppend(&out, j.dump(), "\n");
  }
  return out;
}

absl::StatusOr<std::vector<RoundTripRecord>> RecordsFromJsonl(
    absl::string_view jsonl) {
  std::vector<RoundTripRecord> records;
  size_t line_no = 0;
  for (absl::string_view line : absl::StrSplit(jsonl, '\n')) {
    ++line_no;
    line = absl::StripSuffix(line, "\r");
    if (line.empty()) continue;
    RTTQE_ASSIGN_OR_RETURN(json j, ParseVersionedLine(line, line_no));
    RoundTripRecord r;
    RTTQE_ASSIGN_OR_RETURN(r.system_id, Field<std::string>(j, "system", line_no));
    RTTQE_ASSIGN_OR_RETURN(r.segment_id, Field<std::string>(j, "segment_id", line_no));
    RTTQE_ASSIGN_OR_RETURN(r.bt_provider_id,
                           Field<std::string>(j, "bt_provider", line_no));
    RTTQE_ASSIGN_OR_RETURN(r.cache_key, Field<std::string>(j, "cache_key", line_no));
    for (auto [name, slot] : {std::pair{"input", &r.input},
                              std::pair{"ft_output", &r.ft_output},
                              std::pair{"round_trip", &r.round_trip}}) {
      auto segment = SegmentFromJson(j.contains(name) ? j[name] : json(), name);
      if (!segment.ok()) {
        return absl::InvalidArgumentError(
            absl::StrCat("line ", line_no, ": ", segment.status().message()));
      }
      *slot = std::move(*segment);
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::string ScoresToJsonl(std::span<const MetricScoreSet> scores) {
  std::string out;
  for (const MetricScoreSet& s : scores) {
    json segments = json::array();
    for (size_t i = 0; i < s.segment_ids.size(); ++i) {
      segments.push_back({{"id", s.segment_ids[i]}, {"score", s.segment_scores[i]}});
    }
    json j = {{"format_version", kFormatVersion},
              {"metric", std::string(MetricName(s.metric))},
              {"system", s.system_id},
              {"aggregation", std::string(AggregationName(s.aggregation))},
              {"system_score", s.system_score},
              {"segments", std::move(segments)}};
    absl::StrAppend(&out, j.dump(), "\n");
  }
  return out;
}

absl::StatusOr<std::vector<MetricScoreSet>> ScoresFromJsonl(
    absl::string_view jsonl) {
  std::vector<MetricScoreSet> sets;
  size_t line_no = 0;
  for (absl::string_view line : absl::StrSplit(jsonl, '\n')) {
    ++line_no;
    line = absl::StripSuffix(line, "\r");
    if (line.empty()) continue;
    RTTQE_ASSIGN_OR_RETURN(json j, ParseVersionedLine(line, line_no));
    MetricScoreSet s;
    RTTQE_ASSIGN_OR_RETURN(std::string metric, Field<std::string>(j, "metric", line_no));
    RTTQE_ASSIGN_OR_RETURN(s.metric, ParseMetricId(metric));
    RTTQE_ASSIGN_OR_RETURN(s.system_id, Field<std::string>(j, "system", line_no));
    RTTQE_ASSIGN_OR_RETURN(std::string aggregation,
                           Field<std::string>(j, "aggregation", line_no));
    if (aggregation == AggregationName(Aggregation::kCorpusLevel)) {
      s.aggregation = Aggregation::kCorpusLevel;
    } else if (aggregation == AggregationName(Aggregation::kMeanOfSegments)) {
      s.aggregation = Aggregation::kMeanOfSegments;
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": unknown aggregation '", aggregation, "'"));
    }
    RTTQE_ASSIGN_OR_RETURN(s.system_score, Field<double>(j, "system_score", line_no));
    RTTQE_ASSIGN_OR_RETURN(json segments, Field<json>(j, "segments", line_no));
    if (!segments.is_array()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": 'segments' is not an array"));
    }
    for (const json& seg : segments) {
      RTTQE_ASSIGN_OR_RETURN(std::string id, Field<std::string>(seg, "id", line_no));
      RTTQE_ASSIGN_OR_RETURN(double score, Field<double>(seg, "score", line_no));
      s.segment_ids.push_back(std::move(id));
      s.segment_scores.push_back(score);
    }
    sets.push_back(std::move(s));
  }
  return sets;
}

}  // namespace rttqe::pipeline
