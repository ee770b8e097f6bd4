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

#include "rttqe/cli.h"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/time/clock.h"
#include "absl/time/time.h"
#include "json.hpp"
#include "rttqe/cache.h"
#include "rttqe/config.h"
#include "rttqe/corpus_io.h"
#include "rttqe/providers.h"
#include "rttqe/rtt_pipeline.h"
#include "rttqe/semantic_metrics.h"
#include "rttqe/status_macros.h"

namespace rttqe::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using pipeline::MetricId;
using pipeline::MetricScoreSet;

constexpr char kManifest[] = "manifest.json";
constexpr char kRecords[] = "records.jsonl";
constexpr char kLockFile[] = ".lock";
constexpr char kUndefinedSmallN[] = "undefined (n<2)";
constexpr char kUndefinedConstant[] = "undefined (constant)";
constexpr char kNotAvailable[] = "-";

absl::StatusOr<std::string> ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path.string()));
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

absl::StatusOr<std::string> FileDigest(const std::string& path) {
  RTTQE_ASSIGN_OR_RETURN(std::string contents, ReadFile(path));
  return Sha256Hex(contents);
}

absl::Status MakeDirectories(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot create directory ", dir.string(), ": ", ec.message()));
  }
  return absl::OkStatus();
}

// Exclusive ownership of a run directory for the lifetime of a command.
class RunDirLock {
 public:
  static absl::StatusOr<RunDirLock> Acquire(const fs::path& dir) {
    const fs::path path = dir / kLockFile;
    const int fd = ::open(path.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
      return absl::FailedPreconditionError(absl::StrCat(
          "run directory ", dir.string(), " is locked by another invocation "
          "(remove ", path.string(), " if it is stale)"));
    }
    const std::string pid = absl::StrCat(::getpid(), "\n");
    [[maybe_unused]] ssize_t written = ::write(fd, pid.data(), pid.size());
    ::close(fd);
    return RunDirLock(path);
  }

  RunDirLock(RunDirLock&& other) noexcept : path_(std::exchange(other.path_, {})) {}
  RunDirLock& operator=(RunDirLock&&) = delete;
  ~RunDirLock() {
    if (!path_.empty()) {
      std::error_code ec;
      fs::remove(path_, ec);
    }
  }

 private:
  explicit RunDirLock(fs::path path) : path_(std::move(path)) {}
  fs::path path_;
};

std::string FormatScore(double value) { return absl::StrFormat("%.6f", value); }

using Table = std::vector<std::vector<std::string>>;

std::string ToTsv(const Table& table) {
  std::string out;
  for (const auto& row : table) absl::StrAppend(&out, absl::StrJoin(row, "\t"), "\n");
  return out;
}

// Space-padded columns for the terminal.
std::string ToAligned(const Table& table) {
  std::vector<size_t> widths;
  for (const auto& row : table) {
    widths.resize(std::max(widths.size(), row.size()), 0);
    for (size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  std::string out;
  for (const auto& row : table) {
    std::string line;
    for (size_t c = 0; c < row.size(); ++c) {
      absl::StrAppend(&line, row[c]);
      if (c + 1 < row.size()) line.append(widths[c] - row[c].size() + 2, ' ');
    }
    absl::StrAppend(&out, line, "\n");
  }
  return out;
}

absl::StatusOr<json> ReadManifest(const fs::path& run_dir) {
  const fs::path path = run_dir / kManifest;
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    return absl::InvalidArgumentError(absl::StrCat(
        run_dir.string(), " is not a run directory (no ", kManifest, ")"));
  }
  RTTQE_ASSIGN_OR_RETURN(std::string text, ReadFile(path));
  json manifest = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (manifest.is_discarded() || !manifest.is_object() ||
      !manifest.contains("config_path") || !manifest["config_path"].is_string()) {
    return absl::InvalidArgumentError(absl::StrCat(path.string(), " is malformed"));
  }
  return manifest;
}

absl::Status WriteJson(const fs::path& path, const json& j) {
  return WriteFileAtomically(path, j.dump(2) + "\n");
}

// A relative config_path in the manifest is relative to the run directory.
absl::StatusOr<config::RunConfig> ConfigForRun(const json& manifest,
                                               const fs::path& run_dir,
                                               const std::string& override_path) {
  if (!override_path.empty()) return config::LoadRunConfig(override_path);
  fs::path recorded(manifest["config_path"].get<std::string>());
  if (recorded.is_relative()) recorded = run_dir / recorded;
  return config::LoadRunConfig(recorded.lexically_normal().string());
}

json ProviderJson(const providers::ProviderConfig& p) {
  // The credential itself is never recorded, only where it is read from.
  json j = {{"id", p.provider_id}, {"type", p.type}};
  if (!p.endpoint.empty()) j["endpoint"] = p.endpoint;
  if (!p.path.empty()) j["path"] = p.path;
  if (p.UsesNetwork()) j["credential_variable"] = providers::CredentialVariable(p);
  return j;
}

absl::StatusOr<std::vector<pipeline::RoundTripRecord>> LoadRecords(
    const fs::path& run_dir) {
  RTTQE_ASSIGN_OR_RETURN(std::string text, ReadFile(run_dir / kRecords));
  auto records = pipeline::RecordsFromJsonl(text);
  if (!records.ok()) {
    return absl::InvalidArgumentError(absl::StrCat(
        (run_dir / kRecords).string(), ": ", records.status().message()));
  }
  if (records->empty()) {
    return absl::FailedPreconditionError(
        absl::StrCat((run_dir / kRecords).string(), " holds no records"));
  }
  return records;
}

std::string ScoreFileName(MetricId metric) {
  return absl::StrCat("scores.", pipeline::MetricName(metric), ".jsonl");
}

struct EmbeddingServices {
  pipeline::EmbeddingRouter router;
  std::vector<std::shared_ptr<providers::EmbeddingService>> services;

  int64_t Requests() const {
    int64_t n = 0;
    for (const auto& s : services) n += s->stats().requests;
    return n;
  }
};

absl::StatusOr<std::unique_ptr<EmbeddingServices>> MakeEmbeddingServices(
    const config::RunConfig& cfg, std::shared_ptr<DiskCache> cache, bool offline) {
  auto out = std::make_unique<EmbeddingServices>();
  for (const auto& [lang, provider] : cfg.embeddings) {
    RTTQE_ASSIGN_OR_RETURN(auto service,
                           providers::MakeEmbeddingService(provider, cache, offline));
    std::shared_ptr<providers::EmbeddingService> shared(std::move(service));
    out->services.push_back(shared);
    if (lang == "default") {
      out->router.SetDefault(shared);
    } else {
      out->router.Set(lang, shared);
    }
  }
  return out;
}

bool AnySemantic(const std::vector<MetricId>& metrics) {
  return std::any_of(metrics.begin(), metrics.end(), pipeline::IsSemantic);
}

// Per-run inputs of the evaluate command.
struct RunData {
  std::string pair;
  std::vector<std::string> systems;
  std::map<MetricId, std::vector<MetricScoreSet>> scores;
  corpus::HumanJudgmentSet human;
  std::map<std::string, double> human_system_scores;
  std::string human_source = "none";
};

absl::StatusOr<RunData> LoadRunForEvaluation(const fs::path& run_dir,
                                             const std::string& config_override) {
  RTTQE_ASSIGN_OR_RETURN(json manifest, ReadManifest(run_dir));
  RTTQE_ASSIGN_OR_RETURN(config::RunConfig cfg,
                         ConfigForRun(manifest, run_dir, config_override));
  RTTQE_RETURN_IF_ERROR(
      config::ValidatePaths(cfg, {.inputs = false, .embeddings = false, .human = true}));
  if (cfg.da.empty() && cfg.darr.empty() && cfg.win_ratios.empty()) {
    return absl::InvalidArgumentError(absl::StrCat(
        cfg.config_path, ": [human] names no DA, daRR or win-ratio file"));
  }
  RTTQE_ASSIGN_OR_RETURN(auto records, LoadRecords(run_dir));

  RunData run;
  run.pair = cfg.pair.Tag();
  std::set<std::string> systems, segments;
  for (const auto& r : records) {
    if (systems.insert(r.system_id).second) run.systems.push_back(r.system_id);
    segments.insert(r.segment_id);
  }
  for (MetricId metric : pipeline::AllMetrics()) {
    const fs::path path = run_dir / ScoreFileName(metric);
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) continue;
    RTTQE_ASSIGN_OR_RETURN(std::string text, ReadFile(path));
    auto sets = pipeline::ScoresFromJsonl(text);
    if (!sets.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat(path.string(), ": ", sets.status().message()));
    }
    for (const MetricScoreSet& s : *sets) {
      if (!systems.contains(s.system_id)) {
        return absl::InvalidArgumentError(absl::StrCat(
            path.string(), ": system '", s.system_id, "' has no round-trip records"));
      }
    }
    run.scores[metric] = std::move(*sets);
  }
  if (run.scores.empty()) {
    return absl::FailedPreconditionError(absl::StrCat(
        run_dir.string(), " has no score files; run 'rttqe score' first"));
  }
  RTTQE_ASSIGN_OR_RETURN(run.human,
                         corpus::LoadHumanJudgments(cfg.da, cfg.darr, systems, segments));
  if (!cfg.win_ratios.empty()) {
    RTTQE_ASSIGN_OR_RETURN(auto ratios, corpus::LoadWinRatios(cfg.win_ratios, systems));
    run.human.win_ratios = ratios;
    run.human_system_scores = std::move(ratios);
    run.human_source = "win_ratios";
  } else if (!cfg.da.empty()) {
    run.human_system_scores = run.human.da_system_scores;
    run.human_source = "da";
  }
  return run;
}

json TopNJson(const std::vector<meta::TopNPoint>& curve) {
  json points = json::array();
  for (const auto& p : curve) {
    points.push_back({{"n", p.n}, {"r", p.r ? json(*p.r) : json(kUndefinedConstant)}});
  }
  return points;
}

std::string TopNCsv(const std::vector<meta::TopNPoint>& curve) {
  std::string csv = "n,r\n";
  for (const auto& p : curve) {
    absl::StrAppend(&csv, p.n, ",", p.r ? FormatScore(*p.r) : "undefined", "\n");
  }
  return csv;
}

absl::StatusOr<std::vector<MetricId>> MetricsOrDefault(
    const std::string& flag, const std::vector<MetricId>& fallback) {
  if (flag.empty()) return fallback;
  return pipeline::ParseMetricList(flag);
}

}  // namespace

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return kExitOk;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kFailedPrecondition:
    case absl::StatusCode::kAlreadyExists:
    case absl::StatusCode::kOutOfRange:
      return kExitUsage;
    case absl::StatusCode::kNotFound:
      return kExitMissingResource;
    case absl::StatusCode::kUnavailable:
    case absl::StatusCode::kDataLoss:
    case absl::StatusCode::kDeadlineExceeded:
    case absl::StatusCode::kResourceExhausted:
    case absl::StatusCode::kPermissionDenied:
    case absl::StatusCode::kUnauthenticated:
      return kExitProvider;
    default:
      return kExitInternal;
  }
}

absl::Status CmdRoundTrip(const RoundTripOptions& options, std::ostream& out) {
  RTTQE_ASSIGN_OR_RETURN(config::RunConfig cfg, config::LoadRunConfig(options.config_path));
  RTTQE_RETURN_IF_ERROR(config::ValidatePaths(cfg, {.inputs = true}));

  fs::path run_dir(options.run_dir);
  if (run_dir.empty()) {
    const std::string stamp =
        absl::FormatTime("%Y%m%dT%H%M%SZ", absl::Now(), absl::UTCTimeZone());
    run_dir = fs::path(cfg.output_dir) / absl::StrCat("run-", stamp);
    for (int k = 2; fs::exists(run_dir); ++k) {
      run_dir = fs::path(cfg.output_dir) / absl::StrCat("run-", stamp, "-", k);
    }
  }
  if (fs::exists(run_dir / kManifest) || fs::exists(run_dir / kRecords)) {
    return absl::AlreadyExistsError(absl::StrCat(
        "run directory ", run_dir.string(), " already holds a run; choose another"));
  }
  RTTQE_RETURN_IF_ERROR(MakeDirectories(run_dir));
  RTTQE_ASSIGN_OR_RETURN(RunDirLock lock, RunDirLock::Acquire(run_dir));

  RTTQE_ASSIGN_OR_RETURN(corpus::TestSet testset,
                         corpus::LoadTestSet(cfg.source, cfg.pair, cfg.reference));
  auto cache = std::make_shared<DiskCache>(cfg.cache_dir);
  RTTQE_ASSIGN_OR_RETURN(auto bt,
                         providers::MakeTranslationService(cfg.bt, cache, options.offline));

  json manifest = {{"format_version", pipeline::kFormatVersion},
                   {"tool", "rttqe"},
                   {"created_at", absl::FormatTime(absl::RFC3339_sec, absl::Now(),
                                                   absl::UTCTimeZone())},
                   {"config_path", cfg.config_path},
                   {"pair", cfg.pair.Tag()},
                   {"cache_dir", cfg.cache_dir},
                   {"bt_provider", ProviderJson(cfg.bt)},
                   {"offline", options.offline}};
  RTTQE_ASSIGN_OR_RETURN(manifest["config_sha256"], FileDigest(cfg.config_path));
  manifest["testset"] = {{"source", cfg.source}, {"segments", testset.sources.size()}};
  RTTQE_ASSIGN_OR_RETURN(manifest["testset"]["source_sha256"], FileDigest(cfg.source));
  json embedding = json::object();
  for (const auto& [lang, p] : cfg.embeddings) embedding[lang] = ProviderJson(p);
  manifest["embedding_providers"] = embedding;

  std::vector<pipeline::RoundTripRecord> records;
  json systems = json::array();
  for (const auto& [system, path] : cfg.submissions) {
    RTTQE_ASSIGN_OR_RETURN(corpus::SystemSubmission submission,
                           corpus::LoadSystemOutputs(path, system, testset));
    auto system_records = pipeline::RunRoundTrip(submission, testset, *bt);
    if (!system_records.ok()) {
      const auto stats = bt->stats();
      out << "roundtrip: " << stats.requests << " requests issued before failure; "
          << "completed translations are cached\n";
      return system_records.status();
    }
    records.insert(records.end(), std::make_move_iterator(system_records->begin()),
                   std::make_move_iterator(system_records->end()));
    RTTQE_ASSIGN_OR_RETURN(std::string digest, FileDigest(path));
    systems.push_back({{"id", system}, {"path", path}, {"sha256", digest}});
  }
  manifest["systems"] = systems;

  const std::string jsonl = pipeline::RecordsToJsonl(records);
  RTTQE_RETURN_IF_ERROR(WriteFileAtomically(run_dir / kRecords, jsonl));
  manifest["records_sha256"] = Sha256Hex(jsonl);
  const auto stats = bt->stats();
  manifest["bt_stats"] = {{"requests", stats.requests},
                          {"cache_hits", stats.cache_hits},
                          {"cache_misses", stats.cache_misses}};
  RTTQE_RETURN_IF_ERROR(WriteJson(run_dir / kManifest, manifest));

  out << "roundtrip: " << cfg.submissions.size() << " systems, " << records.size()
      << " segments, " << stats.requests << " requests issued, " << stats.cache_hits
      << " cache hits\n"
      << "run directory: " << run_dir.string() << "\n";
  return absl::OkStatus();
}

absl::Status CmdScore(const ScoreOptions& options, std::ostream& out) {
  const fs::path run_dir(options.run_dir);
  RTTQE_ASSIGN_OR_RETURN(json manifest, ReadManifest(run_dir));
  RTTQE_ASSIGN_OR_RETURN(config::RunConfig cfg,
                         ConfigForRun(manifest, run_dir, options.config_path));
  RTTQE_ASSIGN_OR_RETURN(std::vector<MetricId> metrics,
                         MetricsOrDefault(options.metrics, cfg.metrics));
  const bool semantic = AnySemantic(metrics);
  if (semantic) {
    RTTQE_RETURN_IF_ERROR(config::ValidatePaths(cfg, {.inputs = false, .embeddings = true}));
  }
  RTTQE_ASSIGN_OR_RETURN(RunDirLock lock, RunDirLock::Acquire(run_dir));
  RTTQE_ASSIGN_OR_RETURN(auto records, LoadRecords(run_dir));
  const auto groups = pipeline::GroupBySystem(records);

  std::unique_ptr<EmbeddingServices> embeddings;
  if (semantic) {
    auto cache = std::make_shared<DiskCache>(cfg.cache_dir);
    RTTQE_ASSIGN_OR_RETURN(embeddings, MakeEmbeddingServices(cfg, cache, options.offline));
  }
  pipeline::ScoringResources resources;
  resources.workers = cfg.workers;
  resources.embeddings = embeddings ? &embeddings->router : nullptr;

  Table summary = {{"system"}};
  for (const auto& group : groups) summary.push_back({group.front().system_id});
  json score_digests = manifest.value("scores", json::object());
  for (MetricId metric : metrics) {
    summary[0].emplace_back(pipeline::MetricName(metric));
    std::vector<MetricScoreSet> sets;
    for (size_t g = 0; g < groups.size(); ++g) {
      RTTQE_ASSIGN_OR_RETURN(MetricScoreSet set,
                             pipeline::ScoreMetric(metric, groups[g], resources));
      summary[g + 1].push_back(FormatScore(set.system_score));
      sets.push_back(std::move(set));
    }
    const std::string jsonl = pipeline::ScoresToJsonl(sets);
    RTTQE_RETURN_IF_ERROR(WriteFileAtomically(run_dir / ScoreFileName(metric), jsonl));
    score_digests[std::string(pipeline::MetricName(metric))] = Sha256Hex(jsonl);
  }
  RTTQE_RETURN_IF_ERROR(WriteFileAtomically(run_dir / "summary.tsv", ToTsv(summary)));
  manifest["scores"] = score_digests;
  RTTQE_RETURN_IF_ERROR(WriteJson(run_dir / kManifest, manifest));

  out << ToAligned(summary);
  out << "score: " << (embeddings ? embeddings->Requests() : 0)
      << " embedding requests issued\n";
  return absl::OkStatus();
}

absl::Status CmdEvaluate(const EvaluateOptions& options, std::ostream& out) {
  if (options.run_dirs.empty()) return absl::InvalidArgumentError("no run directory given");
  if (options.min_top_n < 2) return absl::InvalidArgumentError("--min-top-n must be >= 2");
  std::vector<RunData> runs;
  std::set<std::string> pairs_seen;
  for (const std::string& dir : options.run_dirs) {
    RTTQE_ASSIGN_OR_RETURN(RunData run, LoadRunForEvaluation(dir, options.config_path));
    if (!pairs_seen.insert(run.pair).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("two run directories cover language pair ", run.pair));
    }
    runs.push_back(std::move(run));
  }
  const fs::path out_dir = options.out_dir.empty()
                               ? fs::path(options.run_dirs.front()) / "report"
                               : fs::path(options.out_dir);
  RTTQE_RETURN_IF_ERROR(MakeDirectories(out_dir));

  std::vector<MetricId> metrics;
  for (MetricId m : pipeline::AllMetrics()) {
    for (const RunData& run : runs) {
      if (run.scores.contains(m)) {
        metrics.push_back(m);
        break;
      }
    }
  }

  Table pearson = {{"metric"}}, tau = {{"metric"}};
  Table variance = {{"pair", "system", "metric", "variance_x1e-4"}};
  Table da_variance = {{"pair", "systems", "variance"}};
  for (const RunData& run : runs) {
    pearson[0].push_back(run.pair);
    tau[0].push_back(run.pair);
  }
  json report = {{"format_version", pipeline::kFormatVersion},
                 {"min_top_n", options.min_top_n},
                 {"tie_policy", options.ties == meta::TiePolicy::kDiscordant
                                    ? "ties_discordant"
                                    : "ties_ignored"}};
  json pairs_json = json::object();
  std::map<std::string, std::string> topn_files;

  for (const RunData& run : runs) {
    json pj = {{"systems", run.systems}, {"human_score_source", run.human_source}};
    if (run.human.da_system_scores.size() >= 2) {
      RTTQE_ASSIGN_OR_RETURN(double v, meta::DaVarianceAnalysis(run.human));
      pj["da_variance"] = v;
      da_variance.push_back({run.pair, absl::StrCat(run.human.da_system_scores.size()),
                             FormatScore(v)});
    } else if (!run.human.da_system_scores.empty()) {
      pj["da_variance"] = kUndefinedSmallN;
      da_variance.push_back({run.pair, "1", kUndefinedSmallN});
    }
    pj["metrics"] = json::object();
    for (MetricId metric : metrics) {
      const std::string name(pipeline::MetricName(metric));
      json mj = json::object();
      auto it = run.scores.find(metric);
      if (it == run.scores.end()) {
        pj["metrics"][name] = nullptr;
        continue;
      }
      std::map<std::string, double> system_scores;
      meta::SegmentScores segment_scores;
      for (const MetricScoreSet& s : it->second) {
        system_scores[s.system_id] = s.system_score;
        for (size_t i = 0; i < s.segment_ids.size(); ++i) {
          segment_scores[{s.system_id, s.segment_ids[i]}] = s.segment_scores[i];
        }
        std::vector<double> unit(s.segment_scores.size());
        std::transform(s.segment_scores.begin(), s.segment_scores.end(), unit.begin(),
                       [](double x) { return x / 100.0; });
        auto var = meta::ScoreVariance(unit);
        const std::string cell = var.ok() ? FormatScore(*var * 1e4) : kUndefinedSmallN;
        variance.push_back({run.pair, s.system_id, name, cell});
        mj["variance_x1e-4"][s.system_id] = var.ok() ? json(*var * 1e4) : json(cell);
      }
      mj["system_scores"] = system_scores;

      std::string pearson_cell = kNotAvailable;
      if (!run.human_system_scores.empty()) {
        auto corr = meta::SystemLevelPearson(system_scores, run.human_system_scores);
        if (corr.ok()) {
          pearson_cell = FormatScore(corr->r);
          json pairing = json::array();
          for (const auto& row : corr->pairing) {
            pairing.push_back({{"system", row.system_id},
                               {"metric", row.metric_score},
                               {"human", row.human_score}});
          }
          mj["pearson"] = {{"r", corr->r}, {"n", corr->n}, {"pairing", pairing}};
        } else if (corr.status().code() == absl::StatusCode::kFailedPrecondition) {
          pearson_cell = system_scores.size() < 2 ? kUndefinedSmallN : kUndefinedConstant;
          mj["pearson"] = pearson_cell;
        } else {
          return absl::InvalidArgumentError(
              absl::StrCat(run.pair, " ", name, ": ", corr.status().message()));
        }
        if (static_cast<int>(system_scores.size()) >= options.min_top_n) {
          RTTQE_ASSIGN_OR_RETURN(auto curve,
                                 meta::TopNCurve(system_scores, run.human_system_scores,
                                                 options.min_top_n));
          mj["topn"] = TopNJson(curve);
          topn_files[absl::StrCat("topn.", run.pair, ".", name, ".csv")] = TopNCsv(curve);
        } else {
          mj["topn"] = absl::StrCat("skipped (fewer than ", options.min_top_n, " systems)");
        }
      }

      std::string tau_cell = kNotAvailable;
      if (!run.human.darr_pairs.empty()) {
        auto t = meta::KendallTauDarr(segment_scores, run.human.darr_pairs, options.ties);
        if (t.ok()) {
          tau_cell = FormatScore(t->tau);
          mj["tau"] = {{"tau", t->tau},
                       {"concordant", t->concordant},
                       {"discordant", t->discordant},
                       {"ties", t->ties}};
        } else if (t.status().code() == absl::StatusCode::kFailedPrecondition) {
          tau_cell = "undefined (all ties)";
          mj["tau"] = tau_cell;
        } else {
          return absl::InvalidArgumentError(
              absl::StrCat(run.pair, " ", name, ": ", t.status().message()));
        }
      }
      pj["metrics"][name] = mj;

      auto row_for = [&](Table& table) -> std::vector<std::string>& {
        for (auto& row : table) {
          if (row.front() == name) return row;
        }
        table.push_back({name});
        table.back().resize(runs.size() + 1, kNotAvailable);
        return table.back();
      };
      const size_t col = static_cast<size_t>(&run - runs.data()) + 1;
      row_for(pearson)[col] = pearson_cell;
      row_for(tau)[col] = tau_cell;
    }
    pairs_json[run.pair] = pj;
  }
  report["pairs"] = pairs_json;

  RTTQE_RETURN_IF_ERROR(WriteFileAtomically(out_dir / "pearson.tsv", ToTsv(pearson)));
  RTTQE_RETURN_IF_ERROR(WriteFileAtomically(out_dir / "tau.tsv", ToTsv(tau)));
  RTTQE_RETURN_IF_ERROR(WriteFileAtomically(out_dir / "variance.tsv", ToTsv(variance)));
  RTTQE_RETURN_IF_ERROR(
      WriteFileAtomically(out_dir / "da_variance.tsv", ToTsv(da_variance)));
  for (const auto& [file, csv] : topn_files) {
    RTTQE_RETURN_IF_ERROR(WriteFileAtomically(out_dir / file, csv));
  }
  RTTQE_RETURN_IF_ERROR(WriteJson(out_dir / "report.json", report));

  out << "System-level Pearson r\n" << ToAligned(pearson) << "\n"
      << "Segment-level Kendall tau (daRR)\n" << ToAligned(tau) << "\n"
      << "report written to " << out_dir.string() << "\n";
  return absl::OkStatus();
}

absl::Status CmdParaphrase(const ParaphraseOptions& options, std::ostream& out) {
  RTTQE_ASSIGN_OR_RETURN(std::vector<corpus::ParaphrasePair> pairs,
                         corpus::LoadPaws(options.paws_path));
  if (pairs.empty()) {
    return absl::InvalidArgumentError(absl::StrCat(options.paws_path, " has no pairs"));
  }
  std::optional<config::RunConfig> cfg;
  if (!options.config_path.empty()) {
    RTTQE_ASSIGN_OR_RETURN(cfg, config::LoadRunConfig(options.config_path));
  }
  const std::vector<MetricId> lexical = {MetricId::kBleu, MetricId::kSentBleu,
                                         MetricId::kChrf};
  RTTQE_ASSIGN_OR_RETURN(std::vector<MetricId> metrics,
                         MetricsOrDefault(options.metrics, cfg ? cfg->metrics : lexical));

  std::unique_ptr<EmbeddingServices> embeddings;
  if (AnySemantic(metrics)) {
    if (!cfg) {
      return absl::NotFoundError(
          "semantic metrics need embedding providers; pass --config");
    }
    RTTQE_RETURN_IF_ERROR(
        config::ValidatePaths(*cfg, {.inputs = false, .embeddings = true}));
    auto cache = std::make_shared<DiskCache>(cfg->cache_dir);
    RTTQE_ASSIGN_OR_RETURN(embeddings, MakeEmbeddingServices(*cfg, cache, options.offline));
  }

  // sentence1 plays the input, sentence2 the round trip.
  std::vector<pipeline::RoundTripRecord> records;
  std::vector<int> labels;
  for (const auto& p : pairs) {
    pipeline::RoundTripRecord r;
    r.system_id = "paraphrase";
    r.segment_id = p.id;
    r.input = {p.id, p.sentence1, options.lang};
    r.ft_output = {p.id, "", options.lang};
    r.round_trip = {p.id, p.sentence2, options.lang};
    records.push_back(std::move(r));
    labels.push_back(p.label);
  }

  const fs::path out_dir =
      options.out_dir.empty() ? fs::path("paraphrase-report") : fs::path(options.out_dir);
  RTTQE_RETURN_IF_ERROR(MakeDirectories(out_dir));

  semantic::IdfTable idf;
  pipeline::ScoringResources resources;
  resources.workers = cfg ? cfg->workers : 1;
  resources.embeddings = embeddings ? &embeddings->router : nullptr;
  resources.idf_sink = &idf;

  Table auc_table = {{"metric", "auc_pr"}};
  int64_t positives = std::count(labels.begin(), labels.end(), 1);
  json report = {{"format_version", pipeline::kFormatVersion},
                 {"pairs", pairs.size()},
                 {"positives", positives}};
  for (MetricId metric : metrics) {
    const std::string name(pipeline::MetricName(metric));
    RTTQE_ASSIGN_OR_RETURN(MetricScoreSet set,
                           pipeline::ScoreMetric(metric, records, resources));
    RTTQE_ASSIGN_OR_RETURN(meta::PrCurve curve, meta::PrAuc(set.segment_scores, labels));
    auc_table.push_back({name, FormatScore(curve.auc)});
    std::string csv = "recall,precision\n";
    json points = json::array();
    for (const auto& p : curve.points) {
      absl::StrAppend(&csv, FormatScore(p.recall), ",", FormatScore(p.precision), "\n");
      points.push_back({p.recall, p.precision});
    }
    RTTQE_RETURN_IF_ERROR(WriteFileAtomically(out_dir / absl::StrCat("pr.", name, ".csv"), csv));
    report["metrics"][name] = {{"auc", curve.auc}, {"points", points}};
  }
  if (std::find(metrics.begin(), metrics.end(), MetricId::kBertScore) != metrics.end()) {
    std::string dump = absl::StrCat("# corpus_size\t", idf.corpus_size(), "\n",
                                    "# default_weight\t", FormatScore(idf.default_weight()),
                                    "\n", "wordpiece\tidf\n");
    for (const auto& [piece, weight] : idf.weights()) {
      absl::StrAppend(&dump, piece, "\t", FormatScore(weight), "\n");
    }
    RTTQE_RETURN_IF_ERROR(WriteFileAtomically(out_dir / "idf.tsv", dump));
  }
  RTTQE_RETURN_IF_ERROR(WriteFileAtomically(out_dir / "auc.tsv", ToTsv(auc_table)));
  RTTQE_RETURN_IF_ERROR(WriteJson(out_dir / "report.json", report));
  out << ToAligned(auc_table) << "report written to " << out_dir.string() << "\n";
  return absl::OkStatus();
}

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reference-free translation quality estimation by round-trip translation",
               "rttqe"};
  app.require_subcommand(1);

  RoundTripOptions rt;
  auto* roundtrip = app.add_subcommand("roundtrip", "Backward-translate every submission");
  roundtrip->add_option("--config", rt.config_path, "Run configuration (TOML)")->required();
  roundtrip->add_option("--run-dir", rt.run_dir, "Run directory to create");
  roundtrip->add_flag("--offline", rt.offline, "Serve network providers from cache only");

  ScoreOptions sc;
  auto* score = app.add_subcommand("score", "Score round trips with the chosen metrics");
  score->add_option("--run-dir", sc.run_dir, "Run directory")->required();
  score->add_option("--config", sc.config_path, "Override the recorded configuration");
  score->add_option("--metrics", sc.metrics,
                    "Comma list from rtt-bleu, rtt-sentbleu, rtt-chrf, rtt-sbert, "
                    "rtt-bertscore");
  score->add_flag("--offline", sc.offline, "Serve network providers from cache only");

  EvaluateOptions ev;
  bool ignore_ties = false;
  auto* evaluate = app.add_subcommand("evaluate", "Correlate scores with human judgments");
  evaluate->add_option("--run-dir", ev.run_dirs, "Run directory (repeat per pair)")
      ->required();
  evaluate->add_option("--config", ev.config_path, "Override the recorded configuration");
  evaluate->add_option("--out", ev.out_dir, "Report directory");
  evaluate->add_option("--min-top-n", ev.min_top_n, "Smallest top-n system set")
      ->check(CLI::Range(2, 1000000));
  evaluate->add_flag("--ignore-ties", ignore_ties, "Drop metric ties from tau");

  ParaphraseOptions pp;
  auto* paraphrase = app.add_subcommand("paraphrase", "AUC-PR on paraphrase pairs");
  paraphrase->add_option("--paws", pp.paws_path, "TSV with id, sentence1, sentence2, label")
      ->required();
  paraphrase->add_option("--config", pp.config_path, "Configuration with embedding providers");
  paraphrase->add_option("--metrics", pp.metrics, "Comma list of metrics");
  paraphrase->add_option("--out", pp.out_dir, "Report directory");
  paraphrase->add_option("--lang", pp.lang, "Language tag of the pairs");
  paraphrase->add_flag("--offline", pp.offline, "Serve network providers from cache only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  ev.ties = ignore_ties ? meta::TiePolicy::kIgnore : meta::TiePolicy::kDiscordant;

  absl::Status status;
  std::string command;
  if (roundtrip->parsed()) {
    command = "roundtrip";
    status = CmdRoundTrip(rt, out);
  } else if (score->parsed()) {
    command = "score";
    status = CmdScore(sc, out);
  } else if (evaluate->parsed()) {
    command = "evaluate";
    status = CmdEvaluate(ev, out);
  } else {
    command = "paraphrase";
    status = CmdParaphrase(pp, out);
  }
  if (status.ok()) return kExitOk;
  const int code = ExitCodeFor(status);
  err << "rttqe " << command << ": error [" << absl::StatusCodeToString(status.code())
      << "]: " << status.message() << "\n"
      << "exit code " << code << "\n";
  return code;
}

}  // namespace rttqe::cli
