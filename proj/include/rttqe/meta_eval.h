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

// Meta-evaluation statistics: correlation of metric scores with human
// judgments, agreement with daRR pairs, top-n curves, score variance and
// precision-recall AUC for paraphrase detection.

#ifndef RTTQE_META_EVAL_H_
#define RTTQE_META_EVAL_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "rttqe/corpus_io.h"

namespace rttqe::meta {

// Product-moment correlation. Fails when the lengths differ, n < 2, or
// either sequence is constant.
absl::StatusOr<double> Pearson(std::span<const double> xs,
                               std::span<const double> ys);

struct PairingRow {
  std::string system_id;
  double metric_score = 0.0;
  double human_score = 0.0;
};

struct CorrelationReport {
  double r = 0.0;
  int64_t n = 0;
  std::vector<PairingRow> pairing;  // ordered by system id
};

// Pearson over systems. Both maps must cover the same systems.
absl::StatusOr<CorrelationReport> SystemLevelPearson(
    const std::map<std::string, double>& metric_scores,
    const std::map<std::string, double>& human_scores);

enum class TiePolicy {
  kDiscordant,  // WMT convention: a tied metric score counts against
  kIgnore,
};

struct TauReport {
  double tau = 0.0;
  int64_t concordant = 0;
  int64_t discordant = 0;
  int64_t ties = 0;  // metric ties, included in `discordant` under kDiscordant
};

// Keyed by (system id, segment id).
using SegmentScores = std::map<std::pair<std::string, std::string>, double>;

absl::StatusOr<TauReport> KendallTauDarr(
    const SegmentScores& scores, std::span<const corpus::DarrPair> pairs,
    TiePolicy ties = TiePolicy::kDiscordant);

struct TopNPoint {
  int n = 0;
  std::optional<double> r;  // empty when undefined (a constant sequence)
};

inline constexpr int kDefaultMinTopN = 4;

// Pearson over the n systems with the highest human score, for n from all
// systems down to `min_n`. Human-score ties are broken by system id.
absl::StatusOr<std::vector<TopNPoint>> TopNCurve(
    const std::map<std::string, double>& metric_scores,
    const std::map<std::string, double>& human_scores,
    int min_n = kDefaultMinTopN);

// Unbiased (n - 1) sample variance. Fails for n < 2.
absl::StatusOr<double> ScoreVariance(std::span<const double> values);

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

struct PrCurve {
  std::vector<PrPoint> points;  // starts at (0, 1); recall non-decreasing
  double auc = 0.0;
};

// Precision-recall curve with pairs ranked by descending score. Equal
// scores enter as one block. The area is the trapezoidal integral over
// recall.
absl::StatusOr<PrCurve> PrAuc(std::span<const double> scores,
                              std::span<const int> labels);

// Sample variance of the per-system DA scores.
absl::StatusOr<double> DaVarianceAnalysis(const corpus::HumanJudgmentSet& human);

}  // namespace rttqe::meta

#endif  // RTTQE_META_EVAL_H_
