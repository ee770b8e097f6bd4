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

#include "rttqe/meta_eval.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace rttqe::meta {
namespace {

double Mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Checks that both maps have the same keys and returns them in order.
absl::StatusOr<std::vector<std::string>> CommonSystems(
    const std::map<std::string, double>& metric,
    const std::map<std::string, double>& human) {
  std::vector<std::string> only_metric, only_human, both;
  for (const auto& [id, _] : metric) {
    (human.contains(id) ? both : only_metric).push_back(id);
  }
  for (const auto& [id, _] : human) {
    if (!metric.contains(id)) only_human.push_back(id);
  }
  if (!only_metric.empty() || !only_human.empty()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "system mismatch: without human scores [", absl::StrJoin(only_metric, ","),
        "], without metric scores [", absl::StrJoin(only_human, ","), "]"));
  }
  return both;
}

}  // namespace

absl::StatusOr<double> Pearson(std::span<const double> xs,
                               std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("pearson: ", xs.size(), " vs ", ys.size(), " values"));
  }
  if (xs.size() < 2) {
    return absl::FailedPreconditionError(
        absl::StrCat("undefined correlation (n<2): n=", xs.size()));
  }
  const double mx = Mean(xs);
  const double my = Mean(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    return absl::FailedPreconditionError(
        "undefined correlation: constant sequence");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

absl::StatusOr<CorrelationReport> SystemLevelPearson(
    const std::map<std::string, double>& metric_scores,
    const std::map<std::string, double>& human_scores) {
  auto systems = CommonSystems(metric_scores, human_scores);
  if (!systems.ok()) return systems.status();
  CorrelationReport report;
  std::vector<double> xs, ys;
  for (const std::string& id : *systems) {
    xs.push_back(metric_scores.at(id));
    ys.push_back(human_scores.at(id));
    report.pairing.push_back({id, xs.back(), ys.back()});
  }
  report.n = static_cast<int64_t>(xs.size());
  auto r = Pearson(xs, ys);
  if (!r.ok()) return r.status();
  report.r = *r;
  return report;
}

absl::StatusOr<TauReport> KendallTauDarr(const SegmentScores& scores,
                                         std::span<const corpus::DarrPair> pairs,
                                         TiePolicy ties) {
  if (pairs.empty()) return absl::InvalidArgumentError("no daRR pairs");
  TauReport report;
  for (const corpus::DarrPair& p : pairs) {
    auto better = scores.find({p.better, p.segment_id});
    auto worse = scores.find({p.worse, p.segment_id});
    for (const auto* it : {&better, &worse}) {
      if (*it == scores.end()) {
        const std::string& sys = it == &better ? p.better : p.worse;
        return absl::InvalidArgumentError(absl::StrCat(
            "no metric score for system '", sys, "' segment '", p.segment_id, "'"));
      }
    }
    if (better->second > worse->second) {
      ++report.concordant;
    } else if (better->second < worse->second) {
      ++report.discordant;
    } else {
      ++report.ties;
      if (ties == TiePolicy::kDiscordant) ++report.discordant;
    }
  }
  const int64_t total = report.concordant + report.discordant;
  if (total == 0) return absl::FailedPreconditionError("every daRR pair is a tie");
  report.tau = static_cast<double>(report.concordant - report.discordant) /
               static_cast<double>(total);
  return report;
}

absl::StatusOr<std::vector<TopNPoint>> TopNCurve(
    const std::map<std::string, double>& metric_scores,
    const std::map<std::string, double>& human_scores, int min_n) {
  if (min_n < 2) return absl::InvalidArgumentError("min_n must be >= 2");
  auto systems = CommonSystems(metric_scores, human_scores);
  if (!systems.ok()) return systems.status();
  const int total = static_cast<int>(systems->size());
  if (total < min_n) {
    return absl::FailedPreconditionError(
        absl::StrCat("top-n curve needs at least ", min_n, " systems, got ", total));
  }
  std::stable_sort(systems->begin(), systems->end(),
                   [&](const std::string& a, const std::string& b) {
                     return human_scores.at(a) > human_scores.at(b);
                   });
  std::vector<TopNPoint> curve;
  for (int n = total; n >= min_n; --n) {
    std::vector<double> xs, ys;
    for (int i = 0; i < n; ++i) {
      xs.push_back(metric_scores.at((*systems)[i]));
      ys.push_back(human_scores.at((*systems)[i]));
    }
    TopNPoint point{n, std::nullopt};
    if (auto r = Pearson(xs, ys); r.ok()) point.r = *r;
    curve.push_back(point);
  }
  return curve;
}

absl::StatusOr<double> ScoreVariance(std::span<const double> values) {
  if (values.size() < 2) {
    return absl::FailedPreconditionError(
        absl::StrCat("variance needs n >= 2, got ", values.size()));
  }
  const double m = Mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return ss / static_cast<double>(values.size() - 1);
}

absl::StatusOr<PrCurve> PrAuc(std::span<const double> scores,
                              std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "pr_auc: ", scores.size(), " scores vs ", labels.size(), " labels"));
  }
  int64_t positives = 0;
  for (int label : labels) {
    if (label != 0 && label != 1) {
      return absl::InvalidArgumentError(absl::StrCat("label ", label, " is not 0 or 1"));
    }
    positives += label;
  }
  if (positives == 0) return absl::FailedPreconditionError("no positive labels");

  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return scores[a] > scores[b]; });

  PrCurve curve;
  curve.points.push_back({0.0, 1.0});
  int64_t tp = 0, seen = 0;
  for (size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == threshold; ++i) {
      tp += labels[order[i]];
      ++seen;
    }
    curve.points.push_back({static_cast<double>(tp) / static_cast<double>(positives),
                            static_cast<double>(tp) / static_cast<double>(seen)});
  }
  for (size_t k = 1; k < curve.points.size(); ++k) {
    const PrPoint& a = curve.points[k - 1];
    const PrPoint& b = curve.points[k];
    curve.auc += (b.recall - a.recall) * (a.precision + b.precision) / 2.0;
  }
  return curve;
}

absl::StatusOr<double> DaVarianceAnalysis(const corpus::HumanJudgmentSet& human) {
  std::vector<double> values;
  for (const auto& [_, score] : human.da_system_scores) values.push_back(score);
  return ScoreVariance(values);
}

}  // namespace rttqe::meta
