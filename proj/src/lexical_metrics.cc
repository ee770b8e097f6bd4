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

#include "rttqe/lexical_metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace rttqe::lexical {

namespace {

using textnorm::TokenizationScheme;

// Same floor the reference scorer uses for log(0).
constexpr double kLogZero = -9999999999.0;

double LogOrFloor(double x) { return x == 0.0 ? kLogZero : std::log(x); }

std::unordered_map<std::string, int64_t> CharNGrams(const TokenSequence& chars,
                                                   int order) {
  std::unordered_map<std::string, int64_t> counts;
  const auto& t = chars.tokens;
  if (static_cast<int>(t.size()) < order) return counts;
  for (size_t i = 0; i + order <= t.size(); ++i) {
    std::string gram;
    for (int k = 0; k < order; ++k) gram += t[i + k];
    ++counts[gram];
  }
  return counts;
}

absl::Status CheckSameScheme(std::span<const TokenPair> pairs) {
  for (const TokenPair& p : pairs) {
    if (p.hyp.scheme != p.ref.scheme || p.hyp.scheme != pairs[0].hyp.scheme) {
      return absl::InvalidArgumentError(
          "hypothesis and reference must share one tokenization scheme");
    }
  }
  return absl::OkStatus();
}

}  // namespace

int64_t NGramCounts::Total() const {
  int64_t total = 0;
  for (const auto& [gram, count] : counts) total += count;
  return total;
}

NGramCounts CountNGrams(const TokenSequence& tokens, int order) {
  NGramCounts out;
  out.order = order;
  const auto& t = tokens.tokens;
  if (order < 1 || static_cast<int>(t.size()) < order) return out;
  for (size_t i = 0; i + order <= t.size(); ++i) {
    ++out.counts[std::vector<std::string>(t.begin() + i,
                                          t.begin() + i + order)];
  }
  return out;
}

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (int n = 0; n < kBleuMaxOrder; ++n) {
    matched[n] += other.matched[n];
    totals[n] += other.totals[n];
  }
  hyp_len += other.hyp_len;
  ref_len += other.ref_len;
  return *this;
}

BleuStats ComputeBleuStats(const TokenSequence& hyp, const TokenSequence& ref) {
  BleuStats stats;
  stats.hyp_len = static_cast<int64_t>(hyp.size());
  stats.ref_len = static_cast<int64_t>(ref.size());
  for (int n = 1; n <= kBleuMaxOrder; ++n) {
    const NGramCounts h = CountNGrams(hyp, n);
    const NGramCounts r = CountNGrams(ref, n);
    int64_t matched = 0;
    for (const auto& [gram, count] : h.counts) {
      auto it = r.counts.find(gram);
      if (it != r.counts.end()) matched += std::min(count, it->second);
    }
    stats.matched[n - 1] = matched;
    stats.totals[n - 1] = h.Total();
  }
  return stats;
}

double BrevityPenalty(int64_t hyp_len, int64_t ref_len) {
  if (hyp_len >= ref_len) return 1.0;
  if (hyp_len == 0) return 0.0;
  return std::exp(1.0 - static_cast<double>(ref_len) /
                            static_cast<double>(hyp_len));
}

absl::StatusOr<double> BleuFromStats(const BleuStats& stats) {
  if (stats.totals[0] == 0) {
    return absl::InvalidArgumentError(
        "BLEU undefined: the hypotheses contain no tokens");
  }
  double smooth = 1.0;
  double log_sum = 0.0;
  for (int n = 0; n < kBleuMaxOrder; ++n) {
    if (stats.totals[n] == 0) {
      // Remaining orders keep precision 0.
      log_sum += kLogZero * (kBleuMaxOrder - n);
      break;
    }
    double precision;
    if (stats.matched[n] == 0) {
      smooth *= 2.0;
      precision = 100.0 / (smooth * static_cast<double>(stats.totals[n]));
    } else {
      precision = 100.0 * static_cast<double>(stats.matched[n]) /
                  static_cast<double>(stats.totals[n]);
    }
    log_sum += LogOrFloor(precision);
  }
  return BrevityPenalty(stats.hyp_len, stats.ref_len) *
         std::exp(log_sum / kBleuMaxOrder);
}

absl::StatusOr<double> CorpusBleu(std::span<const TokenPair> pairs) {
  if (pairs.empty()) {
    return absl::InvalidArgumentError("corpus BLEU needs at least one segment");
  }
  if (absl::Status s = CheckSameScheme(pairs); !s.ok()) return s;
  BleuStats total;
  for (const TokenPair& p : pairs) total += ComputeBleuStats(p.hyp, p.ref);
  return BleuFromStats(total);
}

absl::StatusOr<double> SentenceBleu(const TokenSequence& hyp,
                                    const TokenSequence& ref,
                                    SentenceBleuSmoothing smoothing) {
  if (hyp.empty()) {
    return absl::InvalidArgumentError("sentence BLEU of an empty hypothesis");
  }
  if (ref.empty()) {
    return absl::InvalidArgumentError("sentence BLEU needs a non-empty reference");
  }
  const BleuStats stats = ComputeBleuStats(hyp, ref);
  double log_precision = 0.0;
  for (int n = 0; n < kBleuMaxOrder; ++n) {
    const double add =
        (smoothing == SentenceBleuSmoothing::kAddOneAllOrders || n > 0) ? 1.0
                                                                         : 0.0;
    const double num = static_cast<double>(stats.matched[n]) + add;
    const double den = static_cast<double>(stats.totals[n]) + add;
    if (num == 0.0) return 0.0;
    log_precision += std::log(num) - std::log(den);
  }
  return 100.0 * std::exp(log_precision / kBleuMaxOrder) *
         BrevityPenalty(stats.hyp_len, stats.ref_len);
}

ChrfStats& ChrfStats::operator+=(const ChrfStats& other) {
  for (int n = 0; n < kChrfMaxOrder; ++n) {
    hyp[n] += other.hyp[n];
    ref[n] += other.ref[n];
    common[n] += other.common[n];
  }
  return *this;
}

ChrfStats ComputeChrfStats(const TokenSequence& hyp_chars,
                           const TokenSequence& ref_chars,
                           const ChrfOptions& options) {
  ChrfStats stats;
  const int max_order = std::clamp(options.max_order, 1, kChrfMaxOrder);
  for (int n = 1; n <= max_order; ++n) {
    const auto h = CharNGrams(hyp_chars, n);
    const auto r = CharNGrams(ref_chars, n);
    int64_t common = 0, h_total = 0, r_total = 0;
    for (const auto& [gram, count] : h) {
      h_total += count;
      auto it = r.find(gram);
      if (it != r.end()) common += std::min(count, it->second);
    }
    for (const auto& [gram, count] : r) r_total += count;
    stats.hyp[n - 1] = h_total;
    stats.ref[n - 1] = r_total;
    stats.common[n - 1] = common;
  }
  return stats;
}

double ChrfFromStats(const ChrfStats& stats, const ChrfOptions& options) {
  const int max_order = std::clamp(options.max_order, 1, kChrfMaxOrder);
  double precision = 0.0, recall = 0.0;
  int effective_order = 0;
  for (int n = 0; n < max_order; ++n) {
    if (stats.hyp[n] > 0 && stats.ref[n] > 0) {
      precision += static_cast<double>(stats.common[n]) /
                   static_cast<double>(stats.hyp[n]);
      recall += static_cast<double>(stats.common[n]) /
                static_cast<double>(stats.ref[n]);
      ++effective_order;
    }
  }
  if (effective_order == 0) return 0.0;
  precision /= effective_order;
  recall /= effective_order;
  if (precision + recall == 0.0) return 0.0;
  const double beta2 = options.beta * options.beta;
  return 100.0 * (1.0 + beta2) * precision * recall /
         (beta2 * precision + recall);
}

absl::StatusOr<double> Chrf(const TokenSequence& hyp_chars,
                            const TokenSequence& ref_chars,
                            const ChrfOptions& options) {
  if (hyp_chars.empty() && ref_chars.empty()) {
    return absl::InvalidArgumentError("chrF of two empty strings is undefined");
  }
  if (hyp_chars.empty() || ref_chars.empty()) return 0.0;
  return ChrfFromStats(ComputeChrfStats(hyp_chars, ref_chars, options),
                       options);
}

absl::StatusOr<double> ChrfCorpus(std::span<const TokenPair> pairs,
                                  const ChrfOptions& options) {
  if (pairs.empty()) {
    return absl::InvalidArgumentError("corpus chrF needs at least one segment");
  }
  ChrfStats total;
  bool any_chars = false;
  for (const TokenPair& p : pairs) {
    any_chars = any_chars || !p.hyp.empty() || !p.ref.empty();
    total += ComputeChrfStats(p.hyp, p.ref, options);
  }
  if (!any_chars) {
    return absl::InvalidArgumentError("chrF of an all-empty corpus is undefined");
  }
  return ChrfFromStats(total, options);
}

}  // namespace rttqe::lexical
