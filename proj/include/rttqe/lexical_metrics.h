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

// Surface-level similarity metrics: corpus BLEU, smoothed sentence BLEU and
// character n-gram F-score (chrF), all on a 0-100 scale.

#ifndef RTTQE_LEXICAL_METRICS_H_
#define RTTQE_LEXICAL_METRICS_H_

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "rttqe/textnorm.h"

namespace rttqe::lexical {

using textnorm::TokenSequence;

inline constexpr int kBleuMaxOrder = 4;
inline constexpr int kChrfMaxOrder = 6;
inline constexpr double kChrfBeta = 3.0;

struct NGramCounts {
  int order = 1;
  std::map<std::vector<std::string>, int64_t> counts;

  int64_t Total() const;
};

NGramCounts CountNGrams(const TokenSequence& tokens, int order);

// Sufficient statistics for BLEU. Additive across segments.
struct BleuStats {
  std::array<int64_t, kBleuMaxOrder> matched{};
  std::array<int64_t, kBleuMaxOrder> totals{};
  int64_t hyp_len = 0;
  int64_t ref_len = 0;

  BleuStats& operator+=(const BleuStats& other);
};

BleuStats ComputeBleuStats(const TokenSequence& hyp, const TokenSequence& ref);

struct TokenPair {
  TokenSequence hyp;
  TokenSequence ref;
};

// BLEU from summed statistics with exponential ("smooth.exp") smoothing:
// the k-th order without any match gets precision 1 / (2^k * totals[n]).
// An order with no candidate n-grams at all contributes log(0) and drives
// the score to 0, as the reference scorer does.
absl::StatusOr<double> BleuFromStats(const BleuStats& stats);

absl::StatusOr<double> CorpusBleu(std::span<const TokenPair> pairs);

enum class SentenceBleuSmoothing {
  // Add one to matches and totals of every order. This is what Moses'
  // sentence-bleu binary computes.
  kAddOneAllOrders,
  // Add one to orders 2-4 only (Lin and Och, 2004).
  kAddOneHigherOrders,
};

absl::StatusOr<double> SentenceBleu(
    const TokenSequence& hyp, const TokenSequence& ref,
    SentenceBleuSmoothing smoothing = SentenceBleuSmoothing::kAddOneAllOrders);

// Brevity penalty min(1, exp(1 - ref_len / hyp_len)); 0 for an empty
// hypothesis.
double BrevityPenalty(int64_t hyp_len, int64_t ref_len);

// Per-order character n-gram counts. Additive across segments.
struct ChrfStats {
  std::array<int64_t, kChrfMaxOrder> hyp{};
  std::array<int64_t, kChrfMaxOrder> ref{};
  std::array<int64_t, kChrfMaxOrder> common{};

  ChrfStats& operator+=(const ChrfStats& other);
};

struct ChrfOptions {
  int max_order = kChrfMaxOrder;
  double beta = kChrfBeta;
};

ChrfStats ComputeChrfStats(const TokenSequence& hyp_chars,
                           const TokenSequence& ref_chars,
                           const ChrfOptions& options = {});

double ChrfFromStats(const ChrfStats& stats, const ChrfOptions& options = {});

// Inputs are CHAR_STREAM sequences. Returns 0 when exactly one side is
// empty and an error when both are.
absl::StatusOr<double> Chrf(const TokenSequence& hyp_chars,
                            const TokenSequence& ref_chars,
                            const ChrfOptions& options = {});

// chrF over corpus-summed counts; not the mean of segment scores.
absl::StatusOr<double> ChrfCorpus(std::span<const TokenPair> pairs,
                                  const ChrfOptions& options = {});

}  // namespace rttqe::lexical

#endif  // RTTQE_LEXICAL_METRICS_H_
