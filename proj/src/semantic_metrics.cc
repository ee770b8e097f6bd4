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

#include "rttqe/semantic_metrics.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"

namespace rttqe::semantic {

namespace {

double SquaredNorm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return sum;
}

// dot / sqrt(|a|^2 |b|^2): for a == b this is exactly 1, since
// sqrt(x * x) == x in IEEE arithmetic.
double Cosine(double dot, double squared_norm_a, double squared_norm_b) {
  return std::clamp(dot / std::sqrt(squared_norm_a * squared_norm_b), -1.0, 1.0);
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

// Idf-weighted mean over `from` rows of the best cosine against `to` rows.
absl::StatusOr<double> WeightedBestMatch(const TokenEmbeddings& from,
                                         const std::vector<double>& from_sq,
                                         const TokenEmbeddings& to,
                                         const std::vector<double>& to_sq,
                                         const IdfTable& idf,
                                         absl::string_view side) {
  double weighted = 0.0;
  double total_weight = 0.0;
  for (size_t i = 0; i < from.matrix.size(); ++i) {
    double best = -1.0;
    for (size_t j = 0; j < to.matrix.size(); ++j) {
      best = std::max(best, Cosine(Dot(from.matrix[i], to.matrix[j]),
                                   from_sq[i], to_sq[j]));
    }
    const double w = idf.Weight(from.wordpieces[i]);
    weighted += w * best;
    total_weight += w;
  }
  if (total_weight == 0.0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "all ", side, " wordpieces have zero idf weight; the idf corpus is "
        "degenerate"));
  }
  return weighted / total_weight;
}

absl::StatusOr<std::vector<double>> SquaredRowNorms(const TokenEmbeddings& e,
                                             absl::string_view side) {
  std::vector<double> norms;
  norms.reserve(e.matrix.size());
  for (size_t i = 0; i < e.matrix.size(); ++i) {
    const double n = SquaredNorm(e.matrix[i]);
    if (n == 0.0) {
      return absl::InvalidArgumentError(
          absl::StrCat(side, " wordpiece '", e.wordpieces[i],
                       "' has a zero embedding vector"));
    }
    norms.push_back(n);
  }
  return norms;
}

}  // namespace

absl::Status TokenEmbeddings::Validate() const {
  if (wordpieces.size() != matrix.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat(wordpieces.size(), " wordpieces but ", matrix.size(),
                     " token vectors"));
  }
  for (const auto& row : matrix) {
    if (row.size() != matrix.front().size()) {
      return absl::InvalidArgumentError("token vectors differ in dimension");
    }
    for (double x : row) {
      if (!std::isfinite(x)) {
        return absl::InvalidArgumentError("token vector has a non-finite entry");
      }
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<IdfTable> IdfTable::Build(
    std::span<const std::vector<std::string>> inputs) {
  if (inputs.empty()) {
    return absl::InvalidArgumentError("idf table needs at least one sentence");
  }
  std::map<std::string, size_t, std::less<>> df;
  for (const auto& sentence : inputs) {
    const std::set<std::string> distinct(sentence.begin(), sentence.end());
    for (const auto& piece : distinct) ++df[piece];
  }
  IdfTable table;
  table.corpus_size_ = inputs.size();
  const double corpus = static_cast<double>(inputs.size());
  for (const auto& [piece, count] : df) {
    table.weights_[piece] = std::log(corpus / static_cast<double>(count));
  }
  table.default_weight_ = std::log(corpus);
  return table;
}

double IdfTable::Weight(absl::string_view wordpiece) const {
  auto it = weights_.find(wordpiece);
  return it == weights_.end() ? default_weight_ : it->second;
}

absl::StatusOr<double> CosineSimilarity(std::span<const double> a,
                                        std::span<const double> b) {
  if (a.size() != b.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "embedding dimensions differ: ", a.size(), " vs ", b.size()));
  }
  const double sa = SquaredNorm(a);
  const double sb = SquaredNorm(b);
  if (sa == 0.0 || sb == 0.0) {
    return absl::InvalidArgumentError("cosine similarity of a zero vector");
  }
  return Cosine(Dot(a, b), sa, sb);
}

absl::StatusOr<GreedyMatchScore> GreedyMatchFScore(
    const TokenEmbeddings& input, const TokenEmbeddings& round_trip,
    const IdfTable& idf) {
  if (absl::Status s = input.Validate(); !s.ok()) return s;
  if (absl::Status s = round_trip.Validate(); !s.ok()) return s;
  if (input.matrix.empty() || round_trip.matrix.empty()) {
    return absl::InvalidArgumentError("greedy matching needs wordpieces on both sides");
  }
  if (input.dim() != round_trip.dim()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "embedding dimensions differ: ", input.dim(), " vs ", round_trip.dim()));
  }
  auto input_norms = SquaredRowNorms(input, "input");
  if (!input_norms.ok()) return input_norms.status();
  auto rt_norms = SquaredRowNorms(round_trip, "round-trip");
  if (!rt_norms.ok()) return rt_norms.status();

  auto recall = WeightedBestMatch(input, *input_norms, round_trip, *rt_norms,
                                  idf, "input");
  if (!recall.ok()) return recall.status();
  auto precision = WeightedBestMatch(round_trip, *rt_norms, input,
                                     *input_norms, idf, "round-trip");
  if (!precision.ok()) return precision.status();

  GreedyMatchScore score;
  score.precision = *precision;
  score.recall = *recall;
  const double sum = score.precision + score.recall;
  score.f = sum == 0.0 ? 0.0 : 2.0 * score.precision * score.recall / sum;
  return score;
}

}  // namespace rttqe::semantic
