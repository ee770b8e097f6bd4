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

// Semantic similarity: cosine of sentence embeddings and the idf-weighted
// greedy-match F-score over wordpiece embeddings.

#ifndef RTTQE_SEMANTIC_METRICS_H_
#define RTTQE_SEMANTIC_METRICS_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace rttqe::semantic {

struct SentenceEmbedding {
  std::vector<double> vector;
  std::string provider_id;
};

struct TokenEmbeddings {
  std::vector<std::string> wordpieces;
  // One row per wordpiece.
  std::vector<std::vector<double>> matrix;

  size_t dim() const { return matrix.empty() ? 0 : matrix.front().size(); }
  // Row count matches wordpieces, rows share one width, entries are finite.
  absl::Status Validate() const;
};

// Inverse document frequency over the L input sentences:
//   weight(t) = -log(df(t) / L),  df(t) = #sentences containing t.
class IdfTable {
 public:
  // `inputs` holds the wordpieces of each input sentence. Requires L >= 1.
  static absl::StatusOr<IdfTable> Build(
      std::span<const std::vector<std::string>> inputs);

  // Weight of `wordpiece`; default_weight() when it never occurred.
  double Weight(absl::string_view wordpiece) const;

  size_t corpus_size() const { return corpus_size_; }
  double default_weight() const { return default_weight_; }
  // Unseen pieces default to log L (as rare as an observed piece can be).
  void set_default_weight(double weight) { default_weight_ = weight; }
  const std::map<std::string, double, std::less<>>& weights() const {
    return weights_;
  }

 private:
  std::map<std::string, double, std::less<>> weights_;
  size_t corpus_size_ = 0;
  double default_weight_ = 0.0;
};

// dot(a, b) / (|a| |b|), clamped to [-1, 1].
absl::StatusOr<double> CosineSimilarity(std::span<const double> a,
                                        std::span<const double> b);

inline absl::StatusOr<double> CosineSimilarity(const SentenceEmbedding& a,
                                               const SentenceEmbedding& b) {
  return CosineSimilarity(a.vector, b.vector);
}

struct GreedyMatchScore {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

// Recall matches every input wordpiece to its most similar round-trip
// wordpiece; precision does the reverse. Both sides are weighted with the
// same input-side idf table. Scores are on the 0-1 scale.
absl::StatusOr<GreedyMatchScore> GreedyMatchFScore(const TokenEmbeddings& input,
                                                   const TokenEmbeddings& round_trip,
                                                   const IdfTable& idf);

}  // namespace rttqe::semantic

#endif  // RTTQE_SEMANTIC_METRICS_H_
