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

// Loading and saving evaluation data: test sets, system outputs, human
// judgments (DA system scores, daRR pairs, win ratios) and paraphrase pairs.
//
// File layouts:
//   test set / system output  plain text, one segment per line. Segment ids
//                             are 1-based line numbers ("1", "2", ...).
//   DA system scores          CSV "system,score"; optional "system,score"
//                             header; '#' starts a comment line.
//   daRR pairs                whitespace-separated "segment better worse";
//                             optional header whose first field starts
//                             with "seg".
//   win ratios                CSV "system,ratio", ratio in [0,1].
//   paraphrase pairs          TSV with a header naming at least the columns
//                             id, sentence1, sentence2 and label.
// All files are UTF-8; CRLF line endings are accepted.

#ifndef RTTQE_CORPUS_IO_H_
#define RTTQE_CORPUS_IO_H_

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "rttqe/textnorm.h"

namespace rttqe::corpus {

using textnorm::RawSegment;

struct LanguagePair {
  std::string src;
  std::string tgt;

  std::string Tag() const { return src + "-" + tgt; }
  bool operator==(const LanguagePair&) const = default;
};

// Parses "de-en".
absl::StatusOr<LanguagePair> ParseLanguagePair(absl::string_view tag);

struct TestSet {
  LanguagePair pair;
  std::vector<RawSegment> sources;
  std::vector<RawSegment> references;  // empty or aligned with sources

  std::set<std::string> SegmentIds() const;
};

struct SystemSubmission {
  std::string system_id;
  LanguagePair pair;
  std::vector<RawSegment> outputs;  // aligned with TestSet::sources
};

struct DarrPair {
  std::string segment_id;
  std::string better;
  std::string worse;

  bool operator==(const DarrPair&) const = default;
};

struct HumanJudgmentSet {
  std::map<std::string, double> da_system_scores;
  std::vector<DarrPair> darr_pairs;
  std::optional<std::map<std::string, double>> win_ratios;
};

struct ParaphrasePair {
  std::string id;
  std::string sentence1;
  std::string sentence2;
  int label = 0;
};

// Lines of a UTF-8 text file with the line terminator ("\n" or "\r\n")
// removed. A final line without terminator is kept. Invalid UTF-8 is an
// error naming the line.
absl::StatusOr<std::vector<std::string>> ReadLines(const std::string& path);

absl::StatusOr<TestSet> LoadTestSet(const std::string& source_path,
                                    const LanguagePair& pair,
                                    const std::string& reference_path = "");

absl::StatusOr<SystemSubmission> LoadSystemOutputs(const std::string& path,
                                                   absl::string_view system_id,
                                                   const TestSet& testset);

// Either path may be empty to skip that part. Every system must be in
// `known_systems` and every daRR segment in `known_segments`.
absl::StatusOr<HumanJudgmentSet> LoadHumanJudgments(
    const std::string& da_path, const std::string& darr_path,
    const std::set<std::string>& known_systems,
    const std::set<std::string>& known_segments);

absl::StatusOr<std::map<std::string, double>> LoadWinRatios(
    const std::string& path, const std::set<std::string>& known_systems);

absl::StatusOr<std::vector<ParaphrasePair>> LoadPaws(const std::string& path);

// One text per line, "\n"-terminated. Inverse of ReadLines for text without
// embedded newlines.
std::string SerializeSegments(std::span<const RawSegment> segments);

// Builds daRR pairs from raw DA scores keyed by segment then system. A pair
// is emitted when two systems' scores differ by more than `threshold` raw
// points; the higher-scored system is "better". This follows the WMT
// shared-task convention and is not needed when pairs are supplied.
inline constexpr double kDefaultDarrThreshold = 25.0;
std::vector<DarrPair> BuildDarrPairs(
    const std::map<std::string, std::map<std::string, double>>& raw_da,
    double threshold = kDefaultDarrThreshold);

}  // namespace rttqe::corpus

#endif  // RTTQE_CORPUS_IO_H_
