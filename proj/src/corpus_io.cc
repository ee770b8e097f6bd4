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

#include "rttqe/corpus_io.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "rttqe/status_macros.h"

namespace rttqe::corpus {
namespace {

absl::Status LineError(const std::string& path, size_t line_no,
                       absl::string_view what) {
  return absl::InvalidArgumentError(absl::StrCat(path, ":", line_no, ": ", what));
}

bool IsSkippable(absl::string_view line) {
  const absl::string_view stripped = absl::StripAsciiWhitespace(line);
  return stripped.empty() || absl::StartsWith(stripped, "#");
}

absl::StatusOr<double> ParseFinite(absl::string_view field) {
  double value = 0.0;
  if (!absl::SimpleAtod(absl::StripAsciiWhitespace(field), &value) ||
      !std::isfinite(value)) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed score '", field, "'"));
  }
  return value;
}

// Parses "system,value" rows shared by the DA and win-ratio files.
absl::StatusOr<std::map<std::string, double>> LoadSystemValues(
    const std::string& path, const std::set<std::string>& known_systems,
    absl::string_view header_key) {
  RTTQE_ASSIGN_OR_RETURN(std::vector<std::string> lines, ReadLines(path));
  std::map<std::string, double> out;
  bool first = true;
  for (size_t i = 0; i < lines.size(); ++i) {
    const size_t line_no = i + 1;
    if (IsSkippable(lines[i])) continue;
    std::vector<std::string> fields = absl::StrSplit(lines[i], ',');
    for (auto& f : fields) f = std::string(absl::StripAsciiWhitespace(f));
    if (std::exchange(first, false) && fields.size() == 2 &&
        absl::EqualsIgnoreCase(fields[0], "system") &&
        absl::EqualsIgnoreCase(fields[1], header_key)) {
      continue;
    }
    if (fields.size() != 2) {
      return LineError(path, line_no,
                       absl::StrCat("expected 2 comma-separated fields, got ",
                                    fields.size()));
    }
    if (!known_systems.contains(fields[0])) {
      return LineError(path, line_no, absl::StrCat("unknown system '", fields[0], "'"));
    }
    auto value = ParseFinite(fields[1]);
    if (!value.ok()) return LineError(path, line_no, value.status().message());
    if (!out.emplace(fields[0], *value).second) {
      return LineError(path, line_no, absl::StrCat("duplicate system '", fields[0], "'"));
    }
  }
  return out;
}

std::vector<RawSegment> ToSegments(std::vector<std::string> lines,
                                   const std::string& lang) {
  std::vector<RawSegment> segments;
  segments.reserve(lines.size());
  for (size_t i = 0; i < lines.size(); ++i) {
    segments.push_back({std::to_string(i + 1), std::move(lines[i]), lang});
  }
  return segments;
}

}  // namespace

absl::StatusOr<LanguagePair> ParseLanguagePair(absl::string_view tag) {
  std::vector<std::string> parts = absl::StrSplit(tag, '-');
  if (parts.size() != 2 || parts[0].empty() || parts[1].empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed language pair '", tag, "' (expected e.g. de-en)"));
  }
  return LanguagePair{parts[0], parts[1]};
}

std::set<std::string> TestSet::SegmentIds() const {
  std::set<std::string> ids;
  for (const RawSegment& s : sources) ids.insert(s.id);
  return ids;
}

absl::StatusOr<std::vector<std::string>> ReadLines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  const std::string data((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  if (in.bad()) return absl::DataLossError(absl::StrCat("error reading ", path));
  std::vector<std::string> lines;
  size_t start = 0;
  while (start < data.size()) {
    size_t end = data.find('\n', start);
    const size_t next = end == std::string::npos ? data.size() : end + 1;
    if (end == std::string::npos) end = data.size();
    std::string line = data.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t bad = 0;
    if (!textnorm::IsValidUtf8(line, &bad)) {
      return LineError(path, lines.size() + 1,
                       absl::StrCat("invalid UTF-8 at byte ", bad));
    }
    lines.push_back(std::move(line));
    start = next;
  }
  return lines;
}

absl::StatusOr<TestSet> LoadTestSet(const std::string& source_path,
                                    const LanguagePair& pair,
                                    const std::string& reference_path) {
  RTTQE_ASSIGN_OR_RETURN(std::vector<std::string> lines, ReadLines(source_path));
  if (lines.empty()) {
    return absl::InvalidArgumentError(absl::StrCat("empty test set: ", source_path));
  }
  TestSet set;
  set.pair = pair;
  const size_t n = lines.size();
  set.sources = ToSegments(std::move(lines), pair.src);
  if (!reference_path.empty()) {
    RTTQE_ASSIGN_OR_RETURN(std::vector<std::string> refs, ReadLines(reference_path));
    if (refs.size() != n) {
      return absl::InvalidArgumentError(absl::StrCat(
          "alignment error: ", source_path, " has ", n, " lines but ",
          reference_path, " has ", refs.size()));
    }
    set.references = ToSegments(std::move(refs), pair.tgt);
  }
  return set;
}

absl::StatusOr<SystemSubmission> LoadSystemOutputs(const std::string& path,
                                                   absl::string_view system_id,
                                                   const TestSet& testset) {
  if (system_id.empty()) return absl::InvalidArgumentError("empty system id");
  RTTQE_ASSIGN_OR_RETURN(std::vector<std::string> lines, ReadLines(path));
  if (lines.size() != testset.sources.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "alignment error: test set has ", testset.sources.size(),
        " segments but ", path, " has ", lines.size(), " lines"));
  }
  SystemSubmission sub;
  sub.system_id = std::string(system_id);
  sub.pair = testset.pair;
  sub.outputs = ToSegments(std::move(lines), testset.pair.tgt);
  for (size_t i = 0; i < sub.outputs.size(); ++i) {
    sub.outputs[i].id = testset.sources[i].id;
  }
  return sub;
}

absl::StatusOr<HumanJudgmentSet> LoadHumanJudgments(
    const std::string& da_path, const std::string& darr_path,
    const std::set<std::string>& known_systems,
    const std::set<std::string>& known_segments) {
  HumanJudgmentSet set;
  if (!da_path.empty()) {
    RTTQE_ASSIGN_OR_RETURN(set.da_system_scores,
                           LoadSystemValues(da_path, known_systems, "score"));
  }
  if (darr_path.empty()) return set;

  RTTQE_ASSIGN_OR_RETURN(std::vector<std::string> lines, ReadLines(darr_path));
  bool first = true;
  for (size_t i = 0; i < lines.size(); ++i) {
    const size_t line_no = i + 1;
    if (IsSkippable(lines[i])) continue;
    std::vector<std::string> fields =
        absl::StrSplit(lines[i], absl::ByAnyChar(" \t"), absl::SkipEmpty());
    if (std::exchange(first, false) && !fields.empty() &&
        absl::StartsWithIgnoreCase(fields[0], "seg")) {
      continue;
    }
    if (fields.size() != 3) {
      return LineError(darr_path, line_no,
                       absl::StrCat("expected 'segment better worse', got ",
                                    fields.size(), " fields"));
    }
    DarrPair p{fields[0], fields[1], fields[2]};
    if (!known_segments.contains(p.segment_id)) {
      return LineError(darr_path, line_no,
                       absl::StrCat("unknown segment id '", p.segment_id, "'"));
    }
    for (const std::string* sys : {&p.better, &p.worse}) {
      if (!known_systems.contains(*sys)) {
        return LineError(darr_path, line_no, absl::StrCat("unknown system '", *sys, "'"));
      }
    }
    if (p.better == p.worse) {
      return LineError(darr_path, line_no,
                       absl::StrCat("better and worse are both '", p.better, "'"));
    }
    set.darr_pairs.push_back(std::move(p));
  }
  return set;
}

absl::StatusOr<std::map<std::string, double>> LoadWinRatios(
    const std::string& path, const std::set<std::string>& known_systems) {
  RTTQE_ASSIGN_OR_RETURN(auto ratios, LoadSystemValues(path, known_systems, "ratio"));
  for (const auto& [system, ratio] : ratios) {
    if (ratio < 0.0 || ratio > 1.0) {
      return absl::InvalidArgumentError(absl::StrCat(
          path, ": win ratio ", ratio, " for '", system, "' is outside [0,1]"));
    }
  }
  return ratios;
}

absl::StatusOr<std::vector<ParaphrasePair>> LoadPaws(const std::string& path) {
  RTTQE_ASSIGN_OR_RETURN(std::vector<std::string> lines, ReadLines(path));
  if (lines.empty()) return absl::InvalidArgumentError(absl::StrCat(path, ": no header"));
  const std::vector<std::string> header = absl::StrSplit(lines[0], '\t');
  std::map<std::string, size_t> column;
  for (size_t c = 0; c < header.size(); ++c) {
    column.emplace(absl::StripAsciiWhitespace(header[c]), c);
  }
  size_t idx[4];
  const char* names[4] = {"id", "sentence1", "sentence2", "label"};
  for (int k = 0; k < 4; ++k) {
    auto it = column.find(names[k]);
    if (it == column.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": missing column '", names[k], "'"));
    }
    idx[k] = it->second;
  }
  std::vector<ParaphrasePair> pairs;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::vector<std::string> fields = absl::StrSplit(lines[i], '\t');
    if (fields.size() != header.size()) {
      return LineError(path, i + 1,
                       absl::StrCat("expected ", header.size(), " fields, got ",
                                    fields.size()));
    }
    const absl::string_view label = absl::StripAsciiWhitespace(fields[idx[3]]);
    if (label != "0" && label != "1") {
      return LineError(path, i + 1, absl::StrCat("label '", label, "' is not 0 or 1"));
    }
    pairs.push_back({fields[idx[0]], fields[idx[1]], fields[idx[2]], label == "1" ? 1 : 0});
  }
  return pairs;
}

std::string SerializeSegments(std::span<const RawSegment> segments) {
  std::string out;
  for (const RawSegment& s : segments) {
    out.append(s.text);
    out.push_back('\n');
  }
  return out;
}

std::vector<DarrPair> BuildDarrPairs(
    const std::map<std::string, std::map<std::string, double>>& raw_da,
    double threshold) {
  std::vector<DarrPair> pairs;
  for (const auto& [segment, scores] : raw_da) {
    for (auto a = scores.begin(); a != scores.end(); ++a) {
      for (auto b = std::next(a); b != scores.end(); ++b) {
        const double diff = a->second - b->second;
        if (diff > threshold) {
          pairs.push_back({segment, a->first, b->first});
        } else if (-diff > threshold) {
          pairs.push_back({segment, b->first, a->first});
        }
      }
    }
  }
  return pairs;
}

}  // namespace rttqe::corpus
