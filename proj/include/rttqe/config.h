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

// Run configuration: a TOML subset and the schema the CLI reads from it.
//
// Supported TOML: [section] and [dotted.section] headers, bare or quoted
// keys, basic and literal strings, integers, floats, booleans, single-line
// arrays, and '#' comments. Unknown sections and keys are rejected so that
// typos fail before any provider is contacted.
//
// Example:
//   [testset]
//   pair = "de-en"
//   source = "newstest.de"
//
//   [submissions]
//   sysA = "sysA.en"
//
//   [bt]
//   id = "echo"
//   type = "echo"
//
//   [embedding.default]
//   id = "fixture"
//   type = "fixture"
//   path = "embeddings.jsonl"
//
//   [human]
//   da = "da.csv"
//   darr = "darr.tsv"
//
//   [run]
//   metrics = ["rtt-bleu", "rtt-sentbleu"]

#ifndef RTTQE_CONFIG_H_
#define RTTQE_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "rttqe/corpus_io.h"
#include "rttqe/providers.h"
#include "rttqe/rtt_pipeline.h"

namespace rttqe::config {

struct TomlValue;
using TomlArray = std::vector<TomlValue>;

struct TomlValue {
  std::variant<std::string, int64_t, double, bool, TomlArray> value;
  int line = 0;
};

// Section name ("" for keys before the first header) -> key -> value.
using TomlDocument = std::map<std::string, std::map<std::string, TomlValue>>;

absl::StatusOr<TomlDocument> ParseToml(absl::string_view text);

struct RunConfig {
  std::string config_path;  // absolute
  corpus::LanguagePair pair;
  std::string source;     // absolute paths from here on
  std::string reference;  // optional
  std::map<std::string, std::string> submissions;  // system id -> path
  providers::ProviderConfig bt;
  // Keyed by language tag or "default".
  std::map<std::string, providers::ProviderConfig> embeddings;
  std::string da;          // optional
  std::string darr;        // optional
  std::string win_ratios;  // optional
  std::vector<pipeline::MetricId> metrics;  // defaults to all metrics
  std::string cache_dir;   // defaults to <config dir>/cache
  std::string output_dir;  // defaults to <config dir>/runs
  int workers = 1;
};

// Relative paths resolve against `base_dir`.
absl::StatusOr<RunConfig> ParseRunConfig(absl::string_view text,
                                         const std::string& base_dir);
absl::StatusOr<RunConfig> LoadRunConfig(const std::string& path);

struct PathChecks {
  bool inputs = true;      // test set and submissions
  bool embeddings = false;
  bool human = false;
};

// Checks that referenced files exist. A missing input or judgment file is
// an InvalidArgument error naming the path; a missing embedding fixture is
// NotFound.
absl::Status ValidatePaths(const RunConfig& config, const PathChecks& checks);

}  // namespace rttqe::config

#endif  // RTTQE_CONFIG_H_
