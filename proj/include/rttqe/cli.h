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

// Command-line front end: roundtrip, score, evaluate and paraphrase.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 missing
// resource (embedding fixture or provider), 4 provider failure, 1 other.

#ifndef RTTQE_CLI_H_
#define RTTQE_CLI_H_

#include <ostream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "rttqe/meta_eval.h"

namespace rttqe::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitMissingResource = 3;
inline constexpr int kExitProvider = 4;

int ExitCodeFor(const absl::Status& status);

struct RoundTripOptions {
  std::string config_path;
  std::string run_dir;  // empty: a timestamped directory under run.output_dir
  bool offline = false;
};

struct ScoreOptions {
  std::string run_dir;
  std::string config_path;  // empty: the config recorded in the manifest
  std::string metrics;      // comma list; empty: run.metrics
  bool offline = false;
};

struct EvaluateOptions {
  std::vector<std::string> run_dirs;
  std::string config_path;  // empty: each run's recorded config
  std::string out_dir;      // empty: <first run dir>/report
  int min_top_n = meta::kDefaultMinTopN;
  meta::TiePolicy ties = meta::TiePolicy::kDiscordant;
};

struct ParaphraseOptions {
  std::string paws_path;
  std::string config_path;  // needed for semantic metrics
  std::string metrics;      // empty: run.metrics, or lexical metrics alone
  std::string out_dir;      // empty: ./paraphrase-report
  std::string lang = "en";
  bool offline = false;
};

absl::Status CmdRoundTrip(const RoundTripOptions& options, std::ostream& out);
absl::Status CmdScore(const ScoreOptions& options, std::ostream& out);
absl::Status CmdEvaluate(const EvaluateOptions& options, std::ostream& out);
absl::Status CmdParaphrase(const ParaphraseOptions& options, std::ostream& out);

// Parses arguments, runs the subcommand and reports failures on `err`.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rttqe::cli

#endif  // RTTQE_CLI_H_
