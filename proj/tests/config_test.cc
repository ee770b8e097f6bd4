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

#include "rttqe/config.h"

#include <string>
#include <variant>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace rttqe::config {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;

constexpr char kMinimal[] = R"(
[testset]
pair = "de-en"
source = "src.de"

[submissions]
sysA = "a.en"

[bt]
id = "echo"
type = "echo"
)";

TEST(TomlTest, ScalarsArraysAndComments) {
  auto doc = ParseToml(R"(
top = 1   # comment
[a.b]
s = "x\ty\u00e9\"q\""
'quoted key' = 'literal \n'
i = -42
f = 2.5e-1
t = true
arr = ["p", "q", ]  # trailing comma
empty = []
)");
  ASSERT_TRUE(doc.ok()) << doc.status();
  EXPECT_EQ(std::get<int64_t>(doc->at("").at("top").value), 1);
  const auto& sec = doc->at("a.b");
  EXPECT_EQ(std::get<std::string>(sec.at("s").value), "x\ty\u00e9\"q\"");
  EXPECT_EQ(std::get<std::string>(sec.at("quoted key").value), "literal \\n");
  EXPECT_EQ(std::get<int64_t>(sec.at("i").value), -42);
  EXPECT_EQ(std::get<double>(sec.at("f").value), 0.25);
  EXPECT_EQ(std::get<bool>(sec.at("t").value), true);
  EXPECT_EQ(std::get<TomlArray>(sec.at("arr").value).size(), 2u);
  EXPECT_TRUE(std::get<TomlArray>(sec.at("empty").value).empty());
  EXPECT_EQ(sec.at("i").line, 6);
}

TEST(TomlTest, SyntaxErrorsCarryPositions) {
  EXPECT_THAT(ParseToml("a = \"open").status().message(), HasSubstr("unterminated string"));
  EXPECT_THAT(ParseToml("\n\nx = [1,\n2]").status().message(), HasSubstr("line 3"));
  EXPECT_THAT(ParseToml("a = 1\na = 2").status().message(), HasSubstr("duplicate key 'a'"));
  EXPECT_THAT(ParseToml("[s]\n[s]").status().message(), HasSubstr("duplicate section [s]"));
  EXPECT_THAT(ParseToml("a = nope").status().message(), HasSubstr("cannot parse value 'nope'"));
  EXPECT_THAT(ParseToml("a 1").status().message(), HasSubstr("expected '='"));
  EXPECT_THAT(ParseToml("a = \"\\q\"").status().message(), HasSubstr("unknown escape"));
  EXPECT_THAT(ParseToml("a = 1 2").status().message(), HasSubstr("unexpected text"));
}

TEST(RunConfigTest, MinimalDefaults) {
  auto cfg = ParseRunConfig(kMinimal, "/base");
  ASSERT_TRUE(cfg.ok()) << cfg.status();
  EXPECT_EQ(cfg->pair.Tag(), "de-en");
  EXPECT_EQ(cfg->source, "/base/src.de");
  EXPECT_EQ(cfg->submissions.at("sysA"), "/base/a.en");
  EXPECT_EQ(cfg->bt.type, "echo");
  EXPECT_EQ(cfg->metrics, pipeline::AllMetrics());
  EXPECT_EQ(cfg->cache_dir, "/base/cache");
  EXPECT_EQ(cfg->output_dir, "/base/runs");
  EXPECT_EQ(cfg->workers, 1);
  EXPECT_TRUE(cfg->embeddings.empty());
}

TEST(RunConfigTest, FullSchema) {
  const std::string text = std::string(kMinimal) + R"(
[embedding.en]
id = "enc"
type = "http"
endpoint = "http://localhost:9000/v1"
batch_size = 8
parallelism = 2
rate_limit = 5
initial_backoff = 0.1

[embedding.default]
id = "fx"
type = "fixture"
path = "../emb/e.jsonl"

[human]
da = "/abs/da.csv"
darr = "darr.tsv"

[run]
metrics = ["rtt-bleu", "rtt-sbert"]
output_dir = "out"
workers = 3
)";
  auto cfg = ParseRunConfig(text, "/base/cfg");
  ASSERT_TRUE(cfg.ok()) << cfg.status();
  EXPECT_EQ(cfg->embeddings.at("en").batch_size, 8);
  EXPECT_EQ(cfg->embeddings.at("en").parallelism, 2);
  EXPECT_EQ(cfg->embeddings.at("en").rate_limit, 5.0);
  EXPECT_EQ(cfg->embeddings.at("en").kind, providers::ProviderKind::kEmbedding);
  EXPECT_EQ(cfg->embeddings.at("default").path, "/base/emb/e.jsonl");
  EXPECT_EQ(cfg->da, "/abs/da.csv");
  EXPECT_EQ(cfg->darr, "/base/cfg/darr.tsv");
  EXPECT_TRUE(cfg->win_ratios.empty());
  EXPECT_THAT(cfg->metrics, ElementsAre(pipeline::MetricId::kBleu, pipeline::MetricId::kSbert));
  EXPECT_EQ(cfg->output_dir, "/base/cfg/out");
  EXPECT_EQ(cfg->workers, 3);
}

TEST(RunConfigTest, SchemaErrors) {
  const std::string base(kMinimal);
  struct Case {
    std::string text;
    std::string message;
  };
  const Case cases[] = {
      {base + "[extra]\n", "unknown section [extra]"},
      {base + "[run]\nmetric = []\n", "unknown key 'metric' in [run]"},
      {base + "[run]\nmetrics = [\"rtt-meteor\"]\n", "rtt-meteor"},
      {base + "[run]\nworkers = 0\n", "workers must be >= 1"},
      {base + "[run]\nworkers = \"2\"\n", "run.workers must be an integer"},
      {base + "[embedding.en]\nid = \"x\"\ntype = \"echo\"\n", "unknown embedding provider type"},
      {base + "[embedding.en]\nid = \"x\"\ntype = \"fixture\"\n", "needs a path"},
      {"stray = 1\n" + base, "outside any section"},
      {"[submissions]\na = \"a\"\n[bt]\nid = \"e\"\ntype = \"echo\"\n", "missing [testset]"},
      {"[testset]\npair = \"de-en\"\nsource = \"s\"\n[bt]\nid = \"e\"\ntype = \"echo\"\n",
       "lists no systems"},
      {"[testset]\npair = \"deen\"\nsource = \"s\"\n", "malformed language pair"},
      {"[testset]\npair = \"de-en\"\n", "missing required key 'source' in [testset]"},
  };
  for (const Case& c : cases) {
    auto cfg = ParseRunConfig(c.text, "/base");
    ASSERT_FALSE(cfg.ok()) << c.text;
    EXPECT_EQ(cfg.status().code(), absl::StatusCode::kInvalidArgument);
    EXPECT_THAT(cfg.status().message(), HasSubstr(c.message)) << c.text;
  }
}

TEST(RunConfigTest, LoadResolvesAgainstConfigDirectory) {
  test_util::TempDir dir;
  test_util::WriteFileOrDie(dir / "sub/config.toml", kMinimal);
  auto cfg = LoadRunConfig(dir / "sub/config.toml");
  ASSERT_TRUE(cfg.ok()) << cfg.status();
  EXPECT_EQ(cfg->source, (dir.path() / "sub/src.de").string());
  EXPECT_EQ(cfg->config_path, (dir.path() / "sub/config.toml").string());

  auto missing = LoadRunConfig(dir / "absent.toml");
  EXPECT_EQ(missing.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_THAT(missing.status().message(), HasSubstr("absent.toml"));
}

TEST(ValidatePathsTest, MissingFilesAreNamed) {
  test_util::TempDir dir;
  test_util::WriteFileOrDie(dir / "config.toml",
                            std::string(kMinimal) +
                                "[embedding.default]\nid = \"f\"\ntype = \"fixture\"\n"
                                "path = \"emb.jsonl\"\n[human]\nda = \"da.csv\"\n");
  auto cfg = LoadRunConfig(dir / "config.toml");
  ASSERT_TRUE(cfg.ok()) << cfg.status();

  absl::Status s = ValidatePaths(*cfg, {});
  EXPECT_EQ(s.code(), absl::StatusCode::kInvalidArgument);
  EXPECT_THAT(s.message(), HasSubstr("testset.source: file not found: " + (dir / "src.de")));

  test_util::WriteFileOrDie(dir / "src.de", "x\n");
  EXPECT_THAT(ValidatePaths(*cfg, {}).message(), HasSubstr("submissions.sysA"));
  test_util::WriteFileOrDie(dir / "a.en", "x\n");
  EXPECT_TRUE(ValidatePaths(*cfg, {}).ok());

  s = ValidatePaths(*cfg, {.inputs = false, .embeddings = true});
  EXPECT_EQ(s.code(), absl::StatusCode::kNotFound);
  EXPECT_THAT(s.message(), HasSubstr("embedding.default.path"));

  s = ValidatePaths(*cfg, {.inputs = false, .human = true});
  EXPECT_EQ(s.code(), absl::StatusCode::kInvalidArgument);
  EXPECT_THAT(s.message(), HasSubstr("human.da"));
}

}  // namespace
}  // namespace rttqe::config
