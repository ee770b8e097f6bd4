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

#include <unicode/unistr.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "rttqe/status_macros.h"

namespace rttqe::config {
namespace {

namespace fs = std::filesystem;

bool IsBareKeyChar(char c) {
  return absl::ascii_isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

// Parses one line at a time; `pos_` indexes into the current line.
class LineParser {
 public:
  LineParser(absl::string_view line, int line_no) : line_(line), line_no_(line_no) {}

  absl::Status Error(absl::string_view what) const {
    return absl::InvalidArgumentError(
        absl::StrCat("line ", line_no_, ", column ", pos_ + 1, ": ", what));
  }

  void SkipSpace() {
    while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
  }

  bool AtEnd() {
    SkipSpace();
    return pos_ >= line_.size() || line_[pos_] == '#';
  }

  bool Consume(char c) {
    SkipSpace();
    if (pos_ < line_.size() && line_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  absl::StatusOr<std::string> Key() {
    SkipSpace();
    if (pos_ < line_.size() && line_[pos_] == '"') return String();
    if (pos_ < line_.size() && line_[pos_] == '\'') return LiteralString();
    const size_t start = pos_;
    while (pos_ < line_.size() && IsBareKeyChar(line_[pos_])) ++pos_;
    if (pos_ == start) return Error("expected a key");
    return std::string(line_.substr(start, pos_ - start));
  }

  absl::StatusOr<std::string> SectionName() {
    SkipSpace();
    const size_t start = pos_;
    while (pos_ < line_.size() && (IsBareKeyChar(line_[pos_]) || line_[pos_] == '.')) {
      ++pos_;
    }
    std::string name(line_.substr(start, pos_ - start));
    if (name.empty() || name.front() == '.' || name.back() == '.' ||
        name.find("..") != std::string::npos) {
      return Error("malformed section name");
    }
    return name;
  }

  absl::StatusOr<TomlValue> Value() {
    SkipSpace();
    if (pos_ >= line_.size()) return Error("expected a value");
    TomlValue v;
    v.line = line_no_;
    const char c = line_[pos_];
    if (c == '"') {
      RTTQE_ASSIGN_OR_RETURN(std::string s, String());
      v.value = std::move(s);
      return v;
    }
    if (c == '\'') {
      RTTQE_ASSIGN_OR_RETURN(std::string s, LiteralString());
      v.value = std::move(s);
      return v;
    }
    if (c == '[') {
      ++pos_;
      TomlArray items;
      while (!Consume(']')) {
        if (AtEnd()) return Error("unterminated array (arrays must fit on one line)");
        RTTQE_ASSIGN_OR_RETURN(TomlValue item, Value());
        items.push_back(std::move(item));
        if (!Consume(',')) {
          if (!Consume(']')) return Error("expected ',' or ']'");
          break;
        }
      }
      v.value = std::move(items);
      return v;
    }
    const size_t start = pos_;
    while (pos_ < line_.size() &&
           (absl::ascii_isalnum(static_cast<unsigned char>(line_[pos_])) ||
            line_[pos_] == '.' || line_[pos_] == '+' || line_[pos_] == '-' ||
            line_[pos_] == '_')) {
      ++pos_;
    }
    std::string token(line_.substr(start, pos_ - start));
    if (token == "true" || token == "false") {
      v.value = token == "true";
      return v;
    }
    std::string digits;
    for (char d : token) {
      if (d != '_') digits.push_back(d);
    }
    int64_t i = 0;
    double d = 0.0;
    if (absl::SimpleAtoi(digits, &i)) {
      v.value = i;
    } else if (!digits.empty() &&
               (absl::ascii_isdigit(static_cast<unsigned char>(digits.back())) ||
                digits.back() == '.') &&
               absl::SimpleAtod(digits, &d)) {
      v.value = d;
    } else {
      pos_ = start;
      return Error(absl::StrCat("cannot parse value '", token, "'"));
    }
    return v;
  }

 private:
  // 'text': no escapes.
  absl::StatusOr<std::string> LiteralString() {
    const size_t start = ++pos_;
    const size_t end = line_.find('\'', start);
    if (end == absl::string_view::npos) return Error("unterminated string");
    pos_ = end + 1;
    return std::string(line_.substr(start, end - start));
  }

  absl::StatusOr<std::string> String() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < line_.size()) {
      const char c = line_[pos_++];
      if (c == '"') return out;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (pos_ >= line_.size()) break;
      const char e = line_[pos_++];
      switch (e) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case 'b': out.push_back('\b'); break;
        case 'f': out.push_back('\f'); break;
        case 'u':
        case 'U': {
          const size_t len = e == 'u' ? 4 : 8;
          uint32_t cp = 0;
          const char* first = line_.data() + pos_;
          const char* last = first + len;
          if (pos_ + len > line_.size() ||
              std::from_chars(first, last, cp, 16).ptr != last || cp > 0x10FFFF ||
              (cp >= 0xD800 && cp <= 0xDFFF)) {
            return Error("bad unicode escape");
          }
          pos_ += len;
          icu::UnicodeString(static_cast<UChar32>(cp)).toUTF8String(out);
          break;
        }
        default:
          return Error(absl::StrCat("unknown escape '\\", std::string(1, e), "'"));
      }
    }
    return Error("unterminated string");
  }

  absl::string_view line_;
  int line_no_;
  size_t pos_ = 0;
};

// Typed access to one section, tracking the key path for error messages.
class Section {
 public:
  Section(std::string name, const std::map<std::string, TomlValue>& entries)
      : name_(std::move(name)), entries_(entries) {}

  absl::Status CheckKeys(const std::set<std::string>& allowed) const {
    for (const auto& [key, value] : entries_) {
      if (!allowed.contains(key)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "line ", value.line, ": unknown key '", key, "' in [", name_,
            "]; expected one of: ", absl::StrJoin(allowed, ", ")));
      }
    }
    return absl::OkStatus();
  }

  bool Has(const std::string& key) const { return entries_.contains(key); }

  absl::StatusOr<std::string> String(const std::string& key, bool required) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
      if (required) return Missing(key);
      return std::string();
    }
    if (const auto* s = std::get_if<std::string>(&it->second.value)) return *s;
    return WrongType(it->second, key, "a string");
  }

  absl::StatusOr<double> Number(const std::string& key, double fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    if (const auto* d = std::get_if<double>(&it->second.value)) return *d;
    if (const auto* i = std::get_if<int64_t>(&it->second.value)) {
      return static_cast<double>(*i);
    }
    return WrongType(it->second, key, "a number");
  }

  absl::StatusOr<int> Int(const std::string& key, int fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    if (const auto* i = std::get_if<int64_t>(&it->second.value)) {
      return static_cast<int>(*i);
    }
    return WrongType(it->second, key, "an integer");
  }

  absl::StatusOr<std::vector<std::string>> StringList(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::vector<std::string>();
    const auto* array = std::get_if<TomlArray>(&it->second.value);
    if (array == nullptr) return WrongType(it->second, key, "an array of strings");
    std::vector<std::string> out;
    for (const TomlValue& item : *array) {
      const auto* s = std::get_if<std::string>(&item.value);
      if (s == nullptr) return WrongType(it->second, key, "an array of strings");
      out.push_back(*s);
    }
    return out;
  }

  const std::map<std::string, TomlValue>& entries() const { return entries_; }
  const std::string& name() const { return name_; }

 private:
  absl::Status Missing(const std::string& key) const {
    return absl::InvalidArgumentError(
        absl::StrCat("missing required key '", key, "' in [", name_, "]"));
  }
  absl::Status WrongType(const TomlValue& v, const std::string& key,
                         absl::string_view expected) const {
    return absl::InvalidArgumentError(absl::StrCat(
        "line ", v.line, ": ", name_, ".", key, " must be ", expected));
  }

  std::string name_;
  const std::map<std::string, TomlValue>& entries_;
};

std::string Resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty()) return path;
  fs::path p(path);
  if (p.is_relative()) p = fs::path(base_dir) / p;
  return p.lexically_normal().string();
}

absl::StatusOr<providers::ProviderConfig> ParseProvider(
    const Section& section, providers::ProviderKind kind, const std::string& base_dir) {
  RTTQE_RETURN_IF_ERROR(section.CheckKeys(
      {"id", "type", "endpoint", "path", "auth", "rate_limit", "timeout",
       "max_retries", "batch_size", "parallelism", "initial_backoff"}));
  providers::ProviderConfig p;
  p.kind = kind;
  RTTQE_ASSIGN_OR_RETURN(p.provider_id, section.String("id", true));
  RTTQE_ASSIGN_OR_RETURN(p.type, section.String("type", true));
  RTTQE_ASSIGN_OR_RETURN(p.endpoint, section.String("endpoint", false));
  RTTQE_ASSIGN_OR_RETURN(std::string path, section.String("path", false));
  p.path = Resolve(base_dir, path);
  RTTQE_ASSIGN_OR_RETURN(p.auth, section.String("auth", false));
  RTTQE_ASSIGN_OR_RETURN(p.rate_limit, section.Number("rate_limit", p.rate_limit));
  RTTQE_ASSIGN_OR_RETURN(p.timeout, section.Number("timeout", p.timeout));
  RTTQE_ASSIGN_OR_RETURN(p.max_retries, section.Int("max_retries", p.max_retries));
  RTTQE_ASSIGN_OR_RETURN(p.batch_size, section.Int("batch_size", p.batch_size));
  RTTQE_ASSIGN_OR_RETURN(p.parallelism, section.Int("parallelism", p.parallelism));
  RTTQE_ASSIGN_OR_RETURN(p.initial_backoff,
                         section.Number("initial_backoff", p.initial_backoff));
  if (absl::Status s = p.Validate(); !s.ok()) {
    return absl::InvalidArgumentError(absl::StrCat("[", section.name(), "] ", s.message()));
  }
  return p;
}

absl::Status CheckFile(const std::string& path, absl::string_view key,
                       absl::StatusCode code = absl::StatusCode::kInvalidArgument) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    return absl::Status(code, absl::StrCat(key, ": file not found: ", path));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<TomlDocument> ParseToml(absl::string_view text) {
  TomlDocument doc;
  std::set<std::string> seen_headers;
  std::string section;
  doc[section];
  int line_no = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    LineParser p(line, line_no);
    if (p.AtEnd()) continue;
    if (p.Consume('[')) {
      RTTQE_ASSIGN_OR_RETURN(section, p.SectionName());
      if (!p.Consume(']')) return p.Error("expected ']'");
      if (!p.AtEnd()) return p.Error("unexpected text after section header");
      if (!seen_headers.insert(section).second) {
        return p.Error(absl::StrCat("duplicate section [", section, "]"));
      }
      doc[section];
      continue;
    }
    RTTQE_ASSIGN_OR_RETURN(std::string key, p.Key());
    if (!p.Consume('=')) return p.Error("expected '='");
    RTTQE_ASSIGN_OR_RETURN(TomlValue value, p.Value());
    if (!p.AtEnd()) return p.Error("unexpected text after value");
    if (!doc[section].emplace(key, std::move(value)).second) {
      return p.Error(absl::StrCat("duplicate key '", key, "'"));
    }
  }
  return doc;
}

absl::StatusOr<RunConfig> ParseRunConfig(absl::string_view text,
                                         const std::string& base_dir) {
  RTTQE_ASSIGN_OR_RETURN(TomlDocument doc, ParseToml(text));
  RunConfig config;
  static const std::map<std::string, TomlValue> kEmpty;
  auto section = [&](const std::string& name) {
    auto it = doc.find(name);
    return Section(name, it == doc.end() ? kEmpty : it->second);
  };

  for (const auto& [name, entries] : doc) {
    const bool known = name == "testset" || name == "submissions" || name == "bt" ||
                       name == "human" || name == "run" ||
                       absl::StartsWith(name, "embedding.");
    if (name.empty()) {
      if (!entries.empty()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "line ", entries.begin()->second.line, ": key '",
            entries.begin()->first, "' is outside any section"));
      }
    } else if (!known) {
      return absl::InvalidArgumentError(absl::StrCat(
          "unknown section [", name, "]; expected testset, submissions, bt, "
          "embedding.<lang>, human or run"));
    }
  }

  if (!doc.contains("testset")) return absl::InvalidArgumentError("missing [testset]");
  Section testset = section("testset");
  RTTQE_RETURN_IF_ERROR(testset.CheckKeys({"pair", "source", "reference"}));
  RTTQE_ASSIGN_OR_RETURN(std::string pair, testset.String("pair", true));
  RTTQE_ASSIGN_OR_RETURN(config.pair, corpus::ParseLanguagePair(pair));
  RTTQE_ASSIGN_OR_RETURN(std::string source, testset.String("source", true));
  config.source = Resolve(base_dir, source);
  RTTQE_ASSIGN_OR_RETURN(std::string reference, testset.String("reference", false));
  config.reference = Resolve(base_dir, reference);

  Section submissions = section("submissions");
  for (const auto& [system, value] : submissions.entries()) {
    RTTQE_ASSIGN_OR_RETURN(std::string path, submissions.String(system, true));
    config.submissions[system] = Resolve(base_dir, path);
  }
  if (config.submissions.empty()) {
    return absl::InvalidArgumentError("[submissions] lists no systems");
  }

  if (!doc.contains("bt")) return absl::InvalidArgumentError("missing [bt]");
  RTTQE_ASSIGN_OR_RETURN(config.bt, ParseProvider(section("bt"),
                                                  providers::ProviderKind::kTranslation,
                                                  base_dir));

  for (const auto& [name, entries] : doc) {
    if (!absl::StartsWith(name, "embedding.")) continue;
    const std::string lang = name.substr(std::string("embedding.").size());
    if (lang.find('.') != std::string::npos) {
      return absl::InvalidArgumentError(absl::StrCat("malformed section [", name, "]"));
    }
    RTTQE_ASSIGN_OR_RETURN(config.embeddings[lang],
                           ParseProvider(Section(name, entries),
                                         providers::ProviderKind::kEmbedding, base_dir));
  }

  Section human = section("human");
  RTTQE_RETURN_IF_ERROR(human.CheckKeys({"da", "darr", "win_ratios"}));
  for (auto [key, slot] : {std::pair{"da", &config.da}, std::pair{"darr", &config.darr},
                           std::pair{"win_ratios", &config.win_ratios}}) {
    RTTQE_ASSIGN_OR_RETURN(std::string path, human.String(key, false));
    *slot = Resolve(base_dir, path);
  }

  Section run = section("run");
  RTTQE_RETURN_IF_ERROR(run.CheckKeys({"metrics", "cache_dir", "output_dir", "workers"}));
  RTTQE_ASSIGN_OR_RETURN(std::vector<std::string> metrics, run.StringList("metrics"));
  if (metrics.empty()) {
    config.metrics = pipeline::AllMetrics();
  } else {
    RTTQE_ASSIGN_OR_RETURN(config.metrics,
                           pipeline::ParseMetricList(absl::StrJoin(metrics, ",")));
  }
  RTTQE_ASSIGN_OR_RETURN(std::string cache_dir, run.String("cache_dir", false));
  config.cache_dir = Resolve(base_dir, cache_dir.empty() ? "cache" : cache_dir);
  RTTQE_ASSIGN_OR_RETURN(std::string output_dir, run.String("output_dir", false));
  config.output_dir = Resolve(base_dir, output_dir.empty() ? "runs" : output_dir);
  RTTQE_ASSIGN_OR_RETURN(config.workers, run.Int("workers", 1));
  if (config.workers < 1) return absl::InvalidArgumentError("run.workers must be >= 1");
  return config;
}

absl::StatusOr<RunConfig> LoadRunConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::InvalidArgumentError(absl::StrCat("config file not found: ", path));
  }
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  const fs::path absolute = fs::absolute(path).lexically_normal();
  auto config = ParseRunConfig(text, absolute.parent_path().string());
  if (!config.ok()) {
    return absl::Status(config.status().code(),
                        absl::StrCat(path, ": ", config.status().message()));
  }
  config->config_path = absolute.string();
  return config;
}

absl::Status ValidatePaths(const RunConfig& config, const PathChecks& checks) {
  if (checks.inputs) {
    RTTQE_RETURN_IF_ERROR(CheckFile(config.source, "testset.source"));
    if (!config.reference.empty()) {
      RTTQE_RETURN_IF_ERROR(CheckFile(config.reference, "testset.reference"));
    }
    for (const auto& [system, path] : config.submissions) {
      RTTQE_RETURN_IF_ERROR(CheckFile(path, absl::StrCat("submissions.", system)));
    }
    if (config.bt.type == "table") {
      RTTQE_RETURN_IF_ERROR(CheckFile(config.bt.path, "bt.path"));
    }
  }
  if (checks.embeddings) {
    for (const auto& [lang, provider] : config.embeddings) {
      if (provider.type == "fixture") {
        RTTQE_RETURN_IF_ERROR(CheckFile(provider.path,
                                        absl::StrCat("embedding.", lang, ".path"),
                                        absl::StatusCode::kNotFound));
      }
    }
  }
  if (checks.human) {
    for (auto [key, path] : {std::pair{"human.da", &config.da},
                             std::pair{"human.darr", &config.darr},
                             std::pair{"human.win_ratios", &config.win_ratios}}) {
      if (!path->empty()) RTTQE_RETURN_IF_ERROR(CheckFile(*path, key));
    }
  }
  return absl::OkStatus();
}

}  // namespace rttqe::config
