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

// Text normalization and tokenization shared by the lexical metrics.
//
// The two word tokenizers reproduce the reference BLEU scorer's "13a" and
// "intl" tokenizers token for token (see tests/fixtures/tokenization_golden.tsv).
// All entry points NFC-normalize their input first.

#ifndef RTTQE_TEXTNORM_H_
#define RTTQE_TEXTNORM_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace rttqe::textnorm {

enum class TokenizationScheme {
  k13a,
  kIntl,
  kCharStream,
};

absl::string_view SchemeName(TokenizationScheme scheme);
absl::StatusOr<TokenizationScheme> ParseScheme(absl::string_view name);

struct RawSegment {
  std::string id;
  std::string text;
  std::string lang;

  bool operator==(const RawSegment&) const = default;
};

struct TokenSequence {
  std::vector<std::string> tokens;
  TokenizationScheme scheme = TokenizationScheme::kIntl;
  // False when the text was lowercased before tokenization.
  bool cased = true;

  size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

// Canonical composition (NFC). Invalid UTF-8 sequences become U+FFFD.
std::string NormalizeNfc(absl::string_view text);

// Unicode default lowercase mapping (context-sensitive, e.g. final sigma),
// the same mapping the reference scorer applies for "case.lc".
std::string Lowercase(absl::string_view text);

// Whitespace as understood by the reference tokenizers (Python str.isspace).
bool IsTokenizerSpace(char32_t cp);

// CJK Unified Ideographs, Extension A and Compatibility Ideographs.
bool IsCjkIdeograph(char32_t cp);

// True when `text` is well-formed UTF-8. On failure `bad_offset`, when
// given, receives the byte offset of the first invalid sequence.
bool IsValidUtf8(absl::string_view text, size_t* bad_offset = nullptr);

TokenSequence Tokenize(absl::string_view text, TokenizationScheme scheme,
                       bool lowercase);

// Surrounds every CJK ideograph with single spaces. Whitespace adjacent to
// an ideograph collapses to one space; other spans are left as they are.
std::string SplitCjkChars(absl::string_view text);

// Non-whitespace code points of `text` in order, one per token.
TokenSequence CharStream(absl::string_view text);

std::string JoinTokens(const TokenSequence& seq);

}  // namespace rttqe::textnorm

#endif  // RTTQE_TEXTNORM_H_
