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

#include "rttqe/textnorm.h"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_replace.h"
#include "absl/strings/string_view.h"

namespace rttqe::textnorm {

namespace {

std::u32string DecodeUtf8(absl::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const int32_t length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    out.push_back(c < 0 ? U'\uFFFD' : static_cast<char32_t>(c));
  }
  return out;
}

void AppendUtf8(char32_t cp, std::string& out) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t len = 0;
  U8_APPEND_UNSAFE(buf, len, static_cast<UChar32>(cp));
  out.append(reinterpret_cast<const char*>(buf), len);
}

std::string EncodeUtf8(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) AppendUtf8(cp, out);
  return out;
}

bool IsDecimalDigit(char32_t cp) {
  return u_charType(static_cast<UChar32>(cp)) == U_DECIMAL_DIGIT_NUMBER;
}

bool IsAsciiDigit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }

// Unicode general category P*. The reference scorer builds its punctuation
// class by pasting every P code point into a regex bracket expression, where
// the backslash ends up escaping the following ']' and so never matches
// itself. We reproduce that.
bool IsIntlPunctuation(char32_t cp) {
  if (cp == U'\\') return false;
  switch (u_charType(static_cast<UChar32>(cp))) {
    case U_CONNECTOR_PUNCTUATION:
    case U_DASH_PUNCTUATION:
    case U_START_PUNCTUATION:
    case U_END_PUNCTUATION:
    case U_INITIAL_PUNCTUATION:
    case U_FINAL_PUNCTUATION:
    case U_OTHER_PUNCTUATION:
      return true;
    default:
      return false;
  }
}

bool IsSymbol(char32_t cp) {
  switch (u_charType(static_cast<UChar32>(cp))) {
    case U_MATH_SYMBOL:
    case U_CURRENCY_SYMBOL:
    case U_MODIFIER_SYMBOL:
    case U_OTHER_SYMBOL:
      return true;
    default:
      return false;
  }
}

// The 13a bracket expression [\{-\~\[-\` -\&\(-\+\:-\@\/].
bool Is13aSplitChar(char32_t cp) {
  return (cp >= U'{' && cp <= U'~') || (cp >= U'[' && cp <= U'`') ||
         (cp >= U' ' && cp <= U'&') || (cp >= U'(' && cp <= U'+') ||
         (cp >= U':' && cp <= U'@') || cp == U'/';
}

bool IsPeriodOrComma(char32_t cp) { return cp == U'.' || cp == U','; }

enum class PairRewrite {
  kSpaceAfterBoth,   // \1 \2_   ->  "a b "
  kSpaceBeforeBoth,  // _\1 \2   -> " a b"
};

// Emulates a left-to-right, non-overlapping regex substitution of a
// two-character pattern ([first][second]).
template <typename First, typename Second>
std::u32string RewritePairs(std::u32string_view in, First first, Second second,
                            PairRewrite rewrite) {
  std::u32string out;
  out.reserve(in.size() * 2);
  size_t i = 0;
  while (i < in.size()) {
    if (i + 1 < in.size() && first(in[i]) && second(in[i + 1])) {
      if (rewrite == PairRewrite::kSpaceAfterBoth) {
        out.push_back(in[i]);
        out.push_back(U' ');
        out.push_back(in[i + 1]);
        out.push_back(U' ');
      } else {
        out.push_back(U' ');
        out.push_back(in[i]);
        out.push_back(U' ');
        out.push_back(in[i + 1]);
      }
      i += 2;
    } else {
      out.push_back(in[i]);
      ++i;
    }
  }
  return out;
}

template <typename Pred>
std::u32string PadSingles(std::u32string_view in, Pred pred) {
  std::u32string out;
  out.reserve(in.size() * 2);
  for (char32_t cp : in) {
    if (pred(cp)) {
      out.push_back(U' ');
      out.push_back(cp);
      out.push_back(U' ');
    } else {
      out.push_back(cp);
    }
  }
  return out;
}

std::vector<std::string> SplitOnSpace(std::u32string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char32_t cp : text) {
    if (IsTokenizerSpace(cp)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      AppendUtf8(cp, current);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<std::string> Tokenize13a(absl::string_view text) {
  std::string norm = absl::StrReplaceAll(text, {{"<skipped>", ""}});
  norm = absl::StrReplaceAll(norm, {{"-\n", ""}});
  norm = absl::StrReplaceAll(norm, {{"\n", " "}});
  norm = absl::StrReplaceAll(norm, {{"&quot;", "\""}});
  norm = absl::StrReplaceAll(norm, {{"&amp;", "&"}});
  norm = absl::StrReplaceAll(norm, {{"&lt;", "<"}});
  norm = absl::StrReplaceAll(norm, {{"&gt;", ">"}});

  std::u32string cps = U" " + DecodeUtf8(norm) + U" ";
  cps = PadSingles(cps, Is13aSplitChar);
  auto not_ascii_digit = [](char32_t c) { return !IsAsciiDigit(c); };
  cps = RewritePairs(cps, not_ascii_digit, IsPeriodOrComma,
                     PairRewrite::kSpaceAfterBoth);
  cps = RewritePairs(cps, IsPeriodOrComma, not_ascii_digit,
                     PairRewrite::kSpaceBeforeBoth);
  cps = RewritePairs(
      cps, IsAsciiDigit, [](char32_t c) { return c == U'-'; },
      PairRewrite::kSpaceAfterBoth);
  return SplitOnSpace(cps);
}

std::vector<std::string> TokenizeIntl(absl::string_view text) {
  std::u32string cps = DecodeUtf8(text);
  auto not_digit = [](char32_t c) { return !IsDecimalDigit(c); };
  cps = RewritePairs(cps, not_digit, IsIntlPunctuation,
                     PairRewrite::kSpaceAfterBoth);
  cps = RewritePairs(cps, IsIntlPunctuation, not_digit,
                     PairRewrite::kSpaceBeforeBoth);
  cps = PadSingles(cps, IsSymbol);
  return SplitOnSpace(cps);
}

}  // namespace

absl::string_view SchemeName(TokenizationScheme scheme) {
  switch (scheme) {
    case TokenizationScheme::k13a:
      return "13a";
    case TokenizationScheme::kIntl:
      return "intl";
    case TokenizationScheme::kCharStream:
      return "char";
  }
  return "unknown";
}

absl::StatusOr<TokenizationScheme> ParseScheme(absl::string_view name) {
  if (name == "13a" || name == "TOK_13A") return TokenizationScheme::k13a;
  if (name == "intl" || name == "TOK_INTL") return TokenizationScheme::kIntl;
  if (name == "char" || name == "CHAR_STREAM") {
    return TokenizationScheme::kCharStream;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown tokenization scheme '", name, "'"));
}

std::string NormalizeNfc(absl::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) return std::string(text);
  const icu::UnicodeString input = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  if (nfc->isNormalized(input, status) && U_SUCCESS(status)) {
    std::string out;
    input.toUTF8String(out);
    return out;
  }
  status = U_ZERO_ERROR;
  const icu::UnicodeString normalized = nfc->normalize(input, status);
  if (U_FAILURE(status)) return std::string(text);
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

std::string Lowercase(absl::string_view text) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  s.toLower(icu::Locale::getRoot());
  std::string out;
  s.toUTF8String(out);
  return out;
}

bool IsTokenizerSpace(char32_t cp) {
  return (cp >= 0x09 && cp <= 0x0D) || (cp >= 0x1C && cp <= 0x20) ||
         cp == 0x85 || cp == 0xA0 || cp == 0x1680 ||
         (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 || cp == 0x2029 ||
         cp == 0x202F || cp == 0x205F || cp == 0x3000;
}

bool IsCjkIdeograph(char32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF) ||
         (cp >= 0xF900 && cp <= 0xFAFF);
}

bool IsValidUtf8(absl::string_view text, size_t* bad_offset) {
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const int32_t length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) {
      if (bad_offset != nullptr) *bad_offset = static_cast<size_t>(start);
      return false;
    }
  }
  return true;
}

TokenSequence Tokenize(absl::string_view text, TokenizationScheme scheme,
                       bool lowercase) {
  if (scheme == TokenizationScheme::kCharStream) {
    TokenSequence seq = CharStream(lowercase ? Lowercase(text) : text);
    seq.cased = !lowercase;
    return seq;
  }
  std::string norm = NormalizeNfc(text);
  if (lowercase) norm = Lowercase(norm);
  TokenSequence seq;
  seq.scheme = scheme;
  seq.cased = !lowercase;
  seq.tokens = scheme == TokenizationScheme::k13a ? Tokenize13a(norm)
                                                  : TokenizeIntl(norm);
  return seq;
}

std::string SplitCjkChars(absl::string_view text) {
  const std::u32string cps = DecodeUtf8(NormalizeNfc(text));
  std::u32string out;
  out.reserve(cps.size() * 2);
  // Set after an ideograph: whitespace that follows is swallowed and a single
  // separator is emitted before the next non-space code point.
  bool pending_separator = false;
  for (char32_t cp : cps) {
    if (IsCjkIdeograph(cp)) {
      while (!out.empty() && IsTokenizerSpace(out.back())) out.pop_back();
      if (!out.empty()) out.push_back(U' ');
      out.push_back(cp);
      pending_separator = true;
    } else if (pending_separator && IsTokenizerSpace(cp)) {
      continue;
    } else {
      if (pending_separator) out.push_back(U' ');
      pending_separator = false;
      out.push_back(cp);
    }
  }
  return EncodeUtf8(out);
}

TokenSequence CharStream(absl::string_view text) {
  TokenSequence seq;
  seq.scheme = TokenizationScheme::kCharStream;
  for (char32_t cp : DecodeUtf8(NormalizeNfc(text))) {
    if (IsTokenizerSpace(cp)) continue;
    std::string token;
    AppendUtf8(cp, token);
    seq.tokens.push_back(std::move(token));
  }
  return seq;
}

std::string JoinTokens(const TokenSequence& seq) {
  return absl::StrJoin(seq.tokens, " ");
}

}  // namespace rttqe::textnorm
