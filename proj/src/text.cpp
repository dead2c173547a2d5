// Copyright 2026 The vetdeid Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vetdeid/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>

#include "vetdeid/error.hpp"

namespace vetdeid::text {
namespace {

[[noreturn]] void BadUtf8(std::size_t at) {
  throw Error(ErrorCode::kMalformedLine,
              "invalid UTF-8 at byte " + std::to_string(at));
}

// Returns the code point starting at s[i] and advances i.
char32_t Next(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int extra;
  char32_t cp;
  if ((b0 & 0xE0) == 0xC0) {
    extra = 1;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    extra = 2;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    extra = 3;
    cp = b0 & 0x07;
  } else {
    BadUtf8(i);
  }
  for (int k = 1; k <= extra; ++k) {
    if (i + k >= s.size()) BadUtf8(i);
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) BadUtf8(i);
    cp = (cp << 6) | (b & 0x3F);
  }
  // Reject overlong forms, surrogates, and out-of-range values.
  static constexpr char32_t kMin[] = {0, 0x80, 0x800, 0x10000};
  if (cp < kMin[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    BadUtf8(i);
  }
  i += extra + 1;
  return cp;
}

icu::UnicodeString ToIcu(std::string_view utf8) {
  return icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
}

std::string FromIcu(const icu::UnicodeString& u) {
  std::string out;
  u.toUTF8String(out);
  return out;
}

const icu::Normalizer2& Nfc() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || nfc == nullptr) {
    throw Error(ErrorCode::kConfig, "ICU NFC normalizer unavailable");
  }
  return *nfc;
}

}  // namespace

std::u32string Decode(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  std::size_t i = 0;
  while (i < utf8.size()) out.push_back(Next(utf8, i));
  return out;
}

void AppendCodePoint(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string Encode(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) AppendCodePoint(out, cp);
  return out;
}

std::size_t CodePointLength(std::string_view utf8) {
  std::size_t n = 0;
  std::size_t i = 0;
  while (i < utf8.size()) {
    Next(utf8, i);
    ++n;
  }
  return n;
}

std::string Substr(std::string_view utf8, std::size_t start, std::size_t end) {
  OffsetMap map(utf8);
  start = std::min(start, map.size());
  end = std::clamp(end, start, map.size());
  const std::size_t b = map.byte_offset(start);
  return std::string(utf8.substr(b, map.byte_offset(end) - b));
}

OffsetMap::OffsetMap(std::string_view utf8) {
  byte_of_.reserve(utf8.size() + 1);
  std::size_t i = 0;
  while (i < utf8.size()) {
    byte_of_.push_back(i);
    Next(utf8, i);
  }
  byte_of_.push_back(utf8.size());
}

std::size_t OffsetMap::cp_offset(std::size_t byte) const {
  auto it = std::lower_bound(byte_of_.begin(), byte_of_.end(), byte);
  return static_cast<std::size_t>(it - byte_of_.begin());
}

bool IsWhitespace(char32_t cp) {
  return u_isUWhiteSpace(static_cast<UChar32>(cp)) != 0;
}

bool IsAlnum(char32_t cp) {
  return u_isalnum(static_cast<UChar32>(cp)) != 0;
}

bool IsPunct(char32_t cp) { return u_ispunct(static_cast<UChar32>(cp)) != 0; }

char32_t FoldSimple(char32_t cp) {
  return static_cast<char32_t>(
      u_foldCase(static_cast<UChar32>(cp), U_FOLD_CASE_DEFAULT));
}

std::size_t WordCount(std::string_view utf8) {
  std::size_t words = 0;
  bool in_word = false;
  std::size_t i = 0;
  while (i < utf8.size()) {
    const bool ws = IsWhitespace(Next(utf8, i));
    if (!ws && !in_word) ++words;
    in_word = !ws;
  }
  return words;
}

std::string ToNfc(std::string_view utf8) {
  Decode(utf8);  // validates
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString out = Nfc().normalize(ToIcu(utf8), status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::kMalformedLine, "NFC normalization failed");
  }
  return FromIcu(out);
}

std::string CaseFold(std::string_view utf8) {
  Decode(utf8);
  icu::UnicodeString u = ToIcu(utf8);
  u.foldCase(U_FOLD_CASE_DEFAULT);
  return FromIcu(u);
}

std::string Normalize(std::string_view utf8) {
  // Case folding can denormalize (e.g. some precomposed capitals), so NFC is
  // applied on both sides of the fold.
  const std::u32string cps = Decode(ToNfc(CaseFold(ToNfc(utf8))));
  std::string out;
  out.reserve(cps.size());
  bool pending_space = false;
  for (char32_t cp : cps) {
    if (IsWhitespace(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    AppendCodePoint(out, cp);
  }
  return out;
}

std::uint64_t Fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace vetdeid::text
