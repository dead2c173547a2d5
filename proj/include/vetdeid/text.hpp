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

// UTF-8 helpers. All offsets exposed by this library count Unicode scalar
// values (code points), never bytes.

#ifndef VETDEID_TEXT_HPP_
#define VETDEID_TEXT_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vetdeid::text {

// Decodes UTF-8. Throws Error(kMalformedLine) on invalid input.
std::u32string Decode(std::string_view utf8);
std::string Encode(std::u32string_view cps);
void AppendCodePoint(std::string& out, char32_t cp);

std::size_t CodePointLength(std::string_view utf8);

// Substring in code point coordinates [start, end).
std::string Substr(std::string_view utf8, std::size_t start, std::size_t end);

// Maps code point offsets to byte offsets and back. Built once per string.
class OffsetMap {
 public:
  explicit OffsetMap(std::string_view utf8);

  std::size_t size() const { return byte_of_.size() - 1; }
  std::size_t byte_offset(std::size_t cp) const { return byte_of_[cp]; }
  // Byte offset must fall on a code point boundary.
  std::size_t cp_offset(std::size_t byte) const;

 private:
  std::vector<std::size_t> byte_of_;  // size() + 1 entries
};

bool IsWhitespace(char32_t cp);
bool IsAlnum(char32_t cp);
bool IsPunct(char32_t cp);
// Simple (length-preserving) case fold of one code point.
char32_t FoldSimple(char32_t cp);

// Number of maximal non-whitespace runs.
std::size_t WordCount(std::string_view utf8);

// NFC, full case fold, whitespace runs collapsed to one space, trimmed.
std::string Normalize(std::string_view utf8);
std::string ToNfc(std::string_view utf8);
std::string CaseFold(std::string_view utf8);

// Stable 64-bit FNV-1a over bytes.
std::uint64_t Fnv1a64(std::string_view bytes);

}  // namespace vetdeid::text

#endif  // VETDEID_TEXT_HPP_
