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

#include "vetdeid/placeholder.hpp"

#include "vetdeid/text.hpp"

namespace vetdeid {
namespace {

bool IsAsciiAlnum(char32_t c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
         (c >= '0' && c <= '9');
}

// Splits a candidate body into role and index if well-formed.
bool Classify(std::u32string_view body, std::string& role, unsigned& index) {
  std::size_t k = body.size();
  while (k > 0 && body[k - 1] >= '0' && body[k - 1] <= '9') --k;
  if (k == 0 || k == body.size() || body[k] == '0') return false;
  if (body.size() - k > 9) return false;
  const std::u32string_view name = body.substr(0, k);
  if (name.front() == '_' || name.back() == '_') return false;
  for (std::size_t i = 0; i < name.size(); ++i) {
    const char32_t c = name[i];
    if (c == '_') {
      if (name[i - 1] == '_') return false;
    } else if (!(c >= 'A' && c <= 'Z')) {
      return false;
    }
  }
  role.assign(name.begin(), name.end());
  index = 0;
  for (std::size_t i = k; i < body.size(); ++i) {
    index = index * 10 + static_cast<unsigned>(body[i] - '0');
  }
  return true;
}

}  // namespace

std::vector<PlaceholderToken> ScanPlaceholders(std::u32string_view t) {
  std::vector<PlaceholderToken> tokens;
  const std::size_t n = t.size();
  std::size_t i = 0;
  while (i + 1 < n) {
    if (t[i] != '_' || t[i + 1] != '_') {
      ++i;
      continue;
    }
    std::size_t j = i + 2;
    while (j < n) {
      if (IsAsciiAlnum(t[j])) {
        ++j;
      } else if (t[j] == '_' && j > i + 2 && IsAsciiAlnum(t[j - 1]) &&
                 j + 1 < n && IsAsciiAlnum(t[j + 1])) {
        ++j;
      } else {
        break;
      }
    }
    if (j == i + 2 || j + 1 >= n || t[j] != '_' || t[j + 1] != '_') {
      ++i;
      continue;
    }
    PlaceholderToken tok;
    tok.start = i;
    tok.end = j + 2;
    tok.token = text::Encode(t.substr(i, tok.end - i));
    tok.well_formed = Classify(t.substr(i + 2, j - i - 2), tok.role, tok.index);
    if (!tok.well_formed) tok.role.clear();
    tokens.push_back(std::move(tok));
    i = j + 2;
  }
  return tokens;
}

std::vector<PlaceholderToken> ScanPlaceholders(std::string_view text) {
  const std::u32string cps = text::Decode(text);
  return ScanPlaceholders(std::u32string_view(cps));
}

std::string MakePlaceholder(std::string_view role, unsigned index) {
  return "__" + std::string(role) + std::to_string(index) + "__";
}

}  // namespace vetdeid
