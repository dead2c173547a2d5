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

// Lexical scanning of placeholder tokens of the form __ROLE<k>__.
//
// A candidate is "__", a body of ASCII alphanumeric runs joined by single
// underscores, then "__". A candidate is well-formed when its body is an
// upper-case role ([A-Z]+ joined by single underscores) followed by a
// positive decimal index without leading zeros, e.g. __VET1__ or
// __DATE_GENERIC12__. Other candidates (__vet1__, __VET__, __VET01__) are
// malformed.

#ifndef VETDEID_PLACEHOLDER_HPP_
#define VETDEID_PLACEHOLDER_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace vetdeid {

struct PlaceholderToken {
  std::string token;  // full text including underscores
  std::string role;   // empty when malformed
  unsigned index = 0;
  std::size_t start = 0;  // code points
  std::size_t end = 0;
  bool well_formed = false;
};

std::vector<PlaceholderToken> ScanPlaceholders(std::string_view text);
std::vector<PlaceholderToken> ScanPlaceholders(std::u32string_view text);

std::string MakePlaceholder(std::string_view role, unsigned index);

}  // namespace vetdeid

#endif  // VETDEID_PLACEHOLDER_HPP_
