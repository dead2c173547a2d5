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

#include <doctest.h>

#include <string>

#include "vetdeid/error.hpp"
#include "vetdeid/random.hpp"
#include "vetdeid/text.hpp"

using namespace vetdeid;

TEST_CASE("utf8 decode and encode round trip") {
  const std::string s = "Zoë 🐕 café";
  const std::u32string cps = text::Decode(s);
  CHECK(cps.size() == 10);
  CHECK(text::Encode(cps) == s);
  CHECK(text::CodePointLength(s) == 10);
  CHECK(text::Substr(s, 0, 3) == "Zoë");
  CHECK(text::Substr(s, 4, 5) == "🐕");
}

TEST_CASE("invalid utf8 is rejected") {
  CHECK_THROWS_AS(text::Decode("\xC3"), Error);
  CHECK_THROWS_AS(text::Decode("\xFF"), Error);
  CHECK_THROWS_AS(text::Decode("\xED\xA0\x80"), Error);  // surrogate
}

TEST_CASE("offset map agrees with prefix decoding") {
  const std::string s = "aé€🐕b";
  text::OffsetMap map(s);
  REQUIRE(map.size() == 5);
  for (std::size_t cp = 0; cp <= 5; ++cp) {
    CHECK(text::Encode(text::Decode(s).substr(0, cp)).size() ==
          map.byte_offset(cp));
  }
}

TEST_CASE("word count uses whitespace runs") {
  CHECK(text::WordCount("") == 0);
  CHECK(text::WordCount("  a  b\tc\n") == 3);
  CHECK(text::WordCount("Seen by __VET1__.") == 3);
}

TEST_CASE("normalize folds case, collapses whitespace, composes") {
  CHECK(text::Normalize("  Seen\tby  DR Pole ") == "seen by dr pole");
  CHECK(text::Normalize("seen by dr pole") == "seen by dr pole");
  CHECK(text::Normalize("Zo\xC3\xAB") == text::Normalize("Zoe\xCC\x88"));
}

TEST_CASE("xoshiro256** matches an independent reference") {
  // Reference: seed state with four SplitMix64 outputs, then the published
  // xoshiro256** recurrence.
  std::uint64_t sm = 12345;
  auto splitmix = [&]() {
    std::uint64_t z = (sm += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  std::uint64_t s[4] = {splitmix(), splitmix(), splitmix(), splitmix()};
  auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
  Rng rng(12345);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t expected = rotl(s[1] * 5, 7) * 9;
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    REQUIRE(rng.Next() == expected);
  }
}

TEST_CASE("bounded draws stay in range and sample without repeats") {
  Rng rng(9);
  for (int i = 0; i < 10000; ++i) CHECK(rng.Below(7) < 7);
  const auto idx = SampleWithoutReplacement(50, 50, rng);
  std::vector<bool> seen(50, false);
  for (auto i : idx) {
    CHECK_FALSE(seen[i]);
    seen[i] = true;
  }
}
