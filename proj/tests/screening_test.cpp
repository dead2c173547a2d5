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

#include <cmath>
#include <map>
#include <random>
#include <string>

#include "vetdeid/error.hpp"
#include "vetdeid/screening.hpp"
#include "vetdeid/text.hpp"

using namespace vetdeid;

namespace {

// Naive shingle-multiset cosine.
double OracleCosine(const std::string& a, const std::string& b, std::size_t k) {
  auto shingles = [k](const std::string& s) {
    std::map<std::u32string, double> m;
    const std::u32string cps = text::Decode(text::Normalize(s));
    for (std::size_t i = 0; i + k <= cps.size(); ++i) m[cps.substr(i, k)] += 1;
    return m;
  };
  const auto ma = shingles(a);
  const auto mb = shingles(b);
  double dot = 0, na = 0, nb = 0;
  for (const auto& [g, c] : ma) {
    na += c * c;
    auto it = mb.find(g);
    if (it != mb.end()) dot += c * it->second;
  }
  for (const auto& [g, c] : mb) nb += c * c;
  return na * nb == 0 ? 0 : dot / std::sqrt(na * nb);
}

Note N(std::string id, std::string text) {
  return Note{std::move(id), std::move(text), {}, Provenance::kSyntheticNoPii,
              std::nullopt};
}

}  // namespace

TEST_CASE("config validation") {
  ScreeningConfig c;
  CHECK_NOTHROW(c.Validate());
  c.near_dup_threshold = 0;
  CHECK_THROWS_AS(c.Validate(), Error);
  c.near_dup_threshold = 1.0;
  c.shingle_size = 1;
  CHECK_THROWS_AS(c.Validate(), Error);
}

TEST_CASE("detector defaults") {
  const Detector d = Detector::Default();
  auto names = [&](const std::string& s) {
    std::vector<std::string> out;
    for (const auto& f : d.Detect(s)) out.push_back(f.pattern);
    return out;
  };
  const auto chip = d.Detect("microchip 9851120003456789");
  REQUIRE(chip.size() == 1);
  CHECK(chip[0].pattern == "digit_run");
  CHECK(chip[0].start == 10);
  CHECK(chip[0].end == 26);
  CHECK(d.Detect("Seen by __VET1__ today").empty());
  CHECK(names("Dr Watson reviewed bloods") == std::vector<std::string>{"honorific_name"});
  CHECK(names("seen 01/02/2021") == std::vector<std::string>{"numeric_date"});
  CHECK(names("seen 3rd March 2020") == std::vector<std::string>{"month_date"});
  CHECK(names("mail a.b@vets.co.uk") == std::vector<std::string>{"email"});
  CHECK(names("postcode SW1A 1AA") == std::vector<std::string>{"uk_postcode"});
  CHECK(names("at 14:30 today") == std::vector<std::string>{"clock_time"});
  CHECK(d.Detect("weight 12 kg, temp 38.5").empty());
}

TEST_CASE("detector offsets are code points") {
  const auto f = Detector::Default().Detect("Zoë 1234567");
  REQUIRE(f.size() == 1);
  CHECK(f[0].start == 4);
  CHECK(f[0].end == 11);
}

TEST_CASE("bad pattern is a config error") {
  CHECK_THROWS_AS(NamedPattern("bad", "(unclosed"), Error);
}

TEST_CASE("similarity") {
  const ScreeningConfig cfg;
  CHECK(Similarity("bright and alert", "bright and alert", cfg) == doctest::Approx(1.0));
  CHECK(Similarity("aaaaaaa", "bbbbbbb", cfg) == 0.0);
  CHECK(Similarity("abc", "ABC", cfg) == 1.0);   // short, equal after folding
  CHECK(Similarity("abc", "abd", cfg) == 0.0);   // short, different
  const std::string a = "the dog was bright and alert on arrival";
  const std::string b = "the dog was quiet and alert on arrival";
  CHECK(Similarity(a, b, cfg) == doctest::Approx(OracleCosine(a, b, 5)));
  CHECK(Similarity(a, b, cfg) == Similarity(b, a, cfg));
}

TEST_CASE("crafted pair sharing half the shingle mass") {
  // "aaaaabbbbb" has shingles aaaaa, aaaab, aaabb, aabbb, abbbb, bbbbb.
  // "aaaaaccccc" shares only aaaaa: cosine 1/6 by hand.
  const ScreeningConfig cfg;
  CHECK(Similarity("aaaaabbbbb", "aaaaaccccc", cfg) == doctest::Approx(1.0 / 6.0));
  // Counts {x:2, y:2} vs {x:2, z:2}: half the mass shared, cosine 1/2.
  CHECK(Similarity("xxxxxxyyyyyy", "xxxxxxzzzzzz", ScreeningConfig{0.9, 6}) ==
        doctest::Approx(OracleCosine("xxxxxxyyyyyy", "xxxxxxzzzzzz", 6)));
}

TEST_CASE("random similarity agrees with the naive oracle") {
  std::mt19937 gen(11);
  const char* words[] = {"dog", "cat", "bright", "alert", "vomiting", "rest",
                         "Zoë", "café", "  ", "owner"};
  for (int i = 0; i < 300; ++i) {
    std::string a, b;
    for (int k = 0; k < 8; ++k) a += std::string(words[gen() % 10]) + " ";
    b = a;
    for (int k = 0; k < 3; ++k) b += std::string(words[gen() % 10]) + " ";
    const ScreeningConfig cfg{0.9, 2 + gen() % 5};
    REQUIRE(Similarity(a, b, cfg) ==
            doctest::Approx(OracleCosine(a, b, cfg.shingle_size)).epsilon(1e-12));
  }
}

TEST_CASE("dedup basics") {
  Corpus pool;
  pool.notes = {N("a", "Bright and alert on arrival."),
                N("b", "Bright and alert on arrival.   "),
                N("c", "Completely different text about ear cleaning."),
                N("d", "bright AND alert on arrival.")};
  const DedupResult r = Dedup(pool, Corpus{}, ScreeningConfig{});
  CHECK(r.report.retained == std::vector<std::string>{"a", "c"});
  REQUIRE(r.report.dropped.size() == 2);
  CHECK(r.report.dropped[0].id == "b");
  CHECK(r.report.dropped[0].reason == DropReason::kExactDup);
  CHECK(r.report.dropped[0].of_id == "a");
  CHECK(r.report.dropped[1].reason == DropReason::kExactDup);
}

TEST_CASE("near duplicates and seeds") {
  const std::string base =
      "The patient presented with a two day history of vomiting and lethargy, "
      "appetite reduced, drinking normally, no diarrhoea reported by owner";
  const std::string near = base + " today";
  const ScreeningConfig cfg;
  const double s = OracleCosine(base, near, 5);
  REQUIRE(s >= 0.9);
  Corpus pool;
  pool.notes = {N("a", base), N("b", near), N("c", "Ear cleaning advised weekly.")};
  DedupResult r = Dedup(pool, Corpus{}, cfg);
  CHECK(r.report.retained == std::vector<std::string>{"a", "c"});
  REQUIRE(r.report.dropped.size() == 1);
  CHECK(r.report.dropped[0].reason == DropReason::kNearDup);
  CHECK(r.report.dropped[0].similarity == doctest::Approx(s));

  Corpus seeds;
  seeds.notes = {N("seed", near)};
  r = Dedup(pool, seeds, cfg);
  CHECK(r.report.retained == std::vector<std::string>{"c"});
  for (const auto& d : r.report.dropped) {
    CHECK(d.reason == DropReason::kSeedDup);
    CHECK(d.of_id == "seed");
  }
}

TEST_CASE("dissimilar pool is kept whole and dedup is idempotent") {
  std::mt19937 gen(5);
  Corpus pool;
  for (int i = 0; i < 300; ++i) {
    std::string t;
    for (int k = 0; k < 12; ++k) t += static_cast<char>('a' + gen() % 26);
    pool.notes.push_back(N("n" + std::to_string(i), t));
  }
  const DedupResult r = Dedup(pool, Corpus{}, ScreeningConfig{});
  CHECK(r.report.dropped.empty());
  const DedupResult again = Dedup(r.retained, Corpus{}, ScreeningConfig{});
  CHECK(again.report.retained == r.report.retained);
}

TEST_CASE("prefix-filtered dedup matches brute force") {
  std::mt19937 gen(21);
  const char* words[] = {"dog", "cat", "vomit", "alert", "rest", "ear", "skin",
                         "lame", "bloods", "recheck", "diet", "weight"};
  Corpus pool;
  for (int i = 0; i < 400; ++i) {
    std::string t;
    const int len = 3 + static_cast<int>(gen() % 6);
    for (int k = 0; k < len; ++k) t += std::string(words[gen() % 12]) + " ";
    pool.notes.push_back(N("n" + std::to_string(i), t));
  }
  for (double th : {0.5, 0.7, 0.9, 0.95}) {
    const ScreeningConfig cfg{th, 4};
    const DedupResult r = Dedup(pool, Corpus{}, cfg);
    // Brute-force sequential pass.
    std::vector<std::string> kept;
    std::vector<std::string> kept_ids;
    for (const Note& n : pool.notes) {
      bool drop = false;
      for (const std::string& k : kept) {
        if (text::Normalize(k) == text::Normalize(n.sentence) ||
            Similarity(k, n.sentence, cfg) >= th) {
          drop = true;
          break;
        }
      }
      if (!drop) {
        kept.push_back(n.sentence);
        kept_ids.push_back(n.id);
      }
    }
    CHECK(r.report.retained == kept_ids);
    // Retained notes are pairwise below the threshold.
    for (std::size_t i = 0; i < kept.size(); ++i) {
      for (std::size_t j = i + 1; j < kept.size(); ++j) {
        REQUIRE(Similarity(kept[i], kept[j], cfg) < th);
      }
    }
  }
}

TEST_CASE("dedup report jsonl") {
  Corpus pool;
  pool.notes = {N("a", "same text here"), N("b", "same text here")};
  const DedupResult r = Dedup(pool, Corpus{}, ScreeningConfig{});
  const std::string j = DedupReportToJsonl(r.report, {"a", "b"});
  CHECK(j.find(R"("id":"a","status":"retained")") != std::string::npos);
  CHECK(j.find(R"("id":"b","status":"exact_dup","of":"a")") != std::string::npos);
}
