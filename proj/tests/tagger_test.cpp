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
#include <vector>

#include "vetdeid/error.hpp"
#include "vetdeid/tagger.hpp"
#include "vetdeid/text.hpp"

using namespace vetdeid;

namespace {

// Substring at code point offsets, for checking recorded spans.
std::string At(std::string_view s, const Span& sp) {
  const std::u32string cps = text::Decode(s);
  return text::Encode(cps.substr(sp.start, sp.end - sp.start));
}

}  // namespace

TEST_CASE("gazetteer lookup") {
  Gazetteer g;
  g.Add("Dr Pole", Label::kPer);
  const std::string t = "Seen by Dr Pole.";
  const auto spans = g.Tag(t);
  REQUIRE(spans.size() == 1);
  CHECK(spans[0] == Span{8, 15, Label::kPer, "Dr Pole"});
  CHECK(At(t, spans[0]) == "Dr Pole");
  CHECK(t.find("Dr Pole") == 8);
}

TEST_CASE("longest match wins") {
  Gazetteer g;
  g.Add("Pole", Label::kPer);
  g.Add("Dr Pole", Label::kPer);
  const auto spans = g.Tag("Dr Pole and Pole");
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].entity == "Dr Pole");
  CHECK(spans[1].start == 12);
}

TEST_CASE("word boundaries and code point offsets") {
  Gazetteer g;
  g.Add("Zoë", Label::kPer);
  g.Add("Pole", Label::kPer);
  CHECK(g.Tag("Poles and tadpole").empty());
  const std::string t = "Épée: Zoë, Pole";
  const auto spans = g.Tag(t);
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].start == 6);
  CHECK(At(t, spans[0]) == "Zoë");
  CHECK(At(t, spans[1]) == "Pole");
}

TEST_CASE("case folding is opt-in") {
  Gazetteer exact;
  exact.Add("Oakvale Vets", Label::kOrg);
  CHECK(exact.Tag("oakvale vets").empty());
  Gazetteer folded(true);
  folded.Add("Oakvale Vets", Label::kOrg);
  const auto spans = folded.Tag("at OAKVALE VETS");
  REQUIRE(spans.size() == 1);
  CHECK(spans[0].entity == "OAKVALE VETS");
  CHECK(folded.Lookup("oakvale vets") == Label::kOrg);
}

TEST_CASE("conflicting labels are refused") {
  Gazetteer g;
  g.Add("Paris", Label::kLoc);
  CHECK_NOTHROW(g.Add("Paris", Label::kLoc));
  CHECK(g.size() == 1);
  try {
    g.Add("Paris", Label::kPer);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kGazetteerConflict);
  }
  CHECK_THROWS_AS(g.Add("", Label::kPer), Error);
}

TEST_CASE("pattern rules fill residual text") {
  Gazetteer g;
  for (auto& r : DefaultPatternRules(Detector::Default())) g.AddRule(std::move(r));
  g.Add("Dr Pole", Label::kPer);
  const std::string t = "Dr Pole on 01/02/2021 at 14:30, chip 985112003456789";
  const auto spans = g.Tag(t);
  REQUIRE(spans.size() == 4);
  CHECK(spans[1].label == Label::kTime);
  CHECK(At(t, spans[1]) == "01/02/2021");
  CHECK(spans[2].label == Label::kTime);
  CHECK(spans[3].label == Label::kMisc);
  for (std::size_t i = 1; i < spans.size(); ++i) CHECK(spans[i - 1].end <= spans[i].start);
}

TEST_CASE("from pools honours exclusions") {
  EntityPool pools;
  pools.AddSurfaces("VET", {"Dr Amy Pole"});
  pools.AddSurfaces("CLINIC", {"Oakvale Vets"});
  GazetteerOptions opt;
  opt.use_patterns = false;
  opt.exclude_roles = {"CLINIC"};
  const Gazetteer g = Gazetteer::FromPools(pools, Allowlist::Default(), opt);
  CHECK(g.Lookup("Dr Amy Pole") == Label::kPer);
  CHECK_FALSE(g.Lookup("Oakvale Vets"));
  CHECK(g.rules().empty());

  Corpus c;
  c.notes.push_back({"a", "Dr Amy Pole at Oakvale Vets", {}, Provenance::kReal, {}});
  const auto preds = TagCorpus(c, g);
  REQUIRE(preds.size() == 1);
  CHECK(preds[0].doc_id == "a");
  CHECK(preds[0].spans.size() == 1);

  EntityPool stray;
  stray.AddSurfaces("NOT_A_ROLE", {"x"});
  CHECK_THROWS_AS(Gazetteer::FromPools(stray, Allowlist::Default()), Error);
}
