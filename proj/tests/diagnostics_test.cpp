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

#include <json.hpp>

#include "vetdeid/diagnostics.hpp"
#include "vetdeid/error.hpp"

using namespace vetdeid;

namespace {

std::string Words(std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += i ? " ab" : "ab";
  return s;
}

// A note whose spans carry the given labels; all entities are distinct.
Note WithLabels(const std::string& id, const std::vector<Label>& labels) {
  Note n{id, "", {}, Provenance::kSyntheticPii, {}};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::string e = "e" + std::to_string(i);
    const std::size_t b = n.sentence.size();
    n.sentence += e + " ";
    n.spans.push_back({b, b + e.size(), labels[i], e});
  }
  return n;
}

Corpus ByLabelCounts(const std::array<std::size_t, 5>& counts) {
  Corpus c;
  std::size_t k = 0;
  for (Label l : kAllLabels) {
    for (std::size_t i = 0; i < counts[LabelIndex(l)]; ++i) {
      c.notes.push_back(WithLabels("n" + std::to_string(k++), {l}));
    }
  }
  return c;
}

}  // namespace

TEST_CASE("quartiles") {
  const Quartiles q = ComputeQuartiles({5, 1, 4, 2, 3});
  CHECK(q.median == 3.0);
  CHECK(q.q1 == 2.0);
  CHECK(q.q3 == 4.0);
  const Quartiles e = ComputeQuartiles({1, 2, 3, 4});
  CHECK(e.median == doctest::Approx(2.5));
  CHECK(e.q1 == doctest::Approx(1.75));
}

TEST_CASE("subset stats") {
  Corpus c;
  c.subset_name = "train";
  c.notes.push_back({"a", Words(3), {}, Provenance::kReal, {}});
  c.notes.push_back({"b", "Zoë ab", {{0, 3, Label::kPer, "Zoë"}}, Provenance::kReal, {}});
  const SubsetStats s = ComputeSubsetStats(c);
  CHECK(s.n_notes == 2);
  CHECK(s.n_with_span == 1);
  CHECK(s.pct_with_span() == doctest::Approx(50.0));
  CHECK(s.total_spans == 1);
  CHECK(s.words.median == doctest::Approx(2.5));
  CHECK(s.chars.median == doctest::Approx(7.0));  // 8 and 6 code points
  CHECK_THROWS_AS(ComputeSubsetStats(Corpus{}), Error);
}

TEST_CASE("structural stats") {
  Corpus c;
  c.notes.push_back(WithLabels("a", {Label::kPer, Label::kTime}));
  c.notes.push_back(WithLabels("b", {Label::kOrg}));
  Note rep{"c", "Pole saw pole", {{0, 4, Label::kPer, "Pole"}, {9, 13, Label::kPer, "pole"}},
           Provenance::kReal, {}};
  c.notes.push_back(rep);
  c.notes.push_back({"d", "nothing", {}, Provenance::kReal, {}});
  const StructuralStats s = ComputeStructuralStats(c);
  CHECK(s.n_pii_notes == 3);
  CHECK(s.notes_with_label[LabelIndex(Label::kPer)] == 2);
  CHECK(s.n_no_per == 1);
  CHECK(s.n_repetition == 1);
  CHECK(s.pct_no_per() == doctest::Approx(100.0 / 3));
  CHECK(HasRepetition(rep));
  CHECK_FALSE(HasRepetition(c.notes[0]));

  Corpus none;
  none.notes.push_back({"d", "nothing", {}, Provenance::kReal, {}});
  try {
    ComputeStructuralStats(none);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNoPiiNotes);
  }
  CHECK_FALSE(Diagnose(none).structure.has_value());
}

TEST_CASE("label distribution shift against published counts") {
  const Diagnostics train = Diagnose(ByLabelCounts({343, 41, 26, 98, 25}));
  const Diagnostics syn = Diagnose(ByLabelCounts({4229, 569, 46, 408, 192}));
  CHECK(train.labels.total == 533);
  CHECK(syn.labels.total == 5444);
  CHECK(train.labels.pct(Label::kPer) == doctest::Approx(64.4).epsilon(0.001));
  const ShiftReport shift = Compare(train, syn);
  const ShiftField* per = shift.Find("PER_share_delta");
  REQUIRE(per != nullptr);
  REQUIRE(per->value);
  CHECK(*per->value == doctest::Approx(13.3).epsilon(0.005));
  CHECK(per->direction == Direction::kHigher);
  CHECK(shift.Find("LOC_share_delta")->direction == Direction::kLower);
  CHECK(shift.Find("no_per_delta") != nullptr);
}

TEST_CASE("length ratio") {
  Corpus real;
  for (int i = 0; i < 3; ++i) {
    real.notes.push_back({"r" + std::to_string(i), std::string(333, 'a'), {}, Provenance::kReal, {}});
  }
  Corpus syn;
  syn.notes.push_back({"s", std::string(231, 'a'), {}, Provenance::kSyntheticNoPii, {}});
  const ShiftReport shift = Compare(Diagnose(real), Diagnose(syn));
  const ShiftField* f = shift.Find("median_chars_ratio");
  REQUIRE(f != nullptr);
  CHECK(f->is_ratio);
  CHECK(*f->value == doctest::Approx(231.0 / 333.0));
  CHECK(*f->value == doctest::Approx(0.69).epsilon(0.01));
  CHECK(f->direction == Direction::kLower);
  // No PII on either side: no structural fields.
  CHECK(shift.Find("no_per_delta") == nullptr);
}

TEST_CASE("serializers") {
  std::vector<Diagnostics> d = {Diagnose(ByLabelCounts({2, 1, 0, 1, 0}))};
  d[0].subset.name = "x";
  const auto j = nlohmann::json::parse(DiagnosticsToJson(d));
  CHECK(j["subsets"].size() == 1);
  CHECK(DiagnosticsToTable(d).find("x") != std::string::npos);
  CHECK_FALSE(DiagnosticsToCsv(d).empty());
  const ShiftReport s = Compare(d[0], d[0]);
  CHECK(s.Find("PER_share_delta")->direction == Direction::kEqual);
  CHECK(nlohmann::json::parse(ShiftToJson(s))["shift"].is_array());
  CHECK_FALSE(ShiftToTable(s).empty());
  CHECK_FALSE(ShiftToCsv(s).empty());
}
