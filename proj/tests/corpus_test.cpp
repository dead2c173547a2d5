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

#include <filesystem>
#include <random>
#include <string>

#include "vetdeid/corpus.hpp"
#include "vetdeid/error.hpp"
#include "vetdeid/io.hpp"
#include "vetdeid/text.hpp"

using namespace vetdeid;

namespace {

ErrorCode CodeOf(const std::string& jsonl, ParseOptions opts = {}) {
  try {
    ParseJsonlString(jsonl, opts);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("minimal line parses") {
  const Corpus c = ParseJsonlString(
      R"({"id":"n1","sentence":"ab","spans":[],"provenance":"real"})");
  REQUIRE(c.notes.size() == 1);
  CHECK(c.notes[0].spans.empty());
  CHECK(c.notes[0].provenance == Provenance::kReal);
  CHECK_FALSE(c.notes[0].seed_id.has_value());
}

TEST_CASE("labels") {
  for (Label l : kAllLabels) CHECK(ParseLabel(LabelName(l)) == l);
  CHECK_THROWS_AS(ParseLabel("NAME"), Error);
  CHECK(CodeOf(R"({"id":"n","sentence":"abcde","spans":[{"start":0,"end":1,"label":"per","entity":"a"}],"provenance":"real"})") ==
        ErrorCode::kUnknownLabel);
}

TEST_CASE("span violations") {
  CHECK(CodeOf(R"({"id":"n","sentence":"abcde","spans":[{"start":0,"end":10,"label":"PER","entity":"abcde"}],"provenance":"real"})") ==
        ErrorCode::kOutOfBounds);
  CHECK(CodeOf(R"({"id":"n","sentence":"Seen Dr Pol","spans":[{"start":5,"end":11,"label":"PER","entity":"Dr Pole"}],"provenance":"real"})") ==
        ErrorCode::kSurfaceMismatch);
  CHECK(CodeOf(R"({"id":"n","sentence":"abcdefghijklm","spans":[{"start":0,"end":10,"label":"PER","entity":"abcdefghij"},{"start":5,"end":12,"label":"PER","entity":"fghijkl"}],"provenance":"real"})") ==
        ErrorCode::kOverlappingSpans);
  CHECK(CodeOf(R"({"id":"n","sentence":"abc","spans":[{"start":0.5,"end":2,"label":"PER","entity":"ab"}],"provenance":"real"})") ==
        ErrorCode::kMalformedLine);
  CHECK(CodeOf(R"({"id":"n","sentence":"abc","spans":[{"start":0,"end":2,"label":"PER","entity":"ab"}],"provenance":"synthetic_nopii"})") ==
        ErrorCode::kProvenanceConflict);
  CHECK(CodeOf("{\"id\":\"a\",\"sentence\":\"x\",\"spans\":[],\"provenance\":\"real\"}\n"
               "{\"id\":\"a\",\"sentence\":\"y\",\"spans\":[],\"provenance\":\"real\"}") ==
        ErrorCode::kDuplicateId);
  CHECK(CodeOf("not json") == ErrorCode::kMalformedLine);
}

TEST_CASE("errors carry the line number") {
  try {
    ParseJsonlString("{\"id\":\"a\",\"sentence\":\"x\",\"spans\":[],\"provenance\":\"real\"}\n{oops");
    FAIL("no throw");
  } catch (const Error& e) {
    REQUIRE(e.line().has_value());
    CHECK(*e.line() == 2);
  }
}

TEST_CASE("validate_note overlap policy") {
  Note n{"n", "abcdefghijklm", {}, Provenance::kReal, std::nullopt};
  n.spans = {{0, 10, Label::kPer, "abcdefghij"}, {5, 12, Label::kPer, "fghijkl"}};
  const ValidationReport strict = ValidateNote(n, false);
  CHECK_FALSE(strict.ok());
  REQUIRE(strict.findings.size() == 1);
  CHECK(strict.findings[0].kind == FindingKind::kOverlappingSpans);

  const ValidationReport lenient = ValidateNote(n, true);
  CHECK(lenient.ok());
  REQUIRE(lenient.findings.size() == 1);
  CHECK(lenient.findings[0].kind == FindingKind::kDroppedOverlap);
  CHECK_FALSE(lenient.findings[0].is_error);
  REQUIRE(lenient.canonical_spans.size() == 1);
  CHECK(lenient.canonical_spans[0].start == 0);
  CHECK(lenient.canonical_spans[0].end == 10);

  Note clean{"c", "ab cd", {{0, 2, Label::kPer, "ab"}, {3, 5, Label::kLoc, "cd"}},
             Provenance::kReal, std::nullopt};
  CHECK(ValidateNote(clean, false).empty());
}

TEST_CASE("equal-length overlaps keep the earlier span") {
  Note n{"n", "abcdefgh", {{2, 6, Label::kPer, "cdef"}, {0, 4, Label::kOrg, "abcd"}},
         Provenance::kReal, std::nullopt};
  const ValidationReport r = ValidateNote(n, true);
  REQUIRE(r.canonical_spans.size() == 1);
  CHECK(r.canonical_spans[0].start == 0);
}

TEST_CASE("spans are canonicalized to sorted order") {
  const Corpus c = ParseJsonlString(
      R"({"id":"n","sentence":"ab cd","spans":[{"start":3,"end":5,"label":"LOC","entity":"cd"},{"start":0,"end":2,"label":"PER","entity":"ab"}],"provenance":"real"})");
  REQUIRE(c.notes[0].spans.size() == 2);
  CHECK(c.notes[0].spans[0].start == 0);
  CHECK(c.notes[0].spans[1].start == 3);
}

TEST_CASE("write then parse is the identity, including non-ASCII offsets") {
  std::mt19937 gen(4);
  const std::string alphabet[] = {"a", "b", " ", "é", "ß", "Zoë", "🐕", "東"};
  Corpus c;
  c.subset_name = "roundtrip";
  for (int i = 0; i < 200; ++i) {
    Note n;
    n.id = "n" + std::to_string(i);
    std::size_t len = 0;
    const int pieces = 3 + static_cast<int>(gen() % 20);
    for (int k = 0; k < pieces; ++k) n.sentence += alphabet[gen() % 8];
    len = text::CodePointLength(n.sentence);
    std::size_t pos = 0;
    while (pos + 2 < len && gen() % 2) {
      const std::size_t start = pos + gen() % 2;
      const std::size_t end = start + 1 + gen() % 2;
      if (end > len) break;
      n.spans.push_back({start, end, kAllLabels[gen() % 5],
                         text::Substr(n.sentence, start, end)});
      pos = end;
    }
    n.provenance = n.spans.empty() ? Provenance::kSyntheticNoPii
                                   : Provenance::kSyntheticPii;
    if (i % 3 == 0) n.seed_id = "s" + std::to_string(i);
    c.notes.push_back(std::move(n));
  }
  const auto path = std::filesystem::temp_directory_path() / "vetdeid_rt.jsonl";
  WriteJsonl(c, path);
  const Corpus back = ParseJsonl(path);
  CHECK(back.notes == c.notes);
  for (const Note& n : back.notes) {
    for (const Span& s : n.spans) {
      CHECK(text::Substr(n.sentence, s.start, s.end) == s.entity);
    }
  }
  std::filesystem::remove(path);
}

TEST_CASE("key order is fixed") {
  Note n{"n1", "Zoë", {{0, 3, Label::kPer, "Zoë"}}, Provenance::kReal, std::nullopt};
  CHECK(NoteToJsonLine(n) ==
        R"({"id":"n1","sentence":"Zoë","spans":[{"start":0,"end":3,"label":"PER","entity":"Zoë"}],"provenance":"real","seed_id":null})");
  CHECK(CorpusToJsonl(Corpus{}).empty());
}

TEST_CASE("round half away from zero") {
  CHECK(RoundHalfAway(62.45) == 62);
  CHECK(RoundHalfAway(0.5) == 1);
  CHECK(RoundHalfAway(-0.5) == -1);
  CHECK(RoundHalfAway(2.5) == 3);
  CHECK(RoundHalfAway(416.33) == 416);
  CHECK(RoundHalfAway(0.9 / 0.1 * 1249) == 11241);
}
