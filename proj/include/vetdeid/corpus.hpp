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

// Notes, identifier spans, and the JSONL interchange format.
//
// One note per line:
//   {"id":..., "sentence":..., "spans":[{"start","end","label","entity"}...],
//    "provenance":"real"|"synthetic_pii"|"synthetic_nopii", "seed_id":...}
// Offsets are code point offsets into `sentence`, end exclusive.

#ifndef VETDEID_CORPUS_HPP_
#define VETDEID_CORPUS_HPP_

#include <array>
#include <compare>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vetdeid {

enum class Label { kPer, kOrg, kLoc, kTime, kMisc };

inline constexpr std::array<Label, 5> kAllLabels = {
    Label::kPer, Label::kOrg, Label::kLoc, Label::kTime, Label::kMisc};

std::string_view LabelName(Label label);
// Throws Error(kUnknownLabel) for anything but the five admissible names.
Label ParseLabel(std::string_view name);
inline std::size_t LabelIndex(Label label) {
  return static_cast<std::size_t>(label);
}

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  Label label = Label::kPer;
  std::string entity;

  std::size_t length() const { return end - start; }
  bool operator==(const Span&) const = default;
};

inline bool SpanLess(const Span& a, const Span& b) {
  if (a.start != b.start) return a.start < b.start;
  return a.end < b.end;
}

enum class Provenance { kReal, kSyntheticPii, kSyntheticNoPii };

std::string_view ProvenanceName(Provenance p);
Provenance ParseProvenance(std::string_view name);

struct Note {
  std::string id;
  std::string sentence;
  std::vector<Span> spans;
  Provenance provenance = Provenance::kReal;
  std::optional<std::string> seed_id;

  bool operator==(const Note&) const = default;
};

struct Corpus {
  std::vector<Note> notes;
  std::string subset_name;

  bool operator==(const Corpus&) const = default;
};

enum class FindingKind {
  kOutOfBounds,
  kSurfaceMismatch,
  kOverlappingSpans,
  kUnsorted,
  kProvenanceConflict,
  kDroppedOverlap,  // warning, only with allow_overlaps
};

std::string_view FindingKindName(FindingKind kind);

struct Finding {
  FindingKind kind;
  std::size_t span_index;  // index into the input span list
  std::string message;
  bool is_error = true;
};

struct ValidationReport {
  std::vector<Finding> findings;
  // Input spans sorted by (start, end) with overlap drops applied. Only
  // meaningful when ok().
  std::vector<Span> canonical_spans;

  bool empty() const { return findings.empty(); }
  bool ok() const;
};

// Checks every Note/Span invariant. With allow_overlaps, overlapping spans are
// resolved by keeping the longer span (ties: earlier start) and each drop is
// recorded as a warning.
ValidationReport ValidateNote(const Note& note, bool allow_overlaps);

struct ParseOptions {
  bool allow_overlaps = false;
};

// Parses a JSONL corpus. Spans are canonicalized to (start, end) order.
// Errors carry the 1-based line number and, where known, the note id.
Corpus ParseJsonl(const std::filesystem::path& path,
                  const ParseOptions& options = {});
Corpus ParseJsonlString(std::string_view content,
                        const ParseOptions& options = {});
Note ParseNoteLine(std::string_view line, std::size_t line_number,
                   const ParseOptions& options = {});

std::string NoteToJsonLine(const Note& note);
std::string CorpusToJsonl(const Corpus& corpus);
// Atomic: writes a sibling temp file then renames it over `path`.
void WriteJsonl(const Corpus& corpus, const std::filesystem::path& path);

// Round half away from zero; the single rounding rule used across the
// toolkit. Values within 1e-9 of a half are snapped first so decimal inputs
// such as 0.05 * 1249 round as their exact rational would.
long long RoundHalfAway(double x);

}  // namespace vetdeid

#endif  // VETDEID_CORPUS_HPP_
