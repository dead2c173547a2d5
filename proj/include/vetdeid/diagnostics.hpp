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

// Descriptive corpus statistics: composition and note lengths, structure of
// PII-bearing notes, span label mix, and synthetic-vs-real shifts.
//
// Quartiles use linear interpolation at position (n - 1) q of the sorted
// sample. Words are maximal non-whitespace runs; characters are code points.

#ifndef VETDEID_DIAGNOSTICS_HPP_
#define VETDEID_DIAGNOSTICS_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vetdeid/corpus.hpp"

namespace vetdeid {

struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

// Throws Error(kEmptyInput) on an empty sample.
double Quantile(std::span<const double> sorted, double q);
Quartiles ComputeQuartiles(std::vector<double> values);

struct SubsetStats {
  std::string name;
  std::size_t n_notes = 0;
  std::size_t n_with_span = 0;
  Quartiles words;
  Quartiles chars;
  std::size_t total_spans = 0;

  double pct_with_span() const;
};

struct StructuralStats {
  std::string name;
  std::size_t n_pii_notes = 0;
  std::array<std::size_t, 5> notes_with_label{};  // indexed by LabelIndex
  std::size_t n_no_per = 0;
  std::size_t n_repetition = 0;

  double pct_label(Label l) const;
  double pct_no_per() const;
  double pct_repetition() const;
};

struct LabelDistribution {
  std::string name;
  std::array<std::size_t, 5> counts{};
  std::size_t total = 0;

  double pct(Label l) const;  // 0 when there are no spans
};

// Throws Error(kEmptyCorpus).
SubsetStats ComputeSubsetStats(const Corpus& corpus);
// Over PII-bearing notes only. Throws Error(kNoPiiNotes).
StructuralStats ComputeStructuralStats(const Corpus& corpus);
LabelDistribution ComputeLabelDistribution(const Corpus& corpus);

// True when two spans share a label and case-folded entity text.
bool HasRepetition(const Note& note);

struct Diagnostics {
  SubsetStats subset;
  std::optional<StructuralStats> structure;  // unset without PII notes
  LabelDistribution labels;
};

Diagnostics Diagnose(const Corpus& corpus);

enum class Direction { kLower, kEqual, kHigher };
std::string_view DirectionName(Direction d);

struct ShiftField {
  std::string name;
  double real = 0.0;
  double synthetic = 0.0;
  // Ratio fields: synthetic / real (unset when real is 0). Otherwise
  // synthetic - real, in percentage points.
  std::optional<double> value;
  bool is_ratio = false;
  Direction direction = Direction::kEqual;
};

struct ShiftReport {
  std::vector<ShiftField> fields;

  const ShiftField* Find(std::string_view name) const;
};

// Median length ratios, prevalence, per-label share and presence deltas,
// no-PER and repetition deltas. Structural fields are skipped when either
// side lacks PII notes.
ShiftReport Compare(const Diagnostics& real, const Diagnostics& synthetic);

std::string DiagnosticsToJson(std::span<const Diagnostics> subsets,
                              int indent = 2);
// Three aligned tables: composition and length, structure, label mix.
std::string DiagnosticsToTable(std::span<const Diagnostics> subsets);
std::string DiagnosticsToCsv(std::span<const Diagnostics> subsets);

std::string ShiftToJson(const ShiftReport& report, int indent = 2);
std::string ShiftToTable(const ShiftReport& report);
std::string ShiftToCsv(const ShiftReport& report);

}  // namespace vetdeid

#endif  // VETDEID_DIAGNOSTICS_HPP_
