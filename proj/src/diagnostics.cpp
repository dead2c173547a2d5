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

#include "vetdeid/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <utility>

#include <json.hpp>

#include "vetdeid/error.hpp"
#include "vetdeid/text.hpp"

namespace vetdeid {
namespace {

double Pct(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0
                  : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

Direction DirectionOf(double delta) {
  if (std::fabs(delta) < 1e-9) return Direction::kEqual;
  return delta > 0 ? Direction::kHigher : Direction::kLower;
}

}  // namespace

double Quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error(ErrorCode::kEmptyInput, "empty sample");
  const double pos = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Quartiles ComputeQuartiles(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return {Quantile(values, 0.25), Quantile(values, 0.5), Quantile(values, 0.75)};
}

double SubsetStats::pct_with_span() const { return Pct(n_with_span, n_notes); }

double StructuralStats::pct_label(Label l) const {
  return Pct(notes_with_label[LabelIndex(l)], n_pii_notes);
}
double StructuralStats::pct_no_per() const { return Pct(n_no_per, n_pii_notes); }
double StructuralStats::pct_repetition() const {
  return Pct(n_repetition, n_pii_notes);
}

double LabelDistribution::pct(Label l) const {
  return Pct(counts[LabelIndex(l)], total);
}

SubsetStats ComputeSubsetStats(const Corpus& corpus) {
  if (corpus.notes.empty()) {
    throw Error(ErrorCode::kEmptyCorpus,
                "EmptyCorpus: no notes in '" + corpus.subset_name + "'");
  }
  SubsetStats s;
  s.name = corpus.subset_name;
  s.n_notes = corpus.notes.size();
  std::vector<double> words;
  std::vector<double> chars;
  words.reserve(s.n_notes);
  chars.reserve(s.n_notes);
  for (const Note& n : corpus.notes) {
    if (!n.spans.empty()) ++s.n_with_span;
    s.total_spans += n.spans.size();
    words.push_back(static_cast<double>(text::WordCount(n.sentence)));
    chars.push_back(static_cast<double>(text::CodePointLength(n.sentence)));
  }
  s.words = ComputeQuartiles(std::move(words));
  s.chars = ComputeQuartiles(std::move(chars));
  return s;
}

bool HasRepetition(const Note& note) {
  std::set<std::pair<Label, std::string>> seen;
  for (const Span& sp : note.spans) {
    if (!seen.emplace(sp.label, text::CaseFold(sp.entity)).second) return true;
  }
  return false;
}

StructuralStats ComputeStructuralStats(const Corpus& corpus) {
  StructuralStats s;
  s.name = corpus.subset_name;
  for (const Note& n : corpus.notes) {
    if (n.spans.empty()) continue;
    ++s.n_pii_notes;
    std::array<bool, 5> present{};
    for (const Span& sp : n.spans) present[LabelIndex(sp.label)] = true;
    for (std::size_t i = 0; i < present.size(); ++i) {
      if (present[i]) ++s.notes_with_label[i];
    }
    if (!present[LabelIndex(Label::kPer)]) ++s.n_no_per;
    if (HasRepetition(n)) ++s.n_repetition;
  }
  if (s.n_pii_notes == 0) {
    throw Error(ErrorCode::kNoPiiNotes,
                "NoPiiNotes: '" + corpus.subset_name + "' has no PII-bearing notes");
  }
  return s;
}

LabelDistribution ComputeLabelDistribution(const Corpus& corpus) {
  LabelDistribution d;
  d.name = corpus.subset_name;
  for (const Note& n : corpus.notes) {
    for (const Span& sp : n.spans) ++d.counts[LabelIndex(sp.label)];
    d.total += n.spans.size();
  }
  return d;
}

Diagnostics Diagnose(const Corpus& corpus) {
  Diagnostics d;
  d.subset = ComputeSubsetStats(corpus);
  const bool any_pii = std::any_of(corpus.notes.begin(), corpus.notes.end(),
                                   [](const Note& n) { return !n.spans.empty(); });
  if (any_pii) d.structure = ComputeStructuralStats(corpus);
  d.labels = ComputeLabelDistribution(corpus);
  return d;
}

std::string_view DirectionName(Direction d) {
  switch (d) {
    case Direction::kLower: return "lower";
    case Direction::kEqual: return "equal";
    case Direction::kHigher: return "higher";
  }
  return "equal";
}

const ShiftField* ShiftReport::Find(std::string_view name) const {
  for (const auto& f : fields) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

ShiftReport Compare(const Diagnostics& real, const Diagnostics& synthetic) {
  ShiftReport r;
  auto ratio = [&](std::string name, double a, double b) {
    ShiftField f{std::move(name), a, b, std::nullopt, true, DirectionOf(b - a)};
    if (a != 0.0) f.value = b / a;
    r.fields.push_back(std::move(f));
  };
  auto delta = [&](std::string name, double a, double b) {
    r.fields.push_back({std::move(name), a, b, b - a, false, DirectionOf(b - a)});
  };
  ratio("median_words_ratio", real.subset.words.median,
        synthetic.subset.words.median);
  ratio("median_chars_ratio", real.subset.chars.median,
        synthetic.subset.chars.median);
  delta("pii_prevalence_delta", real.subset.pct_with_span(),
        synthetic.subset.pct_with_span());
  for (Label l : kAllLabels) {
    delta(std::string(LabelName(l)) + "_share_delta", real.labels.pct(l),
          synthetic.labels.pct(l));
  }
  if (real.structure && synthetic.structure) {
    for (Label l : kAllLabels) {
      delta(std::string(LabelName(l)) + "_presence_delta",
            real.structure->pct_label(l), synthetic.structure->pct_label(l));
    }
    delta("no_per_delta", real.structure->pct_no_per(),
          synthetic.structure->pct_no_per());
    delta("repetition_delta", real.structure->pct_repetition(),
          synthetic.structure->pct_repetition());
  }
  return r;
}

namespace {

using nlohmann::ordered_json;

ordered_json QuartilesJson(const Quartiles& q) {
  return {{"median", q.median}, {"q1", q.q1}, {"q3", q.q3}};
}

std::string Num(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Integers print without decimals; interpolated quartiles keep one.
std::string Stat(double v) {
  if (v == std::floor(v)) return Num(v, 0);
  return Num(v, 1);
}

std::string Grouped(std::size_t n) {
  std::string s = std::to_string(n);
  for (int i = static_cast<int>(s.size()) - 3; i > 0; i -= 3) {
    s.insert(static_cast<std::size_t>(i), ",");
  }
  return s;
}

std::string Csv(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Left-aligned first column, right-aligned others.
std::string RenderTable(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) {
      width[c] = std::max(width[c], text::CodePointLength(row[c]));
    }
  }
  std::string out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::string line;
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      const std::string& cell = rows[r][c];
      const std::size_t pad = width[c] - text::CodePointLength(cell);
      if (c == 0) {
        line += cell + std::string(pad, ' ');
      } else {
        line += "  " + std::string(pad, ' ') + cell;
      }
    }
    out += line + "\n";
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t c = 0; c < width.size(); ++c) {
        total += width[c] + (c == 0 ? 0 : 2);
      }
      out += std::string(total, '-') + "\n";
    }
  }
  return out;
}

}  // namespace

std::string DiagnosticsToJson(std::span<const Diagnostics> subsets, int indent) {
  ordered_json j;
  j["quartile_method"] = "linear interpolation at (n-1)q";
  j["word_definition"] = "maximal non-whitespace runs";
  j["char_definition"] = "Unicode code points";
  j["repetition_definition"] = "two spans with equal label and case-folded entity";
  j["subsets"] = ordered_json::array();
  for (const Diagnostics& d : subsets) {
    ordered_json s;
    s["name"] = d.subset.name;
    s["n_notes"] = d.subset.n_notes;
    s["n_with_span"] = d.subset.n_with_span;
    s["pct_with_span"] = d.subset.pct_with_span();
    s["words"] = QuartilesJson(d.subset.words);
    s["chars"] = QuartilesJson(d.subset.chars);
    s["total_spans"] = d.subset.total_spans;
    if (d.structure) {
      ordered_json st;
      st["n_pii_notes"] = d.structure->n_pii_notes;
      for (Label l : kAllLabels) {
        st["notes_with_label"][std::string(LabelName(l))] = {
            {"count", d.structure->notes_with_label[LabelIndex(l)]},
            {"pct", d.structure->pct_label(l)}};
      }
      st["no_per"] = {{"count", d.structure->n_no_per},
                      {"pct", d.structure->pct_no_per()}};
      st["repetition"] = {{"count", d.structure->n_repetition},
                          {"pct", d.structure->pct_repetition()}};
      s["structure"] = std::move(st);
    } else {
      s["structure"] = nullptr;
    }
    ordered_json lab;
    for (Label l : kAllLabels) {
      lab[std::string(LabelName(l))] = {{"count", d.labels.counts[LabelIndex(l)]},
                                        {"pct", d.labels.pct(l)}};
    }
    s["labels"] = std::move(lab);
    j["subsets"].push_back(std::move(s));
  }
  return j.dump(indent);
}

std::string DiagnosticsToTable(std::span<const Diagnostics> subsets) {
  std::vector<std::vector<std::string>> t1 = {
      {"Subset", "N notes", "Notes w/ >=1 span", "Words median [IQR]",
       "Chars median [IQR]", "Total spans"}};
  for (const Diagnostics& d : subsets) {
    const SubsetStats& s = d.subset;
    t1.push_back({s.name, Grouped(s.n_notes),
                  Grouped(s.n_with_span) + " (" + Num(s.pct_with_span(), 1) + "%)",
                  Stat(s.words.median) + " [" + Stat(s.words.q1) + "-" +
                      Stat(s.words.q3) + "]",
                  Stat(s.chars.median) + " [" + Stat(s.chars.q1) + "-" +
                      Stat(s.chars.q3) + "]",
                  Grouped(s.total_spans)});
  }

  std::vector<std::vector<std::string>> t3 = {{"Subset (PII notes only)"}};
  for (Label l : kAllLabels) t3[0].emplace_back(LabelName(l));
  t3[0].emplace_back("No PER");
  t3[0].emplace_back("Any within-note entity repetition");
  for (const Diagnostics& d : subsets) {
    if (!d.structure) continue;
    const StructuralStats& st = *d.structure;
    std::vector<std::string> row = {st.name + " (n=" + Grouped(st.n_pii_notes) +
                                    ")"};
    for (Label l : kAllLabels) row.push_back(Num(st.pct_label(l), 1));
    row.push_back(Num(st.pct_no_per(), 1));
    row.push_back(Num(st.pct_repetition(), 1));
    t3.push_back(std::move(row));
  }

  std::vector<std::vector<std::string>> t4 = {{"Label"}};
  for (const Diagnostics& d : subsets) t4[0].push_back(d.labels.name + " spans");
  for (Label l : kAllLabels) {
    std::vector<std::string> row = {std::string(LabelName(l))};
    for (const Diagnostics& d : subsets) {
      row.push_back(Grouped(d.labels.counts[LabelIndex(l)]) + " (" +
                    Num(d.labels.pct(l), 1) + "%)");
    }
    t4.push_back(std::move(row));
  }

  std::string out = "Corpus composition and note length\n" + RenderTable(t1);
  if (t3.size() > 1) {
    out += "\nStructure of PII-bearing notes (percent of PII notes)\n" +
           RenderTable(t3);
  }
  out += "\nSpan label distribution\n" + RenderTable(t4);
  return out;
}

std::string DiagnosticsToCsv(std::span<const Diagnostics> subsets) {
  std::string out = "subset,metric,value\n";
  auto row = [&](const std::string& subset, const std::string& metric,
                 const std::string& value) {
    out += Csv(subset) + "," + metric + "," + value + "\n";
  };
  for (const Diagnostics& d : subsets) {
    const SubsetStats& s = d.subset;
    row(s.name, "n_notes", std::to_string(s.n_notes));
    row(s.name, "n_with_span", std::to_string(s.n_with_span));
    row(s.name, "pct_with_span", Num(s.pct_with_span(), 6));
    row(s.name, "words_q1", Num(s.words.q1, 6));
    row(s.name, "words_median", Num(s.words.median, 6));
    row(s.name, "words_q3", Num(s.words.q3, 6));
    row(s.name, "chars_q1", Num(s.chars.q1, 6));
    row(s.name, "chars_median", Num(s.chars.median, 6));
    row(s.name, "chars_q3", Num(s.chars.q3, 6));
    row(s.name, "total_spans", std::to_string(s.total_spans));
    if (d.structure) {
      const StructuralStats& st = *d.structure;
      row(s.name, "n_pii_notes", std::to_string(st.n_pii_notes));
      for (Label l : kAllLabels) {
        row(s.name, "presence_" + std::string(LabelName(l)),
            Num(st.pct_label(l), 6));
      }
      row(s.name, "no_per_pct", Num(st.pct_no_per(), 6));
      row(s.name, "repetition_pct", Num(st.pct_repetition(), 6));
    }
    for (Label l : kAllLabels) {
      row(s.name, "spans_" + std::string(LabelName(l)),
          std::to_string(d.labels.counts[LabelIndex(l)]));
      row(s.name, "share_" + std::string(LabelName(l)), Num(d.labels.pct(l), 6));
    }
  }
  return out;
}

std::string ShiftToJson(const ShiftReport& report, int indent) {
  ordered_json j = ordered_json::array();
  for (const ShiftField& f : report.fields) {
    j.push_back({{"name", f.name},
                 {"real", f.real},
                 {"synthetic", f.synthetic},
                 {"kind", f.is_ratio ? "ratio" : "delta_points"},
                 {"value", f.value ? ordered_json(*f.value) : ordered_json()},
                 {"direction", DirectionName(f.direction)}});
  }
  return ordered_json{{"shift", std::move(j)}}.dump(indent);
}

std::string ShiftToTable(const ShiftReport& report) {
  std::vector<std::vector<std::string>> rows = {
      {"Field", "Real", "Synthetic", "Shift", "Direction"}};
  for (const ShiftField& f : report.fields) {
    std::string shift = "n/a";
    if (f.value) {
      shift = f.is_ratio ? Num(*f.value, 3) + "x"
                         : (*f.value >= 0 ? "+" : "") + Num(*f.value, 1);
    }
    rows.push_back({f.name, Num(f.real, 1), Num(f.synthetic, 1), shift,
                    std::string(DirectionName(f.direction))});
  }
  return RenderTable(rows);
}

std::string ShiftToCsv(const ShiftReport& report) {
  std::string out = "field,real,synthetic,kind,value,direction\n";
  for (const ShiftField& f : report.fields) {
    out += f.name + "," + Num(f.real, 6) + "," + Num(f.synthetic, 6) + "," +
           (f.is_ratio ? "ratio" : "delta_points") + "," +
           (f.value ? Num(*f.value, 6) : std::string("NA")) + "," +
           std::string(DirectionName(f.direction)) + "\n";
  }
  return out;
}

}  // namespace vetdeid
