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

#include "vetdeid/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <json.hpp>

#include "vetdeid/error.hpp"
#include "vetdeid/io.hpp"
#include "vetdeid/text.hpp"

namespace vetdeid {

using ordered_json = nlohmann::ordered_json;

std::string_view LabelName(Label label) {
  switch (label) {
    case Label::kPer: return "PER";
    case Label::kOrg: return "ORG";
    case Label::kLoc: return "LOC";
    case Label::kTime: return "TIME";
    case Label::kMisc: return "MISC";
  }
  return "?";
}

Label ParseLabel(std::string_view name) {
  for (Label l : kAllLabels) {
    if (LabelName(l) == name) return l;
  }
  throw Error(ErrorCode::kUnknownLabel,
              "unknown label '" + std::string(name) + "'");
}

std::string_view ProvenanceName(Provenance p) {
  switch (p) {
    case Provenance::kReal: return "real";
    case Provenance::kSyntheticPii: return "synthetic_pii";
    case Provenance::kSyntheticNoPii: return "synthetic_nopii";
  }
  return "?";
}

Provenance ParseProvenance(std::string_view name) {
  if (name == "real") return Provenance::kReal;
  if (name == "synthetic_pii") return Provenance::kSyntheticPii;
  if (name == "synthetic_nopii") return Provenance::kSyntheticNoPii;
  throw Error(ErrorCode::kMalformedLine,
              "unknown provenance '" + std::string(name) + "'");
}

std::string_view FindingKindName(FindingKind kind) {
  switch (kind) {
    case FindingKind::kOutOfBounds: return "OutOfBounds";
    case FindingKind::kSurfaceMismatch: return "SurfaceMismatch";
    case FindingKind::kOverlappingSpans: return "OverlappingSpans";
    case FindingKind::kUnsorted: return "Unsorted";
    case FindingKind::kProvenanceConflict: return "ProvenanceConflict";
    case FindingKind::kDroppedOverlap: return "DroppedOverlap";
  }
  return "?";
}

bool ValidationReport::ok() const {
  return std::none_of(findings.begin(), findings.end(),
                      [](const Finding& f) { return f.is_error; });
}

namespace {

std::string Describe(const Span& s) {
  return "(" + std::to_string(s.start) + "," + std::to_string(s.end) + "," +
         std::string(LabelName(s.label)) + ")";
}

bool Overlaps(const Span& a, const Span& b) {
  return a.start < b.end && b.start < a.end;
}

// Keeps the longer span of any overlapping pair; ties go to the earlier
// start. Returns kept indices in (start, end) order plus dropped indices.
void ResolveOverlaps(const std::vector<Span>& spans,
                     const std::vector<std::size_t>& order,
                     std::vector<std::size_t>& kept,
                     std::vector<std::size_t>& dropped) {
  std::vector<std::size_t> priority = order;
  std::stable_sort(priority.begin(), priority.end(),
                   [&](std::size_t a, std::size_t b) {
                     const Span& x = spans[a];
                     const Span& y = spans[b];
                     if (x.length() != y.length()) return x.length() > y.length();
                     if (x.start != y.start) return x.start < y.start;
                     return x.end < y.end;
                   });
  for (std::size_t idx : priority) {
    const bool clash = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return Overlaps(spans[k], spans[idx]);
    });
    (clash ? dropped : kept).push_back(idx);
  }
  std::sort(kept.begin(), kept.end(), [&](std::size_t a, std::size_t b) {
    return SpanLess(spans[a], spans[b]);
  });
}

}  // namespace

ValidationReport ValidateNote(const Note& note, bool allow_overlaps) {
  ValidationReport report;
  const text::OffsetMap map(note.sentence);
  const std::size_t len = map.size();

  if (note.provenance == Provenance::kSyntheticNoPii && !note.spans.empty()) {
    report.findings.push_back({FindingKind::kProvenanceConflict, 0,
                               "synthetic_nopii note carries spans", true});
  }

  std::vector<std::size_t> in_bounds;
  for (std::size_t i = 0; i < note.spans.size(); ++i) {
    const Span& s = note.spans[i];
    if (!(s.start < s.end && s.end <= len)) {
      report.findings.push_back(
          {FindingKind::kOutOfBounds, i,
           "span " + Describe(s) + " outside [0," + std::to_string(len) + "]",
           true});
      continue;
    }
    const std::size_t b = map.byte_offset(s.start);
    const std::string_view surface(note.sentence.data() + b,
                                   map.byte_offset(s.end) - b);
    if (surface != s.entity) {
      report.findings.push_back({FindingKind::kSurfaceMismatch, i,
                                 "span " + Describe(s) + " covers '" +
                                     std::string(surface) + "' not '" +
                                     s.entity + "'",
                                 true});
    }
    in_bounds.push_back(i);
  }

  if (!std::is_sorted(note.spans.begin(), note.spans.end(), SpanLess)) {
    report.findings.push_back(
        {FindingKind::kUnsorted, 0, "spans not sorted by (start, end)", false});
  }

  std::vector<std::size_t> order = in_bounds;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return SpanLess(note.spans[a], note.spans[b]);
  });

  std::vector<std::size_t> kept;
  if (allow_overlaps) {
    std::vector<std::size_t> dropped;
    ResolveOverlaps(note.spans, order, kept, dropped);
    std::sort(dropped.begin(), dropped.end());
    for (std::size_t d : dropped) {
      report.findings.push_back({FindingKind::kDroppedOverlap, d,
                                 "dropped overlapping span " +
                                     Describe(note.spans[d]),
                                 false});
    }
  } else {
    std::size_t max_end = 0;
    bool first = true;
    for (std::size_t idx : order) {
      const Span& s = note.spans[idx];
      if (!first && s.start < max_end) {
        report.findings.push_back({FindingKind::kOverlappingSpans, idx,
                                   "span " + Describe(s) +
                                       " overlaps an earlier span",
                                   true});
      }
      max_end = first ? s.end : std::max(max_end, s.end);
      first = false;
    }
    kept = order;
  }

  report.canonical_spans.reserve(kept.size());
  for (std::size_t idx : kept) report.canonical_spans.push_back(note.spans[idx]);
  return report;
}

namespace {

[[noreturn]] void Malformed(std::size_t line, const std::string& why) {
  Error e(ErrorCode::kMalformedLine,
          "line " + std::to_string(line) + ": " + why);
  e.with_line(line);
  throw e;
}

std::size_t ReadOffset(const ordered_json& v, const char* key,
                       std::size_t line) {
  auto it = v.find(key);
  if (it == v.end()) Malformed(line, std::string("span missing '") + key + "'");
  if (!it->is_number_integer()) {
    Malformed(line, std::string("span '") + key + "' must be an integer");
  }
  if (it->is_number_unsigned()) return it->get<std::size_t>();
  const auto signed_value = it->get<long long>();
  if (signed_value < 0) {
    Malformed(line, std::string("span '") + key + "' is negative");
  }
  return static_cast<std::size_t>(signed_value);
}

const std::string& RequireString(const ordered_json& obj, const char* key,
                                 std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    Malformed(line, std::string("missing string field '") + key + "'");
  }
  return it->get_ref<const std::string&>();
}

}  // namespace

Note ParseNoteLine(std::string_view line, std::size_t line_number,
                   const ParseOptions& options) {
  ordered_json obj;
  try {
    obj = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    Malformed(line_number, e.what());
  }
  if (!obj.is_object()) Malformed(line_number, "not a JSON object");

  Note note;
  note.id = RequireString(obj, "id", line_number);
  note.sentence = RequireString(obj, "sentence", line_number);
  note.provenance =
      ParseProvenance(RequireString(obj, "provenance", line_number));
  if (auto it = obj.find("seed_id"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) Malformed(line_number, "seed_id must be a string");
    note.seed_id = it->get<std::string>();
  }
  auto spans = obj.find("spans");
  if (spans == obj.end() || !spans->is_array()) {
    Malformed(line_number, "missing array field 'spans'");
  }
  for (const auto& s : *spans) {
    if (!s.is_object()) Malformed(line_number, "span is not an object");
    Span span;
    span.start = ReadOffset(s, "start", line_number);
    span.end = ReadOffset(s, "end", line_number);
    try {
      span.label = ParseLabel(RequireString(s, "label", line_number));
    } catch (Error& e) {
      if (e.code() == ErrorCode::kUnknownLabel) {
        e.with_line(line_number).with_doc(note.id);
      }
      throw;
    }
    span.entity = RequireString(s, "entity", line_number);
    note.spans.push_back(std::move(span));
  }

  ValidationReport report = ValidateNote(note, options.allow_overlaps);
  for (const Finding& f : report.findings) {
    if (!f.is_error) continue;
    ErrorCode code = ErrorCode::kMalformedLine;
    switch (f.kind) {
      case FindingKind::kOutOfBounds: code = ErrorCode::kOutOfBounds; break;
      case FindingKind::kSurfaceMismatch:
        code = ErrorCode::kSurfaceMismatch;
        break;
      case FindingKind::kOverlappingSpans:
        code = ErrorCode::kOverlappingSpans;
        break;
      case FindingKind::kProvenanceConflict:
        code = ErrorCode::kProvenanceConflict;
        break;
      default: break;
    }
    Error e(code, "note '" + note.id + "' (line " +
                      std::to_string(line_number) + ", span " +
                      std::to_string(f.span_index) + "): " + f.message);
    e.with_line(line_number).with_doc(note.id);
    throw e;
  }
  note.spans = std::move(report.canonical_spans);
  return note;
}

Corpus ParseJsonlString(std::string_view content, const ParseOptions& options) {
  Corpus corpus;
  std::unordered_set<std::string> seen;
  std::size_t line_number = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    std::string_view line = content.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    Note note = ParseNoteLine(line, line_number, options);
    if (!seen.insert(note.id).second) {
      Error e(ErrorCode::kDuplicateId, "duplicate note id '" + note.id +
                                           "' at line " +
                                           std::to_string(line_number));
      e.with_line(line_number).with_doc(note.id);
      throw e;
    }
    corpus.notes.push_back(std::move(note));
  }
  return corpus;
}

Corpus ParseJsonl(const std::filesystem::path& path,
                  const ParseOptions& options) {
  Corpus corpus = ParseJsonlString(io::ReadFile(path), options);
  corpus.subset_name = path.stem().string();
  return corpus;
}

std::string NoteToJsonLine(const Note& note) {
  ordered_json obj;
  obj["id"] = note.id;
  obj["sentence"] = note.sentence;
  obj["spans"] = ordered_json::array();
  for (const Span& s : note.spans) {
    ordered_json js;
    js["start"] = s.start;
    js["end"] = s.end;
    js["label"] = LabelName(s.label);
    js["entity"] = s.entity;
    obj["spans"].push_back(std::move(js));
  }
  obj["provenance"] = ProvenanceName(note.provenance);
  obj["seed_id"] = note.seed_id ? ordered_json(*note.seed_id) : ordered_json();
  return obj.dump();
}

std::string CorpusToJsonl(const Corpus& corpus) {
  std::string out;
  for (const Note& n : corpus.notes) {
    out += NoteToJsonLine(n);
    out += '\n';
  }
  return out;
}

void WriteJsonl(const Corpus& corpus, const std::filesystem::path& path) {
  io::WriteFileAtomic(path, CorpusToJsonl(corpus));
}

long long RoundHalfAway(double x) {
  if (std::fabs(x) < 1e6) x = std::round(x * 1e9) / 1e9;
  return std::llround(x);
}

}  // namespace vetdeid
