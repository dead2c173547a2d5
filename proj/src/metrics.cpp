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

#include "vetdeid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "vetdeid/error.hpp"
#include "vetdeid/text.hpp"

namespace vetdeid {
namespace {

std::size_t Intersection(const Span& a, const Span& b) {
  const std::size_t lo = std::max(a.start, b.start);
  const std::size_t hi = std::min(a.end, b.end);
  return hi > lo ? hi - lo : 0;
}

void FillLeftovers(MatchResult& r, std::size_t n_gold, std::size_t n_pred) {
  std::vector<bool> g(n_gold, false);
  std::vector<bool> p(n_pred, false);
  for (const auto& m : r.pairs) {
    g[m.gold] = true;
    p[m.pred] = true;
  }
  for (std::size_t i = 0; i < n_gold; ++i) {
    if (!g[i]) r.false_negatives.push_back(i);
  }
  for (std::size_t i = 0; i < n_pred; ++i) {
    if (!p[i]) r.false_positives.push_back(i);
  }
}

MatchResult GreedyOverlap(std::span<const Span> gold, std::span<const Span> pred,
                          bool label_consistent) {
  struct Candidate {
    std::size_t inter;
    std::size_t g;
    std::size_t p;
  };
  std::vector<Candidate> cands;
  for (std::size_t g = 0; g < gold.size(); ++g) {
    for (std::size_t p = 0; p < pred.size(); ++p) {
      if (label_consistent && gold[g].label != pred[p].label) continue;
      const std::size_t inter = Intersection(gold[g], pred[p]);
      if (inter > 0) cands.push_back({inter, g, p});
    }
  }
  std::sort(cands.begin(), cands.end(),
            [&](const Candidate& a, const Candidate& b) {
              if (a.inter != b.inter) return a.inter > b.inter;
              const Span& ga = gold[a.g];
              const Span& gb = gold[b.g];
              const Span& pa = pred[a.p];
              const Span& pb = pred[b.p];
              if (ga.start != gb.start) return ga.start < gb.start;
              if (pa.start != pb.start) return pa.start < pb.start;
              if (ga.end != gb.end) return ga.end < gb.end;
              if (pa.end != pb.end) return pa.end < pb.end;
              if (a.g != b.g) return a.g < b.g;
              return a.p < b.p;
            });
  MatchResult r;
  std::vector<bool> g_used(gold.size(), false);
  std::vector<bool> p_used(pred.size(), false);
  for (const Candidate& c : cands) {
    if (g_used[c.g] || p_used[c.p]) continue;
    g_used[c.g] = true;
    p_used[c.p] = true;
    r.pairs.push_back({c.g, c.p, MatchMode::kOverlap});
  }
  FillLeftovers(r, gold.size(), pred.size());
  return r;
}

}  // namespace

MatchResult MatchExact(std::span<const Span> gold, std::span<const Span> pred) {
  std::map<std::tuple<std::size_t, std::size_t, Label>, std::vector<std::size_t>>
      by_key;
  for (std::size_t g = gold.size(); g-- > 0;) {
    by_key[{gold[g].start, gold[g].end, gold[g].label}].push_back(g);
  }
  MatchResult r;
  for (std::size_t p = 0; p < pred.size(); ++p) {
    auto it = by_key.find({pred[p].start, pred[p].end, pred[p].label});
    if (it == by_key.end() || it->second.empty()) continue;
    r.pairs.push_back({it->second.back(), p, MatchMode::kExact});
    it->second.pop_back();
  }
  FillLeftovers(r, gold.size(), pred.size());
  return r;
}

MatchResult MatchOverlap(std::span<const Span> gold, std::span<const Span> pred) {
  return GreedyOverlap(gold, pred, true);
}

MatchResult MatchOverlapAnyLabel(std::span<const Span> gold,
                                 std::span<const Span> pred) {
  return GreedyOverlap(gold, pred, false);
}

std::vector<Token> Tokenize(std::string_view utf8) {
  const std::u32string t = text::Decode(utf8);
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < t.size()) {
    if (text::IsWhitespace(t[i])) {
      ++i;
      continue;
    }
    std::size_t b = i;
    while (i < t.size() && !text::IsWhitespace(t[i])) ++i;
    std::size_t e = i;
    while (b < e && text::IsPunct(t[b])) {
      tokens.push_back({b, b + 1});
      ++b;
    }
    std::size_t core_end = e;
    while (core_end > b && text::IsPunct(t[core_end - 1])) --core_end;
    if (b < core_end) tokens.push_back({b, core_end});
    for (std::size_t k = core_end; k < e; ++k) tokens.push_back({k, k + 1});
  }
  return tokens;
}

std::vector<std::string> SpansToBio(std::string_view utf8,
                                    std::span<const Span> spans) {
  std::vector<Span> sorted(spans.begin(), spans.end());
  std::sort(sorted.begin(), sorted.end(), SpanLess);
  const std::vector<Token> tokens = Tokenize(utf8);
  std::vector<std::string> tags(tokens.size(), "O");
  std::vector<bool> started(sorted.size(), false);
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    for (std::size_t s = 0; s < sorted.size(); ++s) {
      const Span& sp = sorted[s];
      if (sp.start < tokens[k].end && tokens[k].start < sp.end) {
        tags[k] = std::string(started[s] ? "I-" : "B-") +
                  std::string(LabelName(sp.label));
        started[s] = true;
        break;
      }
    }
  }
  return tags;
}

Prf ComputePrf(const Counts& c) {
  Prf r;
  if (c.tp + c.fp == 0) {
    r.precision = c.fn == 0 ? 1.0 : 0.0;
  } else {
    r.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  }
  if (c.tp + c.fn == 0) {
    r.recall = c.fp == 0 ? 1.0 : 0.0;
  } else {
    r.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  }
  r.f1 = r.precision + r.recall == 0.0
             ? 0.0
             : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

std::vector<Chunk> BioChunks(std::span<const std::string> tags) {
  std::vector<Chunk> chunks;
  char prev = 'O';
  std::string prev_type;
  std::size_t begin = 0;
  auto split = [](const std::string& tag, char& prefix, std::string& type) {
    if (tag.size() >= 2 && (tag[0] == 'B' || tag[0] == 'I') && tag[1] == '-') {
      prefix = tag[0];
      type = tag.substr(2);
    } else {
      prefix = 'O';
      type.clear();
    }
  };
  for (std::size_t i = 0; i <= tags.size(); ++i) {
    char cur = 'O';
    std::string type;
    if (i < tags.size()) split(tags[i], cur, type);
    const bool prev_in = prev == 'B' || prev == 'I';
    const bool ends = prev_in && (cur == 'O' || cur == 'B' || type != prev_type);
    const bool starts =
        cur == 'B' || (cur == 'I' && (prev == 'O' || type != prev_type));
    if (ends) chunks.push_back({begin, i, prev_type});
    if (starts) begin = i;
    prev = cur;
    prev_type = type;
  }
  return chunks;
}

Counts TokenCounts(std::span<const std::string> gold,
                   std::span<const std::string> pred, std::string_view doc_id) {
  if (gold.size() != pred.size()) {
    Error e(ErrorCode::kLengthMismatch,
            "LengthMismatch(" + std::string(doc_id) + "): " +
                std::to_string(gold.size()) + " gold vs " +
                std::to_string(pred.size()) + " predicted tags");
    e.with_doc(std::string(doc_id));
    throw e;
  }
  const auto g = BioChunks(gold);
  const auto p = BioChunks(pred);
  const std::set<Chunk> gs(g.begin(), g.end());
  Counts c;
  for (const Chunk& ch : p) {
    if (gs.contains(ch)) ++c.tp;
  }
  c.fp = p.size() - c.tp;
  c.fn = g.size() - c.tp;
  return c;
}

Prf TokenMetrics(std::span<const TokenMetricsInput> docs) {
  Counts total;
  for (const auto& d : docs) total += TokenCounts(d.gold, d.pred, d.doc_id);
  return ComputePrf(total);
}

namespace {

double Ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double EvalReport::leakage() const { return Ratio(n_leaked_docs, n_docs); }
double EvalReport::leakage_pii_docs() const {
  return Ratio(n_leaked_docs, n_docs_with_gold);
}
double EvalReport::leakage_any_label() const {
  return Ratio(n_leaked_docs_any_label, n_docs);
}

std::vector<std::pair<std::string, double>> EvalReport::Metrics() const {
  std::vector<std::pair<std::string, double>> m;
  auto add = [&](const std::string& prefix, const Prf& p) {
    m.emplace_back(prefix + "_precision", p.precision);
    m.emplace_back(prefix + "_recall", p.recall);
    m.emplace_back(prefix + "_f1", p.f1);
  };
  add("token", token_prf());
  add("span_exact", exact_prf());
  add("span_overlap", overlap_prf());
  m.emplace_back("leakage", leakage());
  m.emplace_back("leakage_pii_docs", leakage_pii_docs());
  m.emplace_back("leakage_any_label", leakage_any_label());
  for (Label l : kAllLabels) add(std::string(LabelName(l)), label_prf(l));
  return m;
}

EvalReport Evaluate(const Corpus& notes, std::span<const Prediction> preds) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < notes.notes.size(); ++i) {
    index.emplace(notes.notes[i].id, i);
  }
  std::vector<const Prediction*> by_doc(notes.notes.size(), nullptr);
  for (const Prediction& p : preds) {
    auto it = index.find(p.doc_id);
    if (it == index.end()) {
      Error e(ErrorCode::kUnknownDocId,
              "UnknownDocId(" + p.doc_id + "): prediction for unknown note");
      e.with_doc(p.doc_id);
      throw e;
    }
    if (by_doc[it->second] != nullptr) {
      Error e(ErrorCode::kDuplicateId,
              "duplicate prediction entry for " + p.doc_id);
      e.with_doc(p.doc_id);
      throw e;
    }
    by_doc[it->second] = &p;
  }

  EvalReport report;
  report.n_docs = notes.notes.size();
  const std::vector<Span> none;
  for (std::size_t d = 0; d < notes.notes.size(); ++d) {
    const Note& note = notes.notes[d];
    const std::vector<Span>& pred = by_doc[d] ? by_doc[d]->spans : none;
    const std::vector<Span>& gold = note.spans;

    if (!pred.empty()) {
      const text::OffsetMap map(note.sentence);
      for (std::size_t i = 0; i < pred.size(); ++i) {
        const Span& s = pred[i];
        if (!(s.start < s.end && s.end <= map.size())) {
          Error e(ErrorCode::kOutOfBounds,
                  "prediction " + std::to_string(i) + " for " + note.id +
                      " lies outside the note");
          e.with_doc(note.id);
          throw e;
        }
        if (!s.entity.empty()) {
          const std::size_t b = map.byte_offset(s.start);
          if (std::string_view(note.sentence)
                  .substr(b, map.byte_offset(s.end) - b) != s.entity) {
            Error e(ErrorCode::kSurfaceMismatch,
                    "prediction " + std::to_string(i) + " for " + note.id +
                        " does not match its entity text");
            e.with_doc(note.id);
            throw e;
          }
        }
      }
    }

    if (!gold.empty()) ++report.n_docs_with_gold;

    const MatchResult exact = MatchExact(gold, pred);
    report.exact += {exact.pairs.size(), exact.false_positives.size(),
                     exact.false_negatives.size()};

    const MatchResult overlap = MatchOverlap(gold, pred);
    report.overlap += {overlap.pairs.size(), overlap.false_positives.size(),
                       overlap.false_negatives.size()};
    for (const auto& m : overlap.pairs) {
      ++report.per_label_overlap[LabelIndex(gold[m.gold].label)].tp;
    }
    for (std::size_t g : overlap.false_negatives) {
      ++report.per_label_overlap[LabelIndex(gold[g].label)].fn;
    }
    for (std::size_t p : overlap.false_positives) {
      ++report.per_label_overlap[LabelIndex(pred[p].label)].fp;
    }
    if (!overlap.false_negatives.empty()) ++report.n_leaked_docs;

    if (!MatchOverlapAnyLabel(gold, pred).false_negatives.empty()) {
      ++report.n_leaked_docs_any_label;
    }

    report.token += TokenCounts(SpansToBio(note.sentence, gold),
                                SpansToBio(note.sentence, pred), note.id);
  }
  return report;
}

AggregateReport AggregateValues(
    std::span<const std::vector<std::pair<std::string, double>>> runs) {
  if (runs.empty()) {
    throw Error(ErrorCode::kEmptyInput, "EmptyInput: no reports to aggregate");
  }
  const auto& first = runs.front();
  for (const auto& run : runs) {
    bool same = run.size() == first.size();
    for (std::size_t i = 0; same && i < run.size(); ++i) {
      same = run[i].first == first[i].first;
    }
    if (!same) {
      throw Error(ErrorCode::kLengthMismatch,
                  "reports carry different metric sets");
    }
  }
  AggregateReport out;
  const auto n = runs.size();
  for (std::size_t m = 0; m < first.size(); ++m) {
    AggregateMetric a;
    a.name = first[m].first;
    a.n = n;
    double sum = 0.0;
    for (const auto& run : runs) sum += run[m].second;
    a.mean = sum / static_cast<double>(n);
    if (n > 1) {
      double ss = 0.0;
      for (const auto& run : runs) {
        const double d = run[m].second - a.mean;
        ss += d * d;
      }
      a.sd = std::sqrt(ss / static_cast<double>(n - 1));
      a.ci_half_width = 1.96 * a.sd / std::sqrt(static_cast<double>(n));
    }
    out.metrics.push_back(std::move(a));
  }
  return out;
}

AggregateReport Aggregate(std::span<const EvalReport> reports) {
  std::vector<std::vector<std::pair<std::string, double>>> runs;
  runs.reserve(reports.size());
  for (const auto& r : reports) runs.push_back(r.Metrics());
  return AggregateValues(runs);
}

std::vector<Prediction> ParsePredictionsJsonl(std::string_view content) {
  std::vector<Prediction> out;
  std::size_t line_number = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    const std::string_view line = content.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    auto fail = [&](const std::string& why) {
      Error e(ErrorCode::kMalformedLine, "predictions line " +
                                             std::to_string(line_number) +
                                             ": " + why);
      e.with_line(line_number);
      return e;
    };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw fail(e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
      throw fail("missing string field 'id'");
    }
    Prediction p;
    p.doc_id = j["id"].get<std::string>();
    if (j.contains("spans")) {
      if (!j["spans"].is_array()) throw fail("'spans' must be an array");
      for (const auto& s : j["spans"]) {
        if (!s.is_object() || !s.contains("start") || !s.contains("end") ||
            !s.contains("label") || !s["start"].is_number_unsigned() ||
            !s["end"].is_number_unsigned() || !s["label"].is_string()) {
          throw fail("span needs non-negative integer start/end and a label");
        }
        Span span;
        span.start = s["start"].get<std::size_t>();
        span.end = s["end"].get<std::size_t>();
        try {
          span.label = ParseLabel(s["label"].get<std::string>());
        } catch (Error& e) {
          e.with_line(line_number);
          throw;
        }
        if (s.contains("entity") && s["entity"].is_string()) {
          span.entity = s["entity"].get<std::string>();
        }
        p.spans.push_back(std::move(span));
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::string PredictionsToJsonl(std::span<const Prediction> preds) {
  std::string out;
  for (const Prediction& p : preds) {
    nlohmann::ordered_json j;
    j["id"] = p.doc_id;
    j["spans"] = nlohmann::ordered_json::array();
    for (const Span& s : p.spans) {
      j["spans"].push_back({{"start", s.start},
                            {"end", s.end},
                            {"label", LabelName(s.label)},
                            {"entity", s.entity}});
    }
    out += j.dump();
    out += '\n';
  }
  return out;
}

namespace {

nlohmann::ordered_json CountsJson(const Counts& c) {
  const Prf p = ComputePrf(c);
  return {{"tp", c.tp},
          {"fp", c.fp},
          {"fn", c.fn},
          {"precision", p.precision},
          {"recall", p.recall},
          {"f1", p.f1}};
}

std::string Fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string Pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string PadLeft(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

}  // namespace

std::string ReportToJson(const EvalReport& r, int indent) {
  nlohmann::ordered_json j;
  j["n_docs"] = r.n_docs;
  j["n_docs_with_gold"] = r.n_docs_with_gold;
  j["n_leaked_docs"] = r.n_leaked_docs;
  j["leakage"] = r.leakage();
  j["leakage_pii_docs"] = r.leakage_pii_docs();
  j["leakage_any_label"] = r.leakage_any_label();
  j["token"] = CountsJson(r.token);
  j["span_exact"] = CountsJson(r.exact);
  j["span_overlap"] = CountsJson(r.overlap);
  for (Label l : kAllLabels) {
    j["per_label_overlap"][std::string(LabelName(l))] =
        CountsJson(r.per_label_overlap[LabelIndex(l)]);
  }
  j["conventions"] = {
      {"leakage_denominator", "all_documents"},
      {"overlap_matching", "label-consistent greedy by maximum intersection"},
      {"zero_denominator", "1 if both error counts are 0, else 0; F1(0,0)=0"},
      {"averaging", "micro"},
      {"tokenizer", "whitespace runs with edge punctuation split"}};
  return j.dump(indent);
}

std::string ReportToCsv(const EvalReport& r) {
  std::string out = "metric,value\n";
  for (const auto& [name, value] : r.Metrics()) {
    out += name + "," + Fixed(value, 6) + "\n";
  }
  return out;
}

std::string ReportToTable(const EvalReport& r) {
  std::string out;
  out += Pad("", 14) + PadLeft("P", 8) + PadLeft("R", 8) + PadLeft("F1", 8) +
         PadLeft("TP", 7) + PadLeft("FP", 7) + PadLeft("FN", 7) + "\n";
  auto row = [&](const std::string& name, const Counts& c) {
    const Prf p = ComputePrf(c);
    out += Pad(name, 14) + PadLeft(Fixed(p.precision, 3), 8) +
           PadLeft(Fixed(p.recall, 3), 8) + PadLeft(Fixed(p.f1, 3), 8) +
           PadLeft(std::to_string(c.tp), 7) + PadLeft(std::to_string(c.fp), 7) +
           PadLeft(std::to_string(c.fn), 7) + "\n";
  };
  row("token", r.token);
  row("span exact", r.exact);
  row("span overlap", r.overlap);
  for (Label l : kAllLabels) {
    row("  " + std::string(LabelName(l)), r.per_label_overlap[LabelIndex(l)]);
  }
  out += "doc leakage   " + Fixed(100.0 * r.leakage(), 2) + "% (" +
         std::to_string(r.n_leaked_docs) + "/" + std::to_string(r.n_docs) +
         " documents)\n";
  return out;
}

std::string AggregateToJson(const AggregateReport& a, int indent) {
  nlohmann::ordered_json j;
  j["ci"] = "95% normal approximation: 1.96 * SD / sqrt(n)";
  j["metrics"] = nlohmann::ordered_json::array();
  for (const auto& m : a.metrics) {
    j["metrics"].push_back(
        {{"name", m.name},
         {"mean", m.mean},
         {"sd", m.sd},
         {"ci_half_width", m.ci_half_width ? nlohmann::ordered_json(*m.ci_half_width)
                                           : nlohmann::ordered_json()},
         {"n", m.n}});
  }
  return j.dump(indent);
}

std::string AggregateToCsv(const AggregateReport& a) {
  std::string out = "metric,mean,sd,ci_half_width,n\n";
  for (const auto& m : a.metrics) {
    out += m.name + "," + Fixed(m.mean, 6) + "," + Fixed(m.sd, 6) + "," +
           (m.ci_half_width ? Fixed(*m.ci_half_width, 6) : std::string("NA")) +
           "," + std::to_string(m.n) + "\n";
  }
  return out;
}

std::string AggregateToTable(const AggregateReport& a) {
  std::string out = Pad("metric", 24) + PadLeft("mean", 10) + PadLeft("SD", 10) +
                    PadLeft("95% CI", 10) + PadLeft("n", 4) + "\n";
  for (const auto& m : a.metrics) {
    out += Pad(m.name, 24) + PadLeft(Fixed(m.mean), 10) +
           PadLeft(Fixed(m.sd), 10) +
           PadLeft(m.ci_half_width ? "±" + Fixed(*m.ci_half_width) : "n/a", 10) +
           PadLeft(std::to_string(m.n), 4) + "\n";
  }
  return out;
}

}  // namespace vetdeid
