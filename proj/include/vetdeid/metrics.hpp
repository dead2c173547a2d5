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

// Span and token scoring for de-identification output, with document-level
// leakage as the headline safety number.
//
// Zero-denominator convention: precision is 1 when nothing was predicted and
// nothing was missed, 0 when nothing was predicted but gold spans were
// missed; recall symmetrically with false positives. F1 of (0, 0) is 0.
// Corpus figures are micro-averaged from summed counts.

#ifndef VETDEID_METRICS_HPP_
#define VETDEID_METRICS_HPP_

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vetdeid/corpus.hpp"

namespace vetdeid {

struct Prediction {
  std::string doc_id;
  std::vector<Span> spans;
};

enum class MatchMode { kExact, kOverlap };

struct MatchedPair {
  std::size_t gold;
  std::size_t pred;
  MatchMode mode;

  bool operator==(const MatchedPair&) const = default;
};

struct MatchResult {
  std::vector<MatchedPair> pairs;
  std::vector<std::size_t> false_negatives;  // gold indices, ascending
  std::vector<std::size_t> false_positives;  // pred indices, ascending
};

// Identical (start, end, label).
MatchResult MatchExact(std::span<const Span> gold, std::span<const Span> pred);

// Same-label pairs intersecting by >= 1 character, accepted greedily by
// (intersection desc, gold start asc, pred start asc, gold end asc,
// pred end asc).
MatchResult MatchOverlap(std::span<const Span> gold, std::span<const Span> pred);

// Label-agnostic variant of MatchOverlap, used for the secondary leakage
// figure.
MatchResult MatchOverlapAnyLabel(std::span<const Span> gold,
                                 std::span<const Span> pred);

struct Token {
  std::size_t start;
  std::size_t end;
};

// Whitespace runs, with leading and trailing punctuation characters split off
// one per token.
std::vector<Token> Tokenize(std::string_view text);

// "O", "B-PER", "I-PER", ...
std::vector<std::string> SpansToBio(std::string_view text,
                                    std::span<const Span> spans);

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  Counts& operator+=(const Counts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const Counts&) const = default;
};

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

Prf ComputePrf(const Counts& c);

// seqeval-style chunk extraction: (first token, last token + 1, type).
struct Chunk {
  std::size_t begin;
  std::size_t end;
  std::string type;
  bool operator==(const Chunk&) const = default;
  auto operator<=>(const Chunk&) const = default;
};
std::vector<Chunk> BioChunks(std::span<const std::string> tags);

// Chunk-level counts for one document. Throws Error(kLengthMismatch).
Counts TokenCounts(std::span<const std::string> gold,
                   std::span<const std::string> pred,
                   std::string_view doc_id = {});

struct TokenMetricsInput {
  std::string doc_id;
  std::vector<std::string> gold;
  std::vector<std::string> pred;
};
Prf TokenMetrics(std::span<const TokenMetricsInput> docs);

struct EvalReport {
  Counts token;
  Counts exact;
  Counts overlap;
  std::array<Counts, 5> per_label_overlap{};  // indexed by LabelIndex
  std::size_t n_docs = 0;
  std::size_t n_docs_with_gold = 0;
  std::size_t n_leaked_docs = 0;
  std::size_t n_leaked_docs_any_label = 0;

  Prf token_prf() const { return ComputePrf(token); }
  Prf exact_prf() const { return ComputePrf(exact); }
  Prf overlap_prf() const { return ComputePrf(overlap); }
  Prf label_prf(Label l) const { return ComputePrf(per_label_overlap[LabelIndex(l)]); }
  // Documents with >= 1 missed gold span under overlap matching, over all
  // documents.
  double leakage() const;
  // Same numerator over documents that carry gold spans.
  double leakage_pii_docs() const;
  double leakage_any_label() const;

  // Flat (name, value) list in a fixed order; the unit of aggregation.
  std::vector<std::pair<std::string, double>> Metrics() const;
};

// Predictions keyed by document id. Unknown ids throw Error(kUnknownDocId);
// documents without an entry are scored as empty predictions. Predicted
// spans must lie within the note and match `entity` when one is given.
EvalReport Evaluate(const Corpus& notes, std::span<const Prediction> preds);

struct AggregateMetric {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  std::optional<double> ci_half_width;  // unset when n == 1
  std::size_t n = 0;
};

struct AggregateReport {
  std::vector<AggregateMetric> metrics;
};

// mean, sample SD (n - 1), and 1.96 SD / sqrt(n). Throws Error(kEmptyInput).
AggregateReport Aggregate(std::span<const EvalReport> reports);
AggregateReport AggregateValues(
    std::span<const std::vector<std::pair<std::string, double>>> runs);

// Predictions JSONL: {"id": ..., "spans": [{"start","end","label","entity"?}]}
std::vector<Prediction> ParsePredictionsJsonl(std::string_view content);
std::string PredictionsToJsonl(std::span<const Prediction> preds);

std::string ReportToJson(const EvalReport& report, int indent = 2);
std::string ReportToCsv(const EvalReport& report);
std::string ReportToTable(const EvalReport& report);
std::string AggregateToJson(const AggregateReport& report, int indent = 2);
std::string AggregateToCsv(const AggregateReport& report);
std::string AggregateToTable(const AggregateReport& report);

}  // namespace vetdeid

#endif  // VETDEID_METRICS_HPP_
