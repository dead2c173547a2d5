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

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "vetdeid/error.hpp"
#include "vetdeid/metrics.hpp"

using namespace vetdeid;

namespace {

Span S(std::size_t b, std::size_t e, Label l = Label::kPer) { return {b, e, l, ""}; }

std::vector<std::string> V(std::initializer_list<const char*> xs) {
  return {xs.begin(), xs.end()};
}

// Reference greedy: enumerate every same-label intersecting pair, sort by the
// documented key, accept when both endpoints are free.
std::vector<std::pair<std::size_t, std::size_t>> OracleOverlap(
    const std::vector<Span>& g, const std::vector<Span>& p) {
  using Key = std::tuple<long, std::size_t, std::size_t, std::size_t,
                         std::size_t, std::size_t, std::size_t>;
  std::vector<Key> cand;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (g[i].label != p[j].label) continue;
      const long inter = static_cast<long>(std::min(g[i].end, p[j].end)) -
                         static_cast<long>(std::max(g[i].start, p[j].start));
      if (inter <= 0) continue;
      cand.emplace_back(-inter, g[i].start, p[j].start, g[i].end, p[j].end, i, j);
    }
  }
  std::sort(cand.begin(), cand.end());
  std::vector<bool> gu(g.size()), pu(p.size());
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& k : cand) {
    const auto i = std::get<5>(k);
    const auto j = std::get<6>(k);
    if (gu[i] || pu[j]) continue;
    gu[i] = pu[j] = true;
    out.emplace_back(i, j);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> Pairs(const MatchResult& r) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& m : r.pairs) out.emplace_back(m.gold, m.pred);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Span> RandomSpans(std::mt19937& gen, std::size_t max_n) {
  std::uniform_int_distribution<std::size_t> n(0, max_n), pos(0, 30), len(1, 8),
      lab(0, 1);
  std::vector<Span> out(n(gen));
  for (auto& s : out) {
    s.start = pos(gen);
    s.end = s.start + len(gen);
    s.label = kAllLabels[lab(gen)];
  }
  return out;
}

Note Doc(std::string id, std::string text, std::vector<Span> spans) {
  return {std::move(id), std::move(text), std::move(spans), Provenance::kReal, {}};
}

}  // namespace

TEST_CASE("exact matching") {
  const std::vector<Span> g = {S(0, 4), S(6, 9, Label::kOrg), S(6, 9, Label::kOrg)};
  const std::vector<Span> p = {S(6, 9, Label::kOrg), S(0, 4, Label::kOrg), S(0, 4)};
  const MatchResult r = MatchExact(g, p);
  CHECK(r.pairs.size() == 2);
  CHECK(r.false_negatives == std::vector<std::size_t>{2});
  CHECK(r.false_positives == std::vector<std::size_t>{1});
}

TEST_CASE("overlap matching against the reference greedy") {
  std::mt19937 gen(11);
  for (int t = 0; t < 2000; ++t) {
    const auto g = RandomSpans(gen, 6);
    const auto p = RandomSpans(gen, 6);
    const MatchResult r = MatchOverlap(g, p);
    CHECK(Pairs(r) == OracleOverlap(g, p));
    CHECK(r.pairs.size() + r.false_negatives.size() == g.size());
    CHECK(r.pairs.size() + r.false_positives.size() == p.size());
    CHECK(MatchExact(g, p).pairs.size() <= r.pairs.size());
  }
}

TEST_CASE("overlap prefers the larger intersection") {
  const std::vector<Span> g = {S(0, 10)};
  const std::vector<Span> p = {S(8, 12), S(2, 9)};
  const MatchResult r = MatchOverlap(g, p);
  REQUIRE(r.pairs.size() == 1);
  CHECK(r.pairs[0].pred == 1);
  CHECK(r.false_positives == std::vector<std::size_t>{0});
  // Label mismatch never matches, except in the label-agnostic variant.
  const std::vector<Span> q = {S(0, 10, Label::kOrg)};
  CHECK(MatchOverlap(g, q).pairs.empty());
  CHECK(MatchOverlapAnyLabel(g, q).pairs.size() == 1);
}

TEST_CASE("tokenizer and BIO") {
  auto toks = Tokenize("Pole, owner");
  REQUIRE(toks.size() == 3);
  CHECK(toks[0].start == 0);
  CHECK(toks[0].end == 4);
  CHECK(toks[1].start == 4);
  CHECK(toks[1].end == 5);
  CHECK(SpansToBio("Dr Pole came", std::vector<Span>{S(0, 7)}) ==
        V({"B-PER", "I-PER", "O"}));
  CHECK(SpansToBio("Pole, owner", std::vector<Span>{S(0, 4)}) ==
        V({"B-PER", "O", "O"}));
  CHECK(Tokenize("(Zoë)").size() == 3);
  CHECK(Tokenize("  \t ").empty());
}

TEST_CASE("BIO chunks follow seqeval") {
  CHECK(BioChunks(V({"B-PER", "I-PER", "O", "I-ORG", "I-ORG", "B-ORG", "I-LOC"})) ==
        std::vector<Chunk>{{0, 2, "PER"}, {3, 5, "ORG"}, {5, 6, "ORG"}, {6, 7, "LOC"}});
  CHECK(BioChunks(V({"O", "O"})).empty());

  // Three documents enumerated by hand:
  //   d1 gold {PER[0,2)}        pred {PER[0,2)}          tp 1
  //   d2 gold {ORG[1,2)}        pred {PER[1,2)}          fp 1, fn 1
  //   d3 gold {LOC[0,1),TIME[2,4)} pred {TIME[2,3)}      fp 1, fn 2
  const std::vector<TokenMetricsInput> docs = {
      {"d1", V({"B-PER", "I-PER", "O"}), V({"B-PER", "I-PER", "O"})},
      {"d2", V({"O", "B-ORG"}), V({"O", "B-PER"})},
      {"d3", V({"B-LOC", "O", "B-TIME", "I-TIME"}), V({"O", "O", "B-TIME", "O"})},
  };
  const Prf prf = TokenMetrics(docs);
  CHECK(prf.precision == doctest::Approx(1.0 / 3));
  CHECK(prf.recall == doctest::Approx(1.0 / 4));
  CHECK(prf.f1 == doctest::Approx(2.0 / 7));

  try {
    TokenCounts(V({"O"}), V({"O", "O"}), "dx");
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kLengthMismatch);
    CHECK(e.doc_id() == "dx");
  }
}

TEST_CASE("zero denominators") {
  Prf p = ComputePrf({0, 0, 0});
  CHECK(p.precision == 1.0);
  CHECK(p.recall == 1.0);
  CHECK(p.f1 == 1.0);
  p = ComputePrf({0, 0, 3});
  CHECK(p.precision == 0.0);
  CHECK(p.recall == 0.0);
  CHECK(p.f1 == 0.0);
  p = ComputePrf({0, 2, 0});
  CHECK(p.precision == 0.0);
  CHECK(p.recall == 0.0);
}

TEST_CASE("leakage") {
  Corpus c;
  c.notes.push_back(Doc("a", "Dr Pole saw Rex", {S(0, 7), S(12, 15)}));
  c.notes.push_back(Doc("b", "Pole came", {S(0, 4)}));
  c.notes.push_back(Doc("c", "no names here", {}));
  const std::vector<Prediction> preds = {{"a", {S(0, 7)}}, {"b", {S(0, 3)}}};
  const EvalReport r = Evaluate(c, preds);
  CHECK(r.n_docs == 3);
  CHECK(r.n_docs_with_gold == 2);
  CHECK(r.n_leaked_docs == 1);
  CHECK(r.leakage() == doctest::Approx(1.0 / 3));
  CHECK(r.leakage_pii_docs() == doctest::Approx(0.5));
  CHECK(r.overlap == Counts{2, 0, 1});
  CHECK(r.exact == Counts{1, 1, 2});

  const EvalReport empty = Evaluate(c, {});
  CHECK(empty.leakage() == doctest::Approx(2.0 / 3));

  std::vector<Prediction> perfect;
  for (const Note& n : c.notes) perfect.push_back({n.id, n.spans});
  const EvalReport best = Evaluate(c, perfect);
  CHECK(best.leakage() == 0.0);
  for (const auto& [name, v] : best.Metrics()) {
    if (name.find("f1") != std::string::npos) CHECK(v == 1.0);
  }
}

TEST_CASE("leakage identity on random corpora") {
  std::mt19937 gen(5);
  for (int t = 0; t < 50; ++t) {
    Corpus c;
    std::vector<Prediction> preds;
    for (int d = 0; d < 20; ++d) {
      std::string text(50, 'x');
      auto spans = RandomSpans(gen, 3);
      std::sort(spans.begin(), spans.end(), SpanLess);
      std::vector<Span> kept;
      for (const auto& s : spans) {
        if (kept.empty() || kept.back().end <= s.start) kept.push_back(s);
      }
      c.notes.push_back(Doc("d" + std::to_string(d), text, kept));
      std::vector<Span> pred;
      for (const auto& s : kept) {
        if (gen() % 3 != 0) pred.push_back(s);
      }
      preds.push_back({c.notes.back().id, pred});
    }
    const EvalReport r = Evaluate(c, preds);
    std::size_t leaked = 0;
    for (std::size_t d = 0; d < c.notes.size(); ++d) {
      if (c.notes[d].spans.size() != preds[d].spans.size()) ++leaked;
    }
    CHECK(r.n_leaked_docs == leaked);
    CHECK((r.leakage() == 0.0) == (r.overlap.fn == 0));
  }
}

TEST_CASE("evaluate errors") {
  Corpus c;
  c.notes.push_back(Doc("a", "Dr Pole", {S(0, 7)}));
  auto code = [&](std::vector<Prediction> p) {
    try {
      Evaluate(c, p);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kConfig;
  };
  CHECK(code({{"zz", {}}}) == ErrorCode::kUnknownDocId);
  CHECK(code({{"a", {}}, {"a", {}}}) == ErrorCode::kDuplicateId);
  CHECK(code({{"a", {S(0, 9)}}}) == ErrorCode::kOutOfBounds);
  CHECK(code({{"a", {{0, 6, Label::kPer, "Dr Pole"}}}}) == ErrorCode::kSurfaceMismatch);
}

TEST_CASE("per-label counts") {
  Corpus c;
  c.notes.push_back(Doc("a", "Dr Pole at Oakvale", {S(0, 7), S(11, 18, Label::kOrg)}));
  const std::vector<Prediction> preds = {{"a", {S(0, 7), S(11, 18, Label::kLoc)}}};
  const EvalReport r = Evaluate(c, preds);
  CHECK(r.per_label_overlap[LabelIndex(Label::kPer)] == Counts{1, 0, 0});
  CHECK(r.per_label_overlap[LabelIndex(Label::kOrg)] == Counts{0, 0, 1});
  CHECK(r.per_label_overlap[LabelIndex(Label::kLoc)] == Counts{0, 1, 0});
  CHECK(r.n_leaked_docs == 1);
  CHECK(r.n_leaked_docs_any_label == 0);
}

TEST_CASE("aggregation") {
  std::vector<std::vector<std::pair<std::string, double>>> runs;
  for (double v : {1.0, 2.0, 3.0, 4.0, 5.0}) runs.push_back({{"x", v}});
  const AggregateReport a = AggregateValues(runs);
  REQUIRE(a.metrics.size() == 1);
  CHECK(a.metrics[0].mean == doctest::Approx(3.0));
  CHECK(a.metrics[0].sd == doctest::Approx(std::sqrt(2.5)));
  REQUIRE(a.metrics[0].ci_half_width);
  CHECK(*a.metrics[0].ci_half_width == doctest::Approx(1.96 * std::sqrt(2.5) / std::sqrt(5.0)));
  CHECK(*a.metrics[0].ci_half_width == doctest::Approx(1.386).epsilon(0.001));

  const AggregateReport one = AggregateValues(std::vector<std::vector<std::pair<std::string, double>>>{{{"x", 0.7}}});
  CHECK(one.metrics[0].sd == 0.0);
  CHECK_FALSE(one.metrics[0].ci_half_width);

  CHECK_THROWS_AS(AggregateValues({}), Error);
  std::vector<std::vector<std::pair<std::string, double>>> bad = {{{"x", 1}}, {{"y", 1}}};
  CHECK_THROWS_AS(AggregateValues(bad), Error);
}

TEST_CASE("predictions jsonl round trip and report formats") {
  const std::vector<Prediction> p = {{"a", {{0, 7, Label::kPer, "Dr Pole"}}}, {"b", {}}};
  CHECK(ParsePredictionsJsonl(PredictionsToJsonl(p)).size() == 2);
  CHECK(ParsePredictionsJsonl(PredictionsToJsonl(p))[0].spans == p[0].spans);
  CHECK_THROWS_AS(ParsePredictionsJsonl("{\"id\":1}\n"), Error);

  Corpus c;
  c.notes.push_back(Doc("a", "Dr Pole", {S(0, 7)}));
  const EvalReport r = Evaluate(c, std::span<const Prediction>(p.data(), 1));
  const auto j = nlohmann::json::parse(ReportToJson(r));
  CHECK(j["leakage"] == 0.0);
  CHECK(j["n_docs"] == 1);
  CHECK(j.contains("per_label_overlap"));
  CHECK(ReportToCsv(r).rfind("metric,value\n", 0) == 0);
  CHECK_FALSE(ReportToTable(r).empty());
}
