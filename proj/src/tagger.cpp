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

#include "vetdeid/tagger.hpp"

#include <algorithm>

#include "vetdeid/error.hpp"
#include "vetdeid/text.hpp"

namespace vetdeid {
namespace {

// Position p is a word boundary unless alphanumerics sit on both sides.
bool Boundary(std::u32string_view cps, std::size_t p) {
  if (p == 0 || p >= cps.size()) return true;
  return !(text::IsAlnum(cps[p - 1]) && text::IsAlnum(cps[p]));
}

}  // namespace

std::vector<PatternRule> DefaultPatternRules(const Detector& detector) {
  static const std::pair<const char*, Label> kRules[] = {
      {"digit_run", Label::kMisc},
      {"numeric_date", Label::kTime},
      {"month_date", Label::kTime},
      {"clock_time", Label::kTime},
  };
  std::vector<PatternRule> out;
  for (const auto& [name, label] : kRules) {
    if (const NamedPattern* p = detector.Find(name)) {
      out.push_back({*p, label});
    }
  }
  return out;
}

Gazetteer Gazetteer::FromPools(const EntityPool& pools,
                               const Allowlist& allowlist,
                               const GazetteerOptions& options,
                               const Detector& detector) {
  Gazetteer g(options.case_insensitive);
  for (const auto& [role, pool] : pools.pools()) {
    if (options.exclude_roles.contains(role)) continue;
    const std::optional<Label> label = allowlist.Lookup(role);
    if (!label) {
      throw Error(ErrorCode::kConfig, "pool role not allowlisted: " + role);
    }
    for (const std::string& s : pool.surfaces) g.Add(s, *label);
  }
  if (options.use_patterns) {
    for (PatternRule& r : DefaultPatternRules(detector)) g.AddRule(std::move(r));
  }
  return g;
}

std::u32string Gazetteer::Key(std::u32string_view cps) const {
  std::u32string out(cps);
  if (case_insensitive_) {
    for (char32_t& c : out) c = text::FoldSimple(c);
  }
  return out;
}

void Gazetteer::Add(std::string_view surface, Label label) {
  if (surface.empty()) throw Error(ErrorCode::kConfig, "empty gazetteer surface");
  const std::u32string key = Key(text::Decode(surface));
  std::uint32_t node = 0;
  for (char32_t c : key) {
    auto it = nodes_[node].next.find(c);
    if (it == nodes_[node].next.end()) {
      const auto id = static_cast<std::uint32_t>(nodes_.size());
      nodes_[node].next.emplace(c, id);
      nodes_.emplace_back();
      node = id;
    } else {
      node = it->second;
    }
  }
  std::optional<Label>& slot = nodes_[node].label;
  if (slot && *slot != label) {
    throw Error(ErrorCode::kGazetteerConflict,
                "GazetteerConflict: '" + std::string(surface) + "' maps to " +
                    std::string(LabelName(*slot)) + " and " +
                    std::string(LabelName(label)));
  }
  if (!slot) ++n_entries_;
  slot = label;
}

std::optional<Label> Gazetteer::Lookup(std::string_view surface) const {
  std::uint32_t node = 0;
  for (char32_t c : Key(text::Decode(surface))) {
    auto it = nodes_[node].next.find(c);
    if (it == nodes_[node].next.end()) return std::nullopt;
    node = it->second;
  }
  return nodes_[node].label;
}

std::vector<Span> Gazetteer::Tag(std::string_view utf8) const {
  const std::u32string raw = text::Decode(utf8);
  const std::u32string cps = Key(raw);
  std::vector<Span> spans;

  for (std::size_t i = 0; i < cps.size();) {
    std::size_t best_end = 0;
    Label best_label = Label::kPer;
    if (Boundary(cps, i)) {
      std::uint32_t node = 0;
      for (std::size_t j = i; j < cps.size(); ++j) {
        auto it = nodes_[node].next.find(cps[j]);
        if (it == nodes_[node].next.end()) break;
        node = it->second;
        if (nodes_[node].label && Boundary(cps, j + 1)) {
          best_end = j + 1;
          best_label = *nodes_[node].label;
        }
      }
    }
    if (best_end > i) {
      spans.push_back({i, best_end, best_label, {}});
      i = best_end;
    } else {
      ++i;
    }
  }

  std::vector<Span> hits;
  for (const PatternRule& rule : rules_) {
    for (const DetectorFinding& f : MatchPattern(rule.pattern, utf8)) {
      const bool clash = std::any_of(spans.begin(), spans.end(), [&](const Span& s) {
        return s.start < f.end && f.start < s.end;
      });
      if (!clash) hits.push_back({f.start, f.end, rule.label, {}});
    }
  }
  std::stable_sort(hits.begin(), hits.end(), [](const Span& a, const Span& b) {
    if (a.length() != b.length()) return a.length() > b.length();
    return a.start < b.start;
  });
  const std::size_t n_gaz = spans.size();
  for (const Span& h : hits) {
    const bool clash =
        std::any_of(spans.begin() + static_cast<std::ptrdiff_t>(n_gaz), spans.end(),
                    [&](const Span& s) { return s.start < h.end && h.start < s.end; });
    if (!clash) spans.push_back(h);
  }

  std::sort(spans.begin(), spans.end(), SpanLess);
  for (Span& s : spans) {
    s.entity = text::Encode(std::u32string_view(raw).substr(s.start, s.length()));
  }
  return spans;
}

std::vector<Prediction> TagCorpus(const Corpus& corpus, const Gazetteer& gaz) {
  std::vector<Prediction> out;
  out.reserve(corpus.notes.size());
  for (const Note& n : corpus.notes) out.push_back({n.id, gaz.Tag(n.sentence)});
  return out;
}

}  // namespace vetdeid
