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

// Reference tagger: gazetteer lookup compiled from entity pools, then regex
// rules for dates, times and long digit runs on whatever the gazetteer left.

#ifndef VETDEID_TAGGER_HPP_
#define VETDEID_TAGGER_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vetdeid/corpus.hpp"
#include "vetdeid/metrics.hpp"
#include "vetdeid/screening.hpp"
#include "vetdeid/templating.hpp"

namespace vetdeid {

struct GazetteerOptions {
  bool case_insensitive = false;
  bool use_patterns = true;
  std::set<std::string, std::less<>> exclude_roles;
};

struct PatternRule {
  NamedPattern pattern;
  Label label;
};

// digit_run -> MISC; numeric_date, month_date, clock_time -> TIME. Sources
// come from `detector` when it defines those names.
std::vector<PatternRule> DefaultPatternRules(const Detector& detector);

class Gazetteer {
 public:
  explicit Gazetteer(bool case_insensitive = false)
      : case_insensitive_(case_insensitive), nodes_(1) {}

  // Pools of every allowlisted role not in options.exclude_roles, plus the
  // default pattern rules when options.use_patterns.
  static Gazetteer FromPools(const EntityPool& pools, const Allowlist& allowlist,
                             const GazetteerOptions& options = {},
                             const Detector& detector = Detector::Default());

  // Throws Error(kGazetteerConflict) when the surface already maps to a
  // different label, Error(kConfig) when it is empty.
  void Add(std::string_view surface, Label label);
  void AddRule(PatternRule rule) { rules_.push_back(std::move(rule)); }

  std::size_t size() const { return n_entries_; }
  const std::vector<PatternRule>& rules() const { return rules_; }
  std::optional<Label> Lookup(std::string_view surface) const;

  // Non-overlapping spans sorted by start, with entity text filled in.
  std::vector<Span> Tag(std::string_view text) const;

 private:
  struct Node {
    std::map<char32_t, std::uint32_t> next;
    std::optional<Label> label;
  };

  std::u32string Key(std::u32string_view cps) const;

  bool case_insensitive_;
  std::vector<Node> nodes_;
  std::size_t n_entries_ = 0;
  std::vector<PatternRule> rules_;
};

std::vector<Prediction> TagCorpus(const Corpus& corpus, const Gazetteer& gaz);

}  // namespace vetdeid

#endif  // VETDEID_TAGGER_HPP_
