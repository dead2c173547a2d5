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

// Identifier-like content detection and duplicate screening of a synthetic
// pool.

#ifndef VETDEID_SCREENING_HPP_
#define VETDEID_SCREENING_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vetdeid/corpus.hpp"

namespace vetdeid {

struct ScreeningConfig {
  double near_dup_threshold = 0.90;
  std::size_t shingle_size = 5;

  // Throws Error(kConfig) unless 0 < threshold <= 1 and shingle_size >= 2.
  void Validate() const;
};

struct NamedPattern {
  std::string name;
  std::string source;  // ECMAScript regex
  std::regex regex;

  NamedPattern(std::string name, std::string source);
};

struct DetectorFinding {
  std::string pattern;
  std::size_t start = 0;  // code points
  std::size_t end = 0;

  bool operator==(const DetectorFinding&) const = default;
};

// Regex screen for identifier-like strings. Matches that touch a
// well-formed placeholder token are ignored.
class Detector {
 public:
  // digit_run, numeric_date, month_date, clock_time, email, uk_postcode,
  // honorific_name.
  static Detector Default();
  static std::vector<std::pair<std::string, std::string>> DefaultSources();

  Detector() = default;
  explicit Detector(std::vector<NamedPattern> patterns)
      : patterns_(std::move(patterns)) {}

  const std::vector<NamedPattern>& patterns() const { return patterns_; }
  const NamedPattern* Find(std::string_view name) const;

  // Sorted by (start, end, pattern).
  std::vector<DetectorFinding> Detect(std::string_view text) const;

 private:
  std::vector<NamedPattern> patterns_;
};

// Runs one pattern over `text`; offsets in code points.
std::vector<DetectorFinding> MatchPattern(const NamedPattern& pattern,
                                          std::string_view text);

// NFC, case-folded, whitespace-collapsed, trimmed.
std::string NormalizeText(std::string_view text);

// Character shingle term-frequency vector of a normalized text. Ids come
// from a shared ShingleVocabulary and are strictly increasing.
struct ShingleProfile {
  std::string normalized;
  std::uint64_t hash = 0;
  std::vector<std::uint32_t> ids;
  std::vector<std::uint32_t> counts;
  double norm_sq = 0.0;
  // Fewer code points than the shingle width: compared by equality only.
  bool short_text = false;
};

class ShingleVocabulary {
 public:
  ShingleProfile Profile(std::string_view raw_text, std::size_t shingle_size);
  std::size_t size() const { return ids_.size(); }

 private:
  std::unordered_map<std::u32string, std::uint32_t> ids_;
};

// Cosine of shingle TF vectors of the normalized texts. Texts shorter than
// the shingle width score 1 against an identical normalized text and 0
// against anything else.
double Similarity(std::string_view a, std::string_view b,
                  const ScreeningConfig& cfg);
double ProfileSimilarity(const ShingleProfile& a, const ShingleProfile& b);

enum class DropReason { kExactDup, kNearDup, kSeedDup };
std::string_view DropReasonName(DropReason reason);

struct DroppedNote {
  std::string id;
  DropReason reason;
  std::string of_id;  // earlier-retained pool note or seed note
  double similarity = 1.0;
};

struct DedupReport {
  std::vector<std::string> retained;
  std::vector<DroppedNote> dropped;
};

struct DedupResult {
  Corpus retained;
  DedupReport report;
};

// Single left-to-right pass over `pool`. A note is dropped when it is an
// exact (normalized) duplicate of a retained note, has similarity >=
// threshold to a retained note, or matches a seed note either way.
DedupResult Dedup(const Corpus& pool, const Corpus& seeds,
                  const ScreeningConfig& cfg);

// One JSON object per input note, in input order.
std::string DedupReportToJsonl(const DedupReport& report,
                               const std::vector<std::string>& input_order);

}  // namespace vetdeid

#endif  // VETDEID_SCREENING_HPP_
