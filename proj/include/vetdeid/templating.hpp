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

// Template-only synthetic note generation.
//
// Real notes are masked into placeholder text before anything leaves the
// machine; candidate templates coming back are checked against the role
// allowlist and the identifier detector; accepted templates are filled
// locally from entity pools in one left-to-right pass, recording each
// inserted span at insertion time.

#ifndef VETDEID_TEMPLATING_HPP_
#define VETDEID_TEMPLATING_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vetdeid/corpus.hpp"
#include "vetdeid/error.hpp"
#include "vetdeid/placeholder.hpp"
#include "vetdeid/random.hpp"
#include "vetdeid/screening.hpp"

namespace vetdeid {

// Placeholder role -> canonical label. Iteration order is insertion order.
class Allowlist {
 public:
  // VET OWNER PATIENT PERSON -> PER; CLINIC LAB ORGANISATION ORG -> ORG;
  // CITY ADDRESS LOC -> LOC; DATE TIME DATE_GENERIC -> TIME;
  // ID DEVICE MISC_GENERIC -> MISC.
  static Allowlist Default();

  void Set(std::string role, Label label);
  std::optional<Label> Lookup(std::string_view role) const;
  const std::vector<std::pair<std::string, Label>>& roles() const {
    return roles_;
  }
  bool operator==(const Allowlist&) const = default;

 private:
  std::vector<std::pair<std::string, Label>> roles_;
};

// Generic role used when masking a span of the given label.
std::string_view GenericRole(Label label);

struct TemplateConstraints {
  double length_tolerance = 0.30;
  std::optional<std::size_t> seed_length;  // words

  bool operator==(const TemplateConstraints&) const = default;
};

struct Template {
  std::string text;
  std::optional<std::string> seed_id;
  TemplateConstraints constraints;
  // Set by MaskNote when a (label, entity) pair repeats; such templates
  // violate placeholder uniqueness and are excluded from the valid pool.
  bool repeat_bearing = false;

  bool operator==(const Template&) const = default;
};

Template MaskNote(const Note& note);

// Original span surfaces that still occur verbatim in the masked text (an
// unannotated mention of an annotated identifier). Empty for a clean mask.
std::vector<std::string> LeakedSurfaces(const Note& note, const Template& tmpl);

struct TemplateFinding {
  ErrorCode code;
  std::string subject;  // token, matched substring, or word count
  std::string detail;   // pattern name or bounds
};

// All reasons `text` is not an acceptable template; empty when accepted.
std::vector<TemplateFinding> CheckTemplate(std::string_view text,
                                           const TemplateConstraints& constraints,
                                           const Detector& detector,
                                           const Allowlist& allowlist);

// Returns the Template or throws Error carrying the first finding's code.
Template ValidateTemplate(std::string_view text,
                          const TemplateConstraints& constraints,
                          const Detector& detector, const Allowlist& allowlist,
                          std::optional<std::string> seed_id = std::nullopt);

// Format patterns for generated surfaces. Tokens: YYYY, Month, Mon, DD, MM,
// HH, NN (minutes), # (digit); everything else is literal.
struct GeneratorSpec {
  std::vector<std::string> patterns;
};

std::string ExpandPattern(std::string_view pattern, Rng& rng);

struct RolePool {
  std::vector<std::string> surfaces;
  std::vector<std::string> normalized;
};

class EntityPool {
 public:
  // Throws Error(kConfig) if a surface is empty or contains placeholder
  // syntax.
  void AddSurfaces(const std::string& role, std::vector<std::string> surfaces);
  void SetGenerator(const std::string& role, GeneratorSpec spec);
  void RemoveRole(const std::string& role);

  const RolePool* Pool(std::string_view role) const;
  const GeneratorSpec* Generator(std::string_view role) const;
  const std::map<std::string, RolePool, std::less<>>& pools() const {
    return pools_;
  }

  // Throws Error(kMissingRole) naming the first allowlisted role with
  // neither a non-empty pool nor a generator.
  void CheckCovers(const Allowlist& allowlist) const;

  // Reads <dir>/<ROLE>.txt for every allowlisted role that has a file.
  static EntityPool LoadDirectory(const std::filesystem::path& dir,
                                  const Allowlist& allowlist);

 private:
  std::map<std::string, RolePool, std::less<>> pools_;
  std::map<std::string, GeneratorSpec, std::less<>> generators_;
};

std::map<std::string, GeneratorSpec> DefaultGenerators();

struct FillRecord {
  std::string placeholder;
  std::string role;
  std::string surface;
  Span span;
};

struct FillResult {
  Note note;
  std::vector<FillRecord> records;
};

// Replaces placeholders left to right. Surfaces are sampled without
// replacement within the note (no two share a normalized form). Pools take
// precedence over generators for a role. Deterministic in (template, pools,
// seed).
FillResult FillTemplate(const Template& tmpl, const EntityPool& pools,
                        const Allowlist& allowlist, std::uint64_t seed,
                        std::string note_id);

struct PromptStyle {
  std::string instruction =
      "Write a new, realistic veterinary clinical note that could plausibly "
      "follow from the masked seed note below.";
  std::string output_format =
      "Return a single JSON object of the form {\"text\": \"...\"}.";
};

// Deterministic generation prompt embedding the masked text, the allowlist,
// and the length band.
std::string BuildPrompt(const Template& tmpl, const PromptStyle& style,
                        const Allowlist& allowlist);

std::string TemplateToJsonLine(const Template& tmpl);
Template ParseTemplateLine(std::string_view line, std::size_t line_number);
std::vector<Template> ParseTemplatesJsonl(std::string_view content);

}  // namespace vetdeid

#endif  // VETDEID_TEMPLATING_HPP_
