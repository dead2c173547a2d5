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

// Run configuration: an INI file with sections, every key overridable from
// the command line. Unknown sections or keys are rejected.
//
//   [run]         seed, format, allow_overlaps
//   [paths]       free-form named paths (real, pool, seeds, pools, ...)
//   [screening]   threshold, shingle
//   [mixture]     regime, f, r, n, nu
//   [budget]      steps, batch
//   [templating]  length_tolerance
//   [allowlist]   ROLE = LABEL        (replaces the default table)
//   [patterns]    name = regex        (replaces the default detector)
//   [generators]  ROLE = fmt | fmt    (per-role override of the defaults)
//   [tagger]      case_insensitive, use_patterns, exclude_roles = A,B

#ifndef VETDEID_CONFIG_HPP_
#define VETDEID_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vetdeid/mixtures.hpp"
#include "vetdeid/screening.hpp"
#include "vetdeid/tagger.hpp"
#include "vetdeid/templating.hpp"

namespace vetdeid {

struct RunConfig {
  std::optional<std::uint64_t> seed;
  std::string format = "json";
  bool allow_overlaps = false;
  std::map<std::string, std::string> paths;
  ScreeningConfig screening;
  MixtureSpec mixture;
  TrainingBudget budget;
  double length_tolerance = 0.30;
  Allowlist allowlist = Allowlist::Default();
  std::vector<std::pair<std::string, std::string>> patterns =
      Detector::DefaultSources();
  std::map<std::string, GeneratorSpec> generators = DefaultGenerators();
  GazetteerOptions tagger;

  // Throws Error(kConfig) on an out-of-range value.
  void Validate() const;
  Detector MakeDetector() const;
  // Seed or Error(kConfig) naming the missing --seed.
  std::uint64_t RequireSeed() const;
  std::string ToJson(int indent = -1) const;
};

// Applies `key = value` from section `section` to `cfg`. Throws
// Error(kConfig) on unknown keys or unparsable values.
void ApplySetting(RunConfig& cfg, std::string_view section,
                  std::string_view key, std::string_view value);

RunConfig ParseConfigString(std::string_view ini);
RunConfig LoadConfig(const std::filesystem::path& path);

}  // namespace vetdeid

#endif  // VETDEID_CONFIG_HPP_
