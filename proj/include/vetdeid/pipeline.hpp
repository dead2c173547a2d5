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

// fill -> dedup -> mix -> tag -> evaluate -> diagnose, in process.

#ifndef VETDEID_PIPELINE_HPP_
#define VETDEID_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vetdeid/config.hpp"
#include "vetdeid/corpus.hpp"
#include "vetdeid/diagnostics.hpp"
#include "vetdeid/metrics.hpp"
#include "vetdeid/mixtures.hpp"
#include "vetdeid/screening.hpp"
#include "vetdeid/templating.hpp"

namespace vetdeid {

// Pool files from `dir` plus the configured generators.
EntityPool LoadPools(const std::filesystem::path& dir, const RunConfig& cfg);

// Seed used for the k-th fill of a run seeded with `seed`.
std::uint64_t FillSeed(std::uint64_t seed, std::size_t k);

// Fills templates in order, `copies` times each, ids "syn-00000", ...
Corpus FillAll(const std::vector<Template>& templates, const EntityPool& pools,
               const Allowlist& allowlist, std::uint64_t seed,
               std::size_t copies = 1);

struct RejectedTemplate {
  std::size_t index;
  std::string reason;
};

struct PipelineInputs {
  std::vector<Template> templates;
  EntityPool pools;
  Corpus real;
  RunConfig config;  // seed required
  std::size_t copies = 1;
};

struct PipelineResult {
  std::vector<RejectedTemplate> rejected;
  Corpus synthetic;
  DedupResult dedup;
  MixturePlan plan;
  Corpus train;
  std::vector<Prediction> predictions;
  EvalReport report;
  std::vector<Diagnostics> diagnostics;  // real, synthetic (retained), train
};

// The gazetteer is compiled from inputs.pools minus
// config.tagger.exclude_roles.
PipelineResult RunPipeline(const PipelineInputs& inputs);

// Training set in plan order, looked up in `real` and `pool`.
Corpus Materialize(const MixturePlan& plan, const Corpus& real,
                   const Corpus& pool);

}  // namespace vetdeid

#endif  // VETDEID_PIPELINE_HPP_
