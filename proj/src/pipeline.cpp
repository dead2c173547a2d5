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

#include "vetdeid/pipeline.hpp"

#include <cstdio>
#include <unordered_map>

#include "vetdeid/error.hpp"
#include "vetdeid/random.hpp"
#include "vetdeid/tagger.hpp"

namespace vetdeid {
namespace {

constexpr std::uint64_t kFillStream = 100;

}  // namespace

EntityPool LoadPools(const std::filesystem::path& dir, const RunConfig& cfg) {
  EntityPool pools = EntityPool::LoadDirectory(dir, cfg.allowlist);
  for (const auto& [role, spec] : cfg.generators) {
    if (cfg.allowlist.Lookup(role)) pools.SetGenerator(role, spec);
  }
  return pools;
}

std::uint64_t FillSeed(std::uint64_t seed, std::size_t k) {
  return DeriveSeed(DeriveSeed(seed, kFillStream), k);
}

Corpus FillAll(const std::vector<Template>& templates, const EntityPool& pools,
               const Allowlist& allowlist, std::uint64_t seed,
               std::size_t copies) {
  Corpus out;
  out.subset_name = "synthetic";
  std::size_t k = 0;
  for (std::size_t t = 0; t < templates.size(); ++t) {
    for (std::size_t c = 0; c < copies; ++c, ++k) {
      char id[32];
      std::snprintf(id, sizeof id, "syn-%05zu", k);
      try {
        out.notes.push_back(
            FillTemplate(templates[t], pools, allowlist, FillSeed(seed, k), id)
                .note);
      } catch (Error& e) {
        e.with_line(t + 1);
        throw;
      }
    }
  }
  return out;
}

Corpus Materialize(const MixturePlan& plan, const Corpus& real,
                   const Corpus& pool) {
  std::unordered_map<std::string, const Note*> real_by_id;
  std::unordered_map<std::string, const Note*> pool_by_id;
  for (const Note& n : real.notes) real_by_id.emplace(n.id, &n);
  for (const Note& n : pool.notes) pool_by_id.emplace(n.id, &n);
  Corpus out;
  out.subset_name = "train";
  for (const PlanEntry& e : plan.ids) {
    const auto& index = e.source == Source::kReal ? real_by_id : pool_by_id;
    auto it = index.find(e.id);
    if (it == index.end()) {
      throw Error(ErrorCode::kUnknownDocId, "plan references unknown note " + e.id);
    }
    out.notes.push_back(*it->second);
  }
  return out;
}

PipelineResult RunPipeline(const PipelineInputs& in) {
  const RunConfig& cfg = in.config;
  cfg.Validate();
  const std::uint64_t seed = cfg.RequireSeed();
  const Detector detector = cfg.MakeDetector();
  in.pools.CheckCovers(cfg.allowlist);

  PipelineResult r;
  std::vector<Template> accepted;
  for (std::size_t i = 0; i < in.templates.size(); ++i) {
    const Template& t = in.templates[i];
    if (t.repeat_bearing) {
      r.rejected.push_back({i, "repeat_bearing"});
      continue;
    }
    TemplateConstraints c = t.constraints;
    const auto findings = CheckTemplate(t.text, c, detector, cfg.allowlist);
    if (!findings.empty()) {
      r.rejected.push_back({i, std::string(ErrorCodeName(findings[0].code)) +
                                   ": " + findings[0].subject});
      continue;
    }
    accepted.push_back(t);
  }

  r.synthetic = FillAll(accepted, in.pools, cfg.allowlist, seed, in.copies);
  r.dedup = Dedup(r.synthetic, in.real, cfg.screening);
  r.dedup.retained.subset_name = "synthetic";

  MixtureSpec spec = cfg.mixture;
  spec.rng_seed = seed;
  r.plan = Plan(in.real, r.dedup.retained, spec, cfg.budget);
  r.train = Materialize(r.plan, in.real, r.dedup.retained);

  const Gazetteer gaz =
      Gazetteer::FromPools(in.pools, cfg.allowlist, cfg.tagger, detector);
  r.predictions = TagCorpus(r.train, gaz);
  r.report = Evaluate(r.train, r.predictions);

  Corpus real = in.real;
  if (real.subset_name.empty()) real.subset_name = "real";
  r.diagnostics.push_back(Diagnose(real));
  r.diagnostics.push_back(Diagnose(r.dedup.retained));
  r.diagnostics.push_back(Diagnose(r.train));
  return r;
}

}  // namespace vetdeid
