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

#include "vetdeid/mixtures.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "vetdeid/error.hpp"
#include "vetdeid/random.hpp"

namespace vetdeid {

std::string_view RegimeName(Regime r) {
  switch (r) {
    case Regime::kAugment: return "augment";
    case Regime::kFixedN: return "fixed_n";
    case Regime::kComputeMatched: return "compute_matched";
  }
  return "?";
}

Regime ParseRegime(std::string_view name) {
  if (name == "augment") return Regime::kAugment;
  if (name == "fixed_n") return Regime::kFixedN;
  if (name == "compute_matched") return Regime::kComputeMatched;
  throw Error(ErrorCode::kInvalidSpec,
              "unknown regime '" + std::string(name) +
                  "' (expected augment, fixed_n, compute_matched)");
}

std::string_view SourceName(Source s) {
  switch (s) {
    case Source::kReal: return "real";
    case Source::kSyntheticPii: return "synthetic_pii";
    case Source::kSyntheticNoPii: return "synthetic_nopii";
  }
  return "?";
}

namespace {

[[noreturn]] void Invalid(const std::string& why) {
  throw Error(ErrorCode::kInvalidSpec, why);
}

}  // namespace

void MixtureSpec::Validate() const {
  switch (regime) {
    case Regime::kAugment:
    case Regime::kComputeMatched:
      if (!f) Invalid(std::string(RegimeName(regime)) + " requires f");
      if (!(*f >= 0.0 && *f < 1.0)) Invalid("f must lie in [0, 1)");
      break;
    case Regime::kFixedN:
      if (!r || !n) Invalid("fixed_n requires r and n");
      if (!(*r > 0.0 && *r <= 1.0)) Invalid("r must lie in (0, 1]");
      break;
  }
  if (nu && !(*nu >= 0.0 && *nu <= 1.0)) Invalid("nu must lie in [0, 1]");
}

void TrainingBudget::Validate() const {
  if (steps < 1 || batch < 1) Invalid("steps and batch must be >= 1");
}

namespace {

struct PoolSplit {
  std::vector<std::size_t> pii;
  std::vector<std::size_t> nopii;
};

PoolSplit SplitPool(const Corpus& pool) {
  PoolSplit split;
  for (std::size_t i = 0; i < pool.notes.size(); ++i) {
    const Note& n = pool.notes[i];
    bool pii;
    switch (n.provenance) {
      case Provenance::kSyntheticPii: pii = true; break;
      case Provenance::kSyntheticNoPii: pii = false; break;
      default: pii = !n.spans.empty(); break;
    }
    (pii ? split.pii : split.nopii).push_back(i);
  }
  return split;
}

double EffectiveNu(const MixtureSpec& spec, const Corpus& pool,
                   const PoolSplit& split) {
  if (spec.nu) return *spec.nu;
  if (pool.notes.empty()) return 0.0;
  return static_cast<double>(split.nopii.size()) /
         static_cast<double>(pool.notes.size());
}

void RequireAvailable(std::string_view subset, std::size_t needed,
                      std::size_t available) {
  if (needed > available) {
    throw Error(ErrorCode::kInsufficientPool,
                "InsufficientPool(" + std::string(subset) + ", needed " +
                    std::to_string(needed) + ", available " +
                    std::to_string(available) + ")");
  }
}

// Draws the synthetic allotment without replacement, split by nu.
void AddSynthetic(MixturePlan& plan, const Corpus& pool, const PoolSplit& split,
                  std::size_t s) {
  const auto nopii = static_cast<std::size_t>(
      RoundHalfAway(plan.nu * static_cast<double>(s)));
  const std::size_t pii = s - nopii;
  RequireAvailable("synthetic_pii", pii, split.pii.size());
  RequireAvailable("synthetic_nopii", nopii, split.nopii.size());

  Rng pii_rng(DeriveSeed(plan.spec.rng_seed, 1));
  for (std::size_t k : SampleWithoutReplacement(split.pii.size(), pii, pii_rng)) {
    plan.ids.push_back({pool.notes[split.pii[k]].id, Source::kSyntheticPii});
  }
  Rng nopii_rng(DeriveSeed(plan.spec.rng_seed, 2));
  for (std::size_t k :
       SampleWithoutReplacement(split.nopii.size(), nopii, nopii_rng)) {
    plan.ids.push_back({pool.notes[split.nopii[k]].id, Source::kSyntheticNoPii});
  }
  plan.counts.n_syn = s;
  plan.counts.n_syn_pii = pii;
  plan.counts.n_syn_nopii = nopii;
}

void Finish(MixturePlan& plan) {
  plan.counts.total = plan.counts.n_real + plan.counts.n_syn;
  plan.counts.realized_fraction =
      plan.counts.total == 0 ? 0.0
                             : static_cast<double>(plan.counts.n_syn) /
                                   static_cast<double>(plan.counts.total);
}

}  // namespace

long long AugmentTarget(double f, std::size_t n_real) {
  return RoundHalfAway(f / (1.0 - f) * static_cast<double>(n_real));
}

MixturePlan PlanAugment(const Corpus& real, const Corpus& pool,
                        const MixtureSpec& spec) {
  if (spec.regime != Regime::kAugment) Invalid("PlanAugment needs regime augment");
  spec.Validate();
  const PoolSplit split = SplitPool(pool);
  MixturePlan plan;
  plan.spec = spec;
  plan.nu = EffectiveNu(spec, pool, split);

  for (const Note& n : real.notes) plan.ids.push_back({n.id, Source::kReal});
  plan.counts.n_real = real.notes.size();

  const auto target = static_cast<std::size_t>(
      std::max<long long>(0, AugmentTarget(*spec.f, real.notes.size())));
  AddSynthetic(plan, pool, split, std::min(target, pool.notes.size()));
  Finish(plan);
  return plan;
}

MixturePlan PlanFixedN(const Corpus& real, const Corpus& pool,
                       const MixtureSpec& spec) {
  if (spec.regime != Regime::kFixedN) Invalid("PlanFixedN needs regime fixed_n");
  spec.Validate();
  const PoolSplit split = SplitPool(pool);
  MixturePlan plan;
  plan.spec = spec;
  plan.nu = EffectiveNu(spec, pool, split);

  const std::size_t n = *spec.n;
  const auto n_real = static_cast<std::size_t>(
      RoundHalfAway(*spec.r * static_cast<double>(n)));
  if (n_real > real.notes.size()) {
    throw Error(ErrorCode::kInsufficientReal,
                "InsufficientReal(needed " + std::to_string(n_real) +
                    ", available " + std::to_string(real.notes.size()) + ")");
  }
  const std::size_t s = n - n_real;
  RequireAvailable("pool", s, pool.notes.size());

  Rng real_rng(DeriveSeed(spec.rng_seed, 0));
  for (std::size_t k :
       SampleWithoutReplacement(real.notes.size(), n_real, real_rng)) {
    plan.ids.push_back({real.notes[k].id, Source::kReal});
  }
  plan.counts.n_real = n_real;
  AddSynthetic(plan, pool, split, s);
  Finish(plan);
  return plan;
}

MixturePlan PlanComputeMatched(const Corpus& real, const Corpus& pool,
                               const MixtureSpec& spec,
                               const TrainingBudget& budget) {
  if (spec.regime != Regime::kComputeMatched) {
    Invalid("PlanComputeMatched needs regime compute_matched");
  }
  spec.Validate();
  budget.Validate();
  const PoolSplit split = SplitPool(pool);
  MixturePlan plan;
  plan.spec = spec;
  plan.budget = budget;
  plan.nu = EffectiveNu(spec, pool, split);
  const double f = *spec.f;

  auto empty_source = [](std::string_view which) {
    throw Error(ErrorCode::kEmptySource,
                "EmptySource(" + std::string(which) + ")");
  };
  if (real.notes.empty()) empty_source("real");
  if (f > 0.0 && plan.nu < 1.0 && split.pii.empty()) {
    empty_source("synthetic_pii");
  }
  if (f > 0.0 && plan.nu > 0.0 && split.nopii.empty()) {
    empty_source("synthetic_nopii");
  }

  Rng rng(DeriveSeed(spec.rng_seed, 3));
  std::map<std::pair<int, std::size_t>, std::uint32_t> slot_of;
  const std::size_t length = budget.examples();
  plan.sequence.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    Source source = Source::kReal;
    std::size_t note = 0;
    if (rng.Uniform() < f) {
      if (rng.Uniform() < plan.nu) {
        source = Source::kSyntheticNoPii;
        note = split.nopii[rng.Below(split.nopii.size())];
        ++plan.counts.n_syn_nopii;
      } else {
        source = Source::kSyntheticPii;
        note = split.pii[rng.Below(split.pii.size())];
        ++plan.counts.n_syn_pii;
      }
      ++plan.counts.n_syn;
    } else {
      note = rng.Below(real.notes.size());
      ++plan.counts.n_real;
    }
    const auto key = std::make_pair(static_cast<int>(source), note);
    auto [it, inserted] =
        slot_of.try_emplace(key, static_cast<std::uint32_t>(plan.ids.size()));
    if (inserted) {
      const Corpus& from = source == Source::kReal ? real : pool;
      plan.ids.push_back({from.notes[note].id, source});
    }
    plan.sequence.push_back(it->second);
  }
  Finish(plan);
  return plan;
}

MixturePlan Plan(const Corpus& real, const Corpus& pool,
                 const MixtureSpec& spec, const TrainingBudget& budget) {
  switch (spec.regime) {
    case Regime::kAugment: return PlanAugment(real, pool, spec);
    case Regime::kFixedN: return PlanFixedN(real, pool, spec);
    case Regime::kComputeMatched:
      return PlanComputeMatched(real, pool, spec, budget);
  }
  Invalid("unknown regime");
}

std::string PlanToJson(const MixturePlan& plan, int indent) {
  using json = nlohmann::ordered_json;
  auto opt = [](const auto& v) { return v ? json(*v) : json(); };
  json j;
  j["spec"]["regime"] = RegimeName(plan.spec.regime);
  j["spec"]["f"] = opt(plan.spec.f);
  j["spec"]["r"] = opt(plan.spec.r);
  j["spec"]["n"] = opt(plan.spec.n);
  j["spec"]["nu"] = opt(plan.spec.nu);
  j["spec"]["rng_seed"] = plan.spec.rng_seed;
  j["nu_effective"] = plan.nu;
  if (plan.budget) {
    j["budget"]["steps"] = plan.budget->steps;
    j["budget"]["batch"] = plan.budget->batch;
  }
  j["counts"]["n_real"] = plan.counts.n_real;
  j["counts"]["n_syn"] = plan.counts.n_syn;
  j["counts"]["n_syn_pii"] = plan.counts.n_syn_pii;
  j["counts"]["n_syn_nopii"] = plan.counts.n_syn_nopii;
  j["counts"]["total"] = plan.counts.total;
  j["counts"]["realized_fraction"] = plan.counts.realized_fraction;
  j["ids"] = json::array();
  for (const PlanEntry& e : plan.ids) {
    j["ids"].push_back({{"id", e.id}, {"source", SourceName(e.source)}});
  }
  if (plan.spec.regime == Regime::kComputeMatched) j["sequence"] = plan.sequence;
  j["rng_seed"] = plan.spec.rng_seed;
  j["prng_name"] = kPrngName;
  // Recorded for the training harness; nothing here executes a schedule.
  j["training_schedule"] = {{"epochs", 8},
                            {"early_stopping_patience", 2},
                            {"batch_size", plan.budget ? plan.budget->batch : 16},
                            {"synthetic_draw", "per_example"}};
  return j.dump(indent);
}

}  // namespace vetdeid
