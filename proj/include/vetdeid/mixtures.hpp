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

// Seeded training-set compositions.
//
//   augment          keep every real note, add S = min(round(f/(1-f) R), |pool|)
//                    synthetic notes without replacement
//   fixed_n          round(r N) real and N - round(r N) synthetic notes, both
//                    without replacement
//   compute_matched  steps * batch slots, each drawn with replacement:
//                    synthetic with probability f, otherwise real
//
// In every regime the synthetic allotment is split by nu, the no-PII share:
// round(nu S) no-PII notes, the rest PII-bearing (per-draw Bernoulli(nu) in
// compute_matched). Sampling streams: real = DeriveSeed(seed, 0),
// PII = DeriveSeed(seed, 1), no-PII = DeriveSeed(seed, 2), compute-matched
// slots = DeriveSeed(seed, 3).

#ifndef VETDEID_MIXTURES_HPP_
#define VETDEID_MIXTURES_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vetdeid/corpus.hpp"

namespace vetdeid {

enum class Regime { kAugment, kFixedN, kComputeMatched };

std::string_view RegimeName(Regime r);
Regime ParseRegime(std::string_view name);

struct MixtureSpec {
  Regime regime = Regime::kAugment;
  std::optional<double> f;       // augment, compute_matched
  std::optional<double> r;       // fixed_n
  std::optional<std::size_t> n;  // fixed_n
  // No-PII share of the synthetic allotment. Unset: mirror the pool's own
  // no-PII share.
  std::optional<double> nu;
  std::uint64_t rng_seed = 0;

  // Throws Error(kInvalidSpec) when a regime field is missing or out of
  // range.
  void Validate() const;
};

struct TrainingBudget {
  std::size_t steps = 4000;
  std::size_t batch = 16;

  void Validate() const;
  std::size_t examples() const { return steps * batch; }
};

enum class Source { kReal, kSyntheticPii, kSyntheticNoPii };
std::string_view SourceName(Source s);

struct PlanEntry {
  std::string id;
  Source source;

  bool operator==(const PlanEntry&) const = default;
};

struct PlanCounts {
  std::size_t n_real = 0;
  std::size_t n_syn = 0;
  std::size_t n_syn_pii = 0;
  std::size_t n_syn_nopii = 0;
  std::size_t total = 0;
  double realized_fraction = 0.0;  // n_syn / total

  bool operator==(const PlanCounts&) const = default;
};

struct MixturePlan {
  MixtureSpec spec;
  double nu = 0.0;  // effective
  std::optional<TrainingBudget> budget;
  PlanCounts counts;
  // Without-replacement regimes: the training set (real first, then PII,
  // then no-PII, each in draw order). compute_matched: distinct notes in
  // first-use order.
  std::vector<PlanEntry> ids;
  // compute_matched only: one index into `ids` per training example.
  std::vector<std::uint32_t> sequence;
};

MixturePlan PlanAugment(const Corpus& real, const Corpus& pool,
                        const MixtureSpec& spec);
MixturePlan PlanFixedN(const Corpus& real, const Corpus& pool,
                       const MixtureSpec& spec);
MixturePlan PlanComputeMatched(const Corpus& real, const Corpus& pool,
                               const MixtureSpec& spec,
                               const TrainingBudget& budget);
MixturePlan Plan(const Corpus& real, const Corpus& pool,
                 const MixtureSpec& spec, const TrainingBudget& budget);

// Target synthetic count for the augment regime before pool capping.
long long AugmentTarget(double f, std::size_t n_real);

std::string PlanToJson(const MixturePlan& plan, int indent = -1);

}  // namespace vetdeid

#endif  // VETDEID_MIXTURES_HPP_
