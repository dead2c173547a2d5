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
#include <set>
#include <string>

#include <json.hpp>

#include "vetdeid/error.hpp"
#include "vetdeid/mixtures.hpp"

using namespace vetdeid;

namespace {

Corpus MakeReal(std::size_t n) {
  Corpus c;
  for (std::size_t i = 0; i < n; ++i) {
    c.notes.push_back({"r" + std::to_string(i), "x", {}, Provenance::kReal, {}});
  }
  return c;
}

Corpus MakePool(std::size_t pii, std::size_t nopii) {
  Corpus c;
  for (std::size_t i = 0; i < pii; ++i) {
    c.notes.push_back({"p" + std::to_string(i), "Amy",
                       {{0, 3, Label::kPer, "Amy"}},
                       Provenance::kSyntheticPii, {}});
  }
  for (std::size_t i = 0; i < nopii; ++i) {
    c.notes.push_back({"q" + std::to_string(i), "x", {}, Provenance::kSyntheticNoPii, {}});
  }
  return c;
}

MixtureSpec Augment(double f, std::uint64_t seed = 7) {
  MixtureSpec s;
  s.regime = Regime::kAugment;
  s.f = f;
  s.rng_seed = seed;
  return s;
}

}  // namespace

TEST_CASE("spec validation") {
  MixtureSpec s;
  CHECK_THROWS_AS(s.Validate(), Error);  // augment without f
  s.f = 1.0;
  CHECK_THROWS_AS(s.Validate(), Error);
  s.f = 0.5;
  CHECK_NOTHROW(s.Validate());
  s.nu = 1.5;
  CHECK_THROWS_AS(s.Validate(), Error);
  MixtureSpec b;
  b.regime = Regime::kFixedN;
  b.r = 0.0;
  b.n = 10;
  CHECK_THROWS_AS(b.Validate(), Error);
  b.r = 1.0;
  CHECK_NOTHROW(b.Validate());
  CHECK_THROWS_AS(TrainingBudget({0, 16}).Validate(), Error);
  CHECK(ParseRegime("compute_matched") == Regime::kComputeMatched);
  CHECK_THROWS_AS(ParseRegime("epochs"), Error);
}

TEST_CASE("augment sweep realizes the expected sizes") {
  const Corpus real = MakeReal(1249);
  const Corpus pool = MakePool(2978, 7404);
  const double fs[] = {0.0, 0.25, 0.5, 0.75, 0.9};
  const std::size_t s_want[] = {0, 416, 1249, 3747, 10382};
  for (int i = 0; i < 5; ++i) {
    const MixturePlan p = PlanAugment(real, pool, Augment(fs[i]));
    CHECK(p.counts.n_real == 1249);
    CHECK(p.counts.n_syn == s_want[i]);
    CHECK(p.counts.total == 1249 + s_want[i]);
    CHECK(p.ids.size() == p.counts.total);
  }
}

TEST_CASE("augment follows the rounding rule until the cap binds") {
  const Corpus pool = MakePool(400, 600);
  for (std::size_t r = 1; r < 60; r += 3) {
    const Corpus real = MakeReal(r);
    for (std::size_t k : {10, 20, 33, 50, 60, 95}) {
      const double f = static_cast<double>(k) / 100;
      const MixturePlan p = PlanAugment(real, pool, Augment(f));
      // Exact rational k r / (100 - k), rounded half away from zero.
      const std::size_t want = (2 * k * r + (100 - k)) / (2 * (100 - k));
      CHECK(p.counts.n_syn == std::min<std::size_t>(want, 1000));
      CHECK(AugmentTarget(f, r) == static_cast<long long>(want));
    }
  }
}

TEST_CASE("nu accounting and no duplicates") {
  const Corpus real = MakeReal(100);
  const Corpus pool = MakePool(300, 700);
  MixtureSpec s = Augment(0.75, 3);
  s.nu = 0.4;
  const MixturePlan p = PlanAugment(real, pool, s);
  CHECK(p.counts.n_syn == 300);
  CHECK(p.counts.n_syn_nopii == 120);
  CHECK(p.counts.n_syn_pii == 180);
  std::set<std::string> ids;
  for (const auto& e : p.ids) CHECK(ids.insert(e.id).second);

  // Default nu mirrors the pool's no-PII share.
  const MixturePlan d = PlanAugment(real, pool, Augment(0.5, 3));
  CHECK(d.nu == doctest::Approx(0.7));
  CHECK(d.counts.n_syn_nopii == 70);

  s.nu = 1.0;
  s.f = 0.9;
  const Corpus small = MakePool(10, 10);
  CHECK_THROWS_AS(PlanAugment(real, small, s), Error);
}

TEST_CASE("fixed_n rounding") {
  const Corpus real = MakeReal(1249);
  const Corpus pool = MakePool(2978, 7404);
  const double rs[] = {1.0, 0.5, 0.25, 0.10, 0.05};
  const std::size_t want[] = {1249, 625, 312, 125, 62};
  for (int i = 0; i < 5; ++i) {
    MixtureSpec s;
    s.regime = Regime::kFixedN;
    s.r = rs[i];
    s.n = 1249;
    s.rng_seed = 1;
    const MixturePlan p = PlanFixedN(real, pool, s);
    CHECK(p.counts.n_real == want[i]);
    CHECK(p.counts.n_real + p.counts.n_syn == 1249);
  }
  MixtureSpec s;
  s.regime = Regime::kFixedN;
  s.r = 0.25;
  s.n = 1000;
  const MixturePlan p = PlanFixedN(real, pool, s);
  CHECK(p.counts.n_real == 250);
  CHECK(p.counts.n_syn == 750);
  s.r = 1.0;
  s.n = 2000;
  try {
    PlanFixedN(real, pool, s);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInsufficientReal);
  }
}

TEST_CASE("compute matched") {
  const Corpus real = MakeReal(1249);
  const Corpus pool = MakePool(2978, 7404);
  MixtureSpec s;
  s.regime = Regime::kComputeMatched;
  s.f = 0.0;
  s.rng_seed = 5;
  const TrainingBudget budget{4000, 16};
  MixturePlan p = PlanComputeMatched(real, pool, s, budget);
  CHECK(p.sequence.size() == 64000);
  CHECK(p.counts.n_real == 64000);
  CHECK(p.ids.size() <= 1249);

  s.f = 0.5;
  p = PlanComputeMatched(real, pool, s, budget);
  const double n = 64000;
  const double sd = std::sqrt(n * 0.25);
  CHECK(std::fabs(static_cast<double>(p.counts.n_syn) - n / 2) <= 3 * sd);
  CHECK(p.counts.n_syn + p.counts.n_real == 64000);
  const MixturePlan again = PlanComputeMatched(real, pool, s, budget);
  CHECK(again.sequence == p.sequence);
  CHECK(again.ids == p.ids);

  MixtureSpec e = s;
  CHECK_THROWS_AS(PlanComputeMatched(Corpus{}, pool, e, budget), Error);
}

TEST_CASE("seed determinism and sensitivity") {
  const Corpus real = MakeReal(200);
  const Corpus pool = MakePool(300, 700);
  const MixturePlan base = PlanAugment(real, pool, Augment(0.5, 0));
  CHECK(PlanAugment(real, pool, Augment(0.5, 0)).ids == base.ids);
  int same = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    if (PlanAugment(real, pool, Augment(0.5, seed)).ids == base.ids) ++same;
  }
  CHECK(same == 0);
}

TEST_CASE("plan json") {
  const MixturePlan p = PlanAugment(MakeReal(3), MakePool(2, 2), Augment(0.5, 9));
  const auto j = nlohmann::json::parse(PlanToJson(p));
  CHECK(j["counts"]["n_syn"] == 3);
  CHECK(j["rng_seed"] == 9);
  CHECK(j["prng_name"] == "xoshiro256**+splitmix64");
  CHECK(j["ids"].size() == 6);
  CHECK(j["ids"][0]["source"] == "real");
  CHECK_FALSE(j.contains("sequence"));
}
