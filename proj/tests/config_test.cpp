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

#include <string>

#include <json.hpp>

#include "vetdeid/config.hpp"
#include "vetdeid/error.hpp"

using namespace vetdeid;

TEST_CASE("defaults") {
  const RunConfig c = ParseConfigString("");
  CHECK_FALSE(c.seed);
  CHECK(c.screening.near_dup_threshold == 0.90);
  CHECK(c.screening.shingle_size == 5);
  CHECK(c.length_tolerance == 0.30);
  CHECK(c.allowlist == Allowlist::Default());
  CHECK(c.budget.steps == 4000);
  CHECK_THROWS_AS(c.RequireSeed(), Error);
}

TEST_CASE("sections") {
  const RunConfig c = ParseConfigString(
      "[run]\nseed = 42\nformat = csv\n"
      "[screening]\nthreshold = 0.85\nshingle = 4\n"
      "[mixture]\nregime = fixed_n\nr = 0.25\nn = 100\nnu = 0.7\n"
      "[budget]\nsteps = 10\nbatch = 2\n"
      "[tagger]\ncase_insensitive = true\nexclude_roles = CLINIC, LAB\n"
      "[generators]\nDATE = DD/MM/YYYY | YYYY-MM-DD\n");
  CHECK(c.RequireSeed() == 42);
  CHECK(c.format == "csv");
  CHECK(c.screening.near_dup_threshold == 0.85);
  CHECK(c.mixture.regime == Regime::kFixedN);
  CHECK(*c.mixture.n == 100);
  CHECK(*c.mixture.nu == 0.7);
  CHECK(c.budget.examples() == 20);
  CHECK(c.tagger.case_insensitive);
  CHECK(c.tagger.exclude_roles.count("LAB") == 1);
  CHECK(c.generators.at("DATE").patterns.size() == 2);
  CHECK(nlohmann::json::parse(c.ToJson())["run"]["seed"] == 42);
}

TEST_CASE("allowlist section replaces the default") {
  const RunConfig c = ParseConfigString("[allowlist]\nVET = PER\nCLINIC = ORG\n");
  CHECK(c.allowlist.roles().size() == 2);
  CHECK(c.allowlist.Lookup("VET") == Label::kPer);
  CHECK_FALSE(c.allowlist.Lookup("CITY"));
  CHECK_THROWS_AS(ParseConfigString("[allowlist]\nVET = NAME\n"), Error);
}

TEST_CASE("rejections") {
  auto code = [](const char* ini) {
    try {
      ParseConfigString(ini);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  CHECK(code("[nosuch]\nx = 1\n") == ErrorCode::kConfig);
  CHECK(code("[run]\nsneed = 1\n") == ErrorCode::kConfig);
  CHECK(code("[run]\nseed = -3\n") == ErrorCode::kConfig);
  CHECK(code("[screening]\nthreshold = 1.5\n") == ErrorCode::kConfig);
  CHECK(code("[screening]\nshingle = 1\n") == ErrorCode::kConfig);
  CHECK(code("[patterns]\nbad = ([\n") == ErrorCode::kConfig);
  CHECK(code("seed = 1\n") == ErrorCode::kConfig);
}

TEST_CASE("overrides") {
  RunConfig c;
  ApplySetting(c, "run", "seed", "9");
  ApplySetting(c, "mixture", "f", "0.75");
  CHECK(*c.seed == 9);
  CHECK(*c.mixture.f == 0.75);
  CHECK_THROWS_AS(ApplySetting(c, "mixture", "f", "lots"), Error);
}

TEST_CASE("fixture config loads") {
  const RunConfig c = LoadConfig(std::string(VETDEID_FIXTURES) + "/deid.ini");
  CHECK(c.RequireSeed() == 7);
  CHECK(c.paths.at("templates") == "templates.jsonl");
  CHECK_THROWS_AS(LoadConfig("/nonexistent/deid.ini"), Error);
}
