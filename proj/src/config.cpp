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

#include "vetdeid/config.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "vetdeid/error.hpp"
#include "vetdeid/io.hpp"
#include "vetdeid/random.hpp"

namespace vetdeid {
namespace {

[[noreturn]] void Bad(std::string_view section, std::string_view key,
                      const std::string& why) {
  throw Error(ErrorCode::kConfig, "config [" + std::string(section) + "] " +
                                      std::string(key) + ": " + why);
}

std::string Trimmed(std::string_view v) {
  return boost::algorithm::trim_copy(std::string(v));
}

std::uint64_t ToU64(std::string_view section, std::string_view key,
                    std::string_view raw) {
  const std::string v = Trimmed(raw);
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size()) {
    Bad(section, key, "expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

double ToDouble(std::string_view section, std::string_view key,
                std::string_view raw) {
  const std::string v = Trimmed(raw);
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    Bad(section, key, "expected a number, got '" + v + "'");
  }
}

bool ToBool(std::string_view section, std::string_view key,
            std::string_view raw) {
  const std::string v = boost::algorithm::to_lower_copy(Trimmed(raw));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  Bad(section, key, "expected a boolean, got '" + v + "'");
}

std::vector<std::string> SplitList(std::string_view raw, char sep) {
  std::vector<std::string> parts;
  const std::string s(raw);
  boost::algorithm::split(parts, s, [sep](char c) { return c == sep; });
  std::vector<std::string> out;
  for (auto& p : parts) {
    boost::algorithm::trim(p);
    if (!p.empty()) out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

void RunConfig::Validate() const {
  screening.Validate();
  budget.Validate();
  if (format != "json" && format != "csv" && format != "table") {
    throw Error(ErrorCode::kConfig,
                "--format must be json, csv or table, got '" + format + "'");
  }
  if (!(length_tolerance >= 0.0 && length_tolerance < 1.0)) {
    throw Error(ErrorCode::kConfig, "length_tolerance must lie in [0, 1)");
  }
  for (const auto& [role, label] : allowlist.roles()) {
    (void)label;
    for (const PlaceholderToken& t : ScanPlaceholders(MakePlaceholder(role, 1))) {
      if (!t.well_formed || t.role != role) {
        throw Error(ErrorCode::kConfig, "allowlist role is not a valid "
                                        "placeholder role: " + role);
      }
    }
  }
}

Detector RunConfig::MakeDetector() const {
  std::vector<NamedPattern> ps;
  for (const auto& [name, source] : patterns) ps.emplace_back(name, source);
  return Detector(std::move(ps));
}

std::uint64_t RunConfig::RequireSeed() const {
  if (!seed) {
    throw Error(ErrorCode::kConfig,
                "--seed is required (or [run] seed in the config file)");
  }
  return *seed;
}

std::string RunConfig::ToJson(int indent) const {
  nlohmann::ordered_json j;
  j["run"] = {{"seed", seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json()},
              {"format", format},
              {"allow_overlaps", allow_overlaps},
              {"prng", kPrngName}};
  j["paths"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : paths) j["paths"][k] = v;
  j["screening"] = {{"threshold", screening.near_dup_threshold},
                    {"shingle", screening.shingle_size}};
  auto opt = [](const auto& o) {
    return o ? nlohmann::ordered_json(*o) : nlohmann::ordered_json();
  };
  j["mixture"] = {{"regime", RegimeName(mixture.regime)},
                  {"f", opt(mixture.f)},
                  {"r", opt(mixture.r)},
                  {"n", opt(mixture.n)},
                  {"nu", opt(mixture.nu)}};
  j["budget"] = {{"steps", budget.steps}, {"batch", budget.batch}};
  j["templating"] = {{"length_tolerance", length_tolerance}};
  j["allowlist"] = nlohmann::ordered_json::object();
  for (const auto& [role, label] : allowlist.roles()) {
    j["allowlist"][role] = LabelName(label);
  }
  j["patterns"] = nlohmann::ordered_json::object();
  for (const auto& [name, source] : patterns) j["patterns"][name] = source;
  j["generators"] = nlohmann::ordered_json::object();
  for (const auto& [role, spec] : generators) j["generators"][role] = spec.patterns;
  j["tagger"] = {{"case_insensitive", tagger.case_insensitive},
                 {"use_patterns", tagger.use_patterns},
                 {"exclude_roles", std::vector<std::string>(
                                       tagger.exclude_roles.begin(),
                                       tagger.exclude_roles.end())}};
  return j.dump(indent);
}

void ApplySetting(RunConfig& cfg, std::string_view section,
                  std::string_view key, std::string_view value) {
  auto unknown = [&]() { Bad(section, key, "unknown key"); };
  if (section == "run") {
    if (key == "seed") {
      cfg.seed = ToU64(section, key, value);
    } else if (key == "format") {
      cfg.format = Trimmed(value);
    } else if (key == "allow_overlaps") {
      cfg.allow_overlaps = ToBool(section, key, value);
    } else {
      unknown();
    }
  } else if (section == "paths") {
    cfg.paths[std::string(key)] = Trimmed(value);
  } else if (section == "screening") {
    if (key == "threshold") {
      cfg.screening.near_dup_threshold = ToDouble(section, key, value);
    } else if (key == "shingle") {
      cfg.screening.shingle_size = ToU64(section, key, value);
    } else {
      unknown();
    }
  } else if (section == "mixture") {
    if (key == "regime") {
      try {
        cfg.mixture.regime = ParseRegime(Trimmed(value));
      } catch (const Error& e) {
        Bad(section, key, e.what());
      }
    } else if (key == "f") {
      cfg.mixture.f = ToDouble(section, key, value);
    } else if (key == "r") {
      cfg.mixture.r = ToDouble(section, key, value);
    } else if (key == "n") {
      cfg.mixture.n = ToU64(section, key, value);
    } else if (key == "nu") {
      cfg.mixture.nu = ToDouble(section, key, value);
    } else {
      unknown();
    }
  } else if (section == "budget") {
    if (key == "steps") {
      cfg.budget.steps = ToU64(section, key, value);
    } else if (key == "batch") {
      cfg.budget.batch = ToU64(section, key, value);
    } else {
      unknown();
    }
  } else if (section == "templating") {
    if (key == "length_tolerance") {
      cfg.length_tolerance = ToDouble(section, key, value);
    } else {
      unknown();
    }
  } else if (section == "allowlist") {
    try {
      cfg.allowlist.Set(std::string(key), ParseLabel(Trimmed(value)));
    } catch (const Error& e) {
      Bad(section, key, e.what());
    }
  } else if (section == "patterns") {
    const std::string source = Trimmed(value);
    try {
      NamedPattern check{std::string(key), source};
    } catch (const Error& e) {
      Bad(section, key, e.what());
    }
    auto it = std::find_if(cfg.patterns.begin(), cfg.patterns.end(),
                           [&](const auto& p) { return p.first == key; });
    if (it != cfg.patterns.end()) {
      it->second = source;
    } else {
      cfg.patterns.emplace_back(std::string(key), source);
    }
  } else if (section == "generators") {
    GeneratorSpec spec{SplitList(value, '|')};
    if (spec.patterns.empty()) Bad(section, key, "no formats given");
    cfg.generators[std::string(key)] = std::move(spec);
  } else if (section == "tagger") {
    if (key == "case_insensitive") {
      cfg.tagger.case_insensitive = ToBool(section, key, value);
    } else if (key == "use_patterns") {
      cfg.tagger.use_patterns = ToBool(section, key, value);
    } else if (key == "exclude_roles") {
      cfg.tagger.exclude_roles.clear();
      for (auto& r : SplitList(value, ',')) cfg.tagger.exclude_roles.insert(r);
    } else {
      unknown();
    }
  } else {
    throw Error(ErrorCode::kConfig,
                "config: unknown section [" + std::string(section) + "]");
  }
}

RunConfig ParseConfigString(std::string_view ini) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(ini)};
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    Error err(ErrorCode::kConfig, std::string("config: ") + e.message());
    err.with_line(e.line());
    throw err;
  }
  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw Error(ErrorCode::kConfig,
                  "config: key '" + section + "' outside any section");
    }
    // A listed table replaces the built-in one instead of extending it.
    if (section == "allowlist") cfg.allowlist = Allowlist();
    if (section == "patterns") cfg.patterns.clear();
    for (const auto& [key, value] : body) {
      ApplySetting(cfg, section, key, value.data());
    }
  }
  cfg.Validate();
  return cfg;
}

RunConfig LoadConfig(const std::filesystem::path& path) {
  return ParseConfigString(io::ReadFile(path));
}

}  // namespace vetdeid
