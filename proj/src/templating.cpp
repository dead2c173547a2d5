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

#include "vetdeid/templating.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "vetdeid/io.hpp"
#include "vetdeid/text.hpp"

namespace vetdeid {

Allowlist Allowlist::Default() {
  Allowlist a;
  for (const char* r : {"VET", "OWNER", "PATIENT"}) a.Set(r, Label::kPer);
  for (const char* r : {"CLINIC", "LAB", "ORGANISATION"}) a.Set(r, Label::kOrg);
  for (const char* r : {"CITY", "ADDRESS"}) a.Set(r, Label::kLoc);
  for (const char* r : {"DATE", "TIME"}) a.Set(r, Label::kTime);
  for (const char* r : {"ID", "DEVICE"}) a.Set(r, Label::kMisc);
  a.Set("PERSON", Label::kPer);
  a.Set("ORG", Label::kOrg);
  a.Set("LOC", Label::kLoc);
  a.Set("DATE_GENERIC", Label::kTime);
  a.Set("MISC_GENERIC", Label::kMisc);
  return a;
}

void Allowlist::Set(std::string role, Label label) {
  for (auto& [r, l] : roles_) {
    if (r == role) {
      l = label;
      return;
    }
  }
  roles_.emplace_back(std::move(role), label);
}

std::optional<Label> Allowlist::Lookup(std::string_view role) const {
  for (const auto& [r, l] : roles_) {
    if (r == role) return l;
  }
  return std::nullopt;
}

std::string_view GenericRole(Label label) {
  switch (label) {
    case Label::kPer: return "PERSON";
    case Label::kOrg: return "ORG";
    case Label::kLoc: return "LOC";
    case Label::kTime: return "DATE_GENERIC";
    case Label::kMisc: return "MISC_GENERIC";
  }
  return "MISC_GENERIC";
}

Template MaskNote(const Note& note) {
  Template t;
  t.seed_id = note.id;
  t.constraints.seed_length = text::WordCount(note.sentence);

  std::vector<Span> spans = note.spans;
  std::sort(spans.begin(), spans.end(), SpanLess);

  const std::u32string cps = text::Decode(note.sentence);
  std::map<std::pair<Label, std::string>, unsigned> assigned;
  unsigned next_index[kAllLabels.size()] = {};
  std::u32string out;
  std::size_t pos = 0;
  for (const Span& s : spans) {
    out.append(cps, pos, s.start - pos);
    auto key = std::make_pair(s.label, s.entity);
    auto it = assigned.find(key);
    unsigned index;
    if (it == assigned.end()) {
      index = ++next_index[LabelIndex(s.label)];
      assigned.emplace(std::move(key), index);
    } else {
      index = it->second;
      t.repeat_bearing = true;
    }
    out += text::Decode(MakePlaceholder(GenericRole(s.label), index));
    pos = s.end;
  }
  out.append(cps, pos, std::u32string::npos);
  t.text = text::Encode(out);
  return t;
}

std::vector<std::string> LeakedSurfaces(const Note& note, const Template& tmpl) {
  std::set<std::string> leaked;
  for (const Span& s : note.spans) {
    if (!s.entity.empty() && tmpl.text.find(s.entity) != std::string::npos) {
      leaked.insert(s.entity);
    }
  }
  return {leaked.begin(), leaked.end()};
}

std::vector<TemplateFinding> CheckTemplate(std::string_view text,
                                           const TemplateConstraints& constraints,
                                           const Detector& detector,
                                           const Allowlist& allowlist) {
  std::vector<TemplateFinding> findings;
  std::unordered_set<std::string> seen;
  for (const PlaceholderToken& tok : ScanPlaceholders(text)) {
    if (!tok.well_formed) {
      findings.push_back({ErrorCode::kMalformedPlaceholder, tok.token,
                          "expected __ROLE<k>__"});
      continue;
    }
    if (!allowlist.Lookup(tok.role)) {
      findings.push_back(
          {ErrorCode::kUnknownPlaceholder, tok.token, "role not allowlisted"});
      continue;
    }
    if (!seen.insert(tok.token).second) {
      findings.push_back(
          {ErrorCode::kDuplicatePlaceholder, tok.token, "appears twice"});
    }
  }
  for (const DetectorFinding& f : detector.Detect(text)) {
    findings.push_back({ErrorCode::kIdentifierLikeContent,
                        text::Substr(text, f.start, f.end), f.pattern});
  }
  if (constraints.seed_length) {
    const double seed = static_cast<double>(*constraints.seed_length);
    const double lo = seed * (1.0 - constraints.length_tolerance);
    const double hi = seed * (1.0 + constraints.length_tolerance);
    const auto words = static_cast<double>(text::WordCount(text));
    if (words < lo || words > hi) {
      findings.push_back({ErrorCode::kLengthOutOfRange,
                          std::to_string(static_cast<std::size_t>(words)),
                          "[" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]"});
    }
  }
  return findings;
}

Template ValidateTemplate(std::string_view text,
                          const TemplateConstraints& constraints,
                          const Detector& detector, const Allowlist& allowlist,
                          std::optional<std::string> seed_id) {
  if (!(constraints.length_tolerance >= 0.0 &&
        constraints.length_tolerance < 1.0)) {
    throw Error(ErrorCode::kConfig, "length tolerance must lie in [0, 1)");
  }
  const auto findings = CheckTemplate(text, constraints, detector, allowlist);
  if (!findings.empty()) {
    const TemplateFinding& f = findings.front();
    throw Error(f.code, std::string(ErrorCodeName(f.code)) + ": '" +
                            f.subject + "' (" + f.detail + ")");
  }
  Template t;
  t.text = std::string(text);
  t.seed_id = std::move(seed_id);
  t.constraints = constraints;
  return t;
}

std::string ExpandPattern(std::string_view pattern, Rng& rng) {
  static constexpr const char* kMon[] = {"Jan", "Feb", "Mar", "Apr",
                                         "May", "Jun", "Jul", "Aug",
                                         "Sep", "Oct", "Nov", "Dec"};
  static constexpr const char* kMonth[] = {
      "January", "February", "March",     "April",   "May",      "June",
      "July",    "August",   "September", "October", "November", "December"};
  auto two = [](std::uint64_t v) {
    return (v < 10 ? "0" : "") + std::to_string(v);
  };
  std::string out;
  std::size_t i = 0;
  while (i < pattern.size()) {
    const std::string_view rest = pattern.substr(i);
    if (rest.starts_with("YYYY")) {
      out += std::to_string(2010 + rng.Below(15));
      i += 4;
    } else if (rest.starts_with("Month")) {
      out += kMonth[rng.Below(12)];
      i += 5;
    } else if (rest.starts_with("Mon")) {
      out += kMon[rng.Below(12)];
      i += 3;
    } else if (rest.starts_with("DD")) {
      out += two(1 + rng.Below(28));
      i += 2;
    } else if (rest.starts_with("MM")) {
      out += two(1 + rng.Below(12));
      i += 2;
    } else if (rest.starts_with("HH")) {
      out += two(rng.Below(24));
      i += 2;
    } else if (rest.starts_with("NN")) {
      out += two(rng.Below(60));
      i += 2;
    } else if (rest.front() == '#') {
      out += static_cast<char>('0' + rng.Below(10));
      i += 1;
    } else {
      out += rest.front();
      i += 1;
    }
  }
  return out;
}

void EntityPool::AddSurfaces(const std::string& role,
                             std::vector<std::string> surfaces) {
  RolePool& pool = pools_[role];
  for (std::string& s : surfaces) {
    if (s.empty()) {
      throw Error(ErrorCode::kConfig, "empty surface in pool " + role);
    }
    if (!ScanPlaceholders(s).empty()) {
      throw Error(ErrorCode::kConfig, "pool " + role +
                                          " entry contains placeholder syntax: " +
                                          s);
    }
    pool.normalized.push_back(text::Normalize(s));
    pool.surfaces.push_back(std::move(s));
  }
}

void EntityPool::SetGenerator(const std::string& role, GeneratorSpec spec) {
  generators_[role] = std::move(spec);
}

void EntityPool::RemoveRole(const std::string& role) {
  pools_.erase(role);
  generators_.erase(role);
}

const RolePool* EntityPool::Pool(std::string_view role) const {
  auto it = pools_.find(role);
  return it == pools_.end() || it->second.surfaces.empty() ? nullptr
                                                           : &it->second;
}

const GeneratorSpec* EntityPool::Generator(std::string_view role) const {
  auto it = generators_.find(role);
  return it == generators_.end() || it->second.patterns.empty() ? nullptr
                                                                : &it->second;
}

void EntityPool::CheckCovers(const Allowlist& allowlist) const {
  for (const auto& [role, label] : allowlist.roles()) {
    if (Pool(role) == nullptr && Generator(role) == nullptr) {
      throw Error(ErrorCode::kMissingRole,
                  "role " + role + " has neither a pool nor a generator");
    }
  }
}

EntityPool EntityPool::LoadDirectory(const std::filesystem::path& dir,
                                     const Allowlist& allowlist) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kIo, "pool directory not found: " + dir.string());
  }
  EntityPool pool;
  for (const auto& [role, label] : allowlist.roles()) {
    const auto file = dir / (role + ".txt");
    if (!std::filesystem::exists(file)) continue;
    std::vector<std::string> surfaces;
    for (std::string& line : io::ReadLines(file)) {
      const auto b = line.find_first_not_of(" \t");
      if (b == std::string::npos) continue;
      const auto e = line.find_last_not_of(" \t");
      surfaces.push_back(line.substr(b, e - b + 1));
    }
    pool.AddSurfaces(role, std::move(surfaces));
  }
  return pool;
}

std::map<std::string, GeneratorSpec> DefaultGenerators() {
  return {
      {"DATE", {{"DD Mon YYYY", "DD/MM/YYYY"}}},
      {"DATE_GENERIC", {{"DD/MM/YYYY", "DD Month YYYY"}}},
      {"TIME", {{"HH:NN"}}},
      {"ID", {{"#########", "#######"}}},
  };
}

FillResult FillTemplate(const Template& tmpl, const EntityPool& pools,
                        const Allowlist& allowlist, std::uint64_t seed,
                        std::string note_id) {
  const std::u32string cps = text::Decode(tmpl.text);
  const std::vector<PlaceholderToken> tokens = ScanPlaceholders(
      std::u32string_view(cps));
  std::unordered_set<std::string> tokens_seen;
  for (const PlaceholderToken& tok : tokens) {
    if (!tok.well_formed) {
      throw Error(ErrorCode::kMalformedPlaceholder,
                  "malformed placeholder " + tok.token);
    }
    if (!allowlist.Lookup(tok.role)) {
      throw Error(ErrorCode::kUnknownPlaceholder,
                  "placeholder role not allowlisted: " + tok.token);
    }
    if (!tokens_seen.insert(tok.token).second) {
      throw Error(ErrorCode::kDuplicatePlaceholder,
                  "placeholder repeats: " + tok.token);
    }
  }

  Rng rng(seed);
  FillResult result;
  std::string out;
  out.reserve(tmpl.text.size() + 16 * tokens.size());
  std::size_t out_len = 0;  // code points
  std::size_t pos = 0;
  std::unordered_set<std::string> used;  // normalized surfaces
  std::vector<std::size_t> candidates;

  for (const PlaceholderToken& tok : tokens) {
    const std::string between = text::Encode(
        std::u32string_view(cps).substr(pos, tok.start - pos));
    out += between;
    out_len += tok.start - pos;
    pos = tok.end;

    std::string surface;
    if (const RolePool* pool = pools.Pool(tok.role)) {
      candidates.clear();
      for (std::size_t i = 0; i < pool->surfaces.size(); ++i) {
        if (!used.contains(pool->normalized[i])) candidates.push_back(i);
      }
      if (candidates.empty()) {
        throw Error(ErrorCode::kPoolExhausted,
                    "pool " + tok.role + " has no unused surface left");
      }
      const std::size_t pick = candidates[rng.Below(candidates.size())];
      surface = pool->surfaces[pick];
      used.insert(pool->normalized[pick]);
    } else if (const GeneratorSpec* gen = pools.Generator(tok.role)) {
      bool ok = false;
      for (int attempt = 0; attempt < 256 && !ok; ++attempt) {
        surface = ExpandPattern(gen->patterns[rng.Below(gen->patterns.size())],
                                rng);
        ok = used.insert(text::Normalize(surface)).second;
      }
      if (!ok) {
        throw Error(ErrorCode::kPoolExhausted,
                    "generator " + tok.role + " produced no unused surface");
      }
    } else {
      throw Error(ErrorCode::kMissingRole,
                  "no pool or generator for role " + tok.role);
    }

    FillRecord rec;
    rec.placeholder = tok.token;
    rec.role = tok.role;
    rec.span.start = out_len;
    out += surface;
    out_len += text::CodePointLength(surface);
    rec.span.end = out_len;
    rec.span.label = *allowlist.Lookup(tok.role);
    rec.span.entity = surface;
    rec.surface = std::move(surface);
    result.records.push_back(std::move(rec));
  }
  out += text::Encode(std::u32string_view(cps).substr(pos));

  result.note.id = std::move(note_id);
  result.note.sentence = std::move(out);
  result.note.seed_id = tmpl.seed_id;
  result.note.provenance = tokens.empty() ? Provenance::kSyntheticNoPii
                                          : Provenance::kSyntheticPii;
  for (const FillRecord& r : result.records) result.note.spans.push_back(r.span);
  return result;
}

std::string BuildPrompt(const Template& tmpl, const PromptStyle& style,
                        const Allowlist& allowlist) {
  std::string p;
  p += style.instruction;
  p += "\n\nRules:\n";
  p += "- Write identifiers only as placeholders from this allowlist:\n";
  for (const auto& [role, label] : allowlist.roles()) {
    p += "    __" + role + "<k>__  (" + std::string(LabelName(label)) + ")\n";
  }
  p += "- Number placeholders per role starting at 1 (__VET1__, __VET2__, ...) "
       "and use each token at most once.\n";
  p += "- Do not write names, dates, times, addresses, phone numbers, e-mail "
       "addresses, or identification numbers outside placeholders.\n";
  if (tmpl.constraints.seed_length) {
    const double n = static_cast<double>(*tmpl.constraints.seed_length);
    const double tol = tmpl.constraints.length_tolerance;
    const auto lo = static_cast<long long>(std::ceil(n * (1.0 - tol)));
    const auto hi = static_cast<long long>(std::floor(n * (1.0 + tol)));
    p += "- Length: between " + std::to_string(lo) + " and " +
         std::to_string(hi) + " words (the seed note has " +
         std::to_string(*tmpl.constraints.seed_length) + " words).\n";
  }
  p += "\n";
  p += style.output_format;
  p += "\n\nMasked seed note:\n<<<\n";
  p += tmpl.text;
  p += "\n>>>\n";
  return p;
}

std::string TemplateToJsonLine(const Template& tmpl) {
  nlohmann::ordered_json j;
  j["seed_id"] = tmpl.seed_id ? nlohmann::ordered_json(*tmpl.seed_id)
                              : nlohmann::ordered_json();
  j["text"] = tmpl.text;
  j["constraints"]["length_tolerance"] = tmpl.constraints.length_tolerance;
  j["constraints"]["seed_length"] =
      tmpl.constraints.seed_length
          ? nlohmann::ordered_json(*tmpl.constraints.seed_length)
          : nlohmann::ordered_json();
  j["repeat_bearing"] = tmpl.repeat_bearing;
  return j.dump();
}

Template ParseTemplateLine(std::string_view line, std::size_t line_number) {
  auto fail = [&](const std::string& why) {
    Error e(ErrorCode::kMalformedLine,
            "template line " + std::to_string(line_number) + ": " + why);
    e.with_line(line_number);
    return e;
  };
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw fail(e.what());
  }
  if (!j.is_object() || !j.contains("text") || !j["text"].is_string()) {
    throw fail("missing string field 'text'");
  }
  Template t;
  t.text = j["text"].get<std::string>();
  if (j.contains("seed_id") && j["seed_id"].is_string()) {
    t.seed_id = j["seed_id"].get<std::string>();
  }
  if (j.contains("constraints") && j["constraints"].is_object()) {
    const auto& c = j["constraints"];
    if (c.contains("length_tolerance") && c["length_tolerance"].is_number()) {
      t.constraints.length_tolerance = c["length_tolerance"].get<double>();
    }
    if (c.contains("seed_length") && c["seed_length"].is_number_unsigned()) {
      t.constraints.seed_length = c["seed_length"].get<std::size_t>();
    }
  }
  if (j.contains("repeat_bearing") && j["repeat_bearing"].is_boolean()) {
    t.repeat_bearing = j["repeat_bearing"].get<bool>();
  }
  return t;
}

std::vector<Template> ParseTemplatesJsonl(std::string_view content) {
  std::vector<Template> out;
  std::size_t line_number = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    std::string_view line = content.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    out.push_back(ParseTemplateLine(line, line_number));
  }
  return out;
}

}  // namespace vetdeid
