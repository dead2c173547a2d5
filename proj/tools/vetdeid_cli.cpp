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

// vetdeid: command-line front end.
//
// Exit status: 0 success, 1 validation findings, 2 usage or I/O errors.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vetdeid/config.hpp"
#include "vetdeid/corpus.hpp"
#include "vetdeid/diagnostics.hpp"
#include "vetdeid/error.hpp"
#include "vetdeid/io.hpp"
#include "vetdeid/kernels.hpp"
#include "vetdeid/metrics.hpp"
#include "vetdeid/mixtures.hpp"
#include "vetdeid/pipeline.hpp"
#include "vetdeid/screening.hpp"
#include "vetdeid/tagger.hpp"
#include "vetdeid/templating.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace vetdeid {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitFindings = 1;
constexpr int kExitUsage = 2;

struct Flags {
  std::string command;
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> regime;
  std::optional<double> f, r, nu, threshold, tolerance;
  std::optional<std::uint64_t> n, steps, batch, shingle;
  std::optional<std::string> format;
  bool allow_overlaps = false;
  bool case_insensitive = false;
  bool no_patterns = false;
  std::string out;

  std::string in, real, pool, seeds, pools, templates, gold, synthetic;
  std::string report, prompts;
  std::vector<std::string> preds, inputs, exclude_roles;
  std::size_t copies = 1;
};

void AddConfigFlags(CLI::App* sub, Flags& fl) {
  sub->add_option("--config", fl.config, "INI run configuration")
      ->check(CLI::ExistingFile);
  sub->add_option("--set", fl.sets,
                  "Override a config key, e.g. --set screening.threshold=0.95");
  sub->add_option("--out", fl.out, "Output file (default: stdout)");
  sub->add_flag("--allow-overlaps", fl.allow_overlaps,
                "Resolve overlapping gold spans instead of rejecting them");
}

void AddSeed(CLI::App* sub, Flags& fl) {
  sub->add_option("--seed", fl.seed, "Random seed");
}

void AddFormat(CLI::App* sub, Flags& fl) {
  sub->add_option("--format", fl.format, "Report format")
      ->check(CLI::IsMember({"json", "csv", "table"}));
}

void AddMixtureFlags(CLI::App* sub, Flags& fl) {
  sub->add_option("--regime", fl.regime, "augment | fixed_n | compute_matched");
  sub->add_option("--f", fl.f, "Target synthetic fraction");
  sub->add_option("--r", fl.r, "Real fraction (fixed_n)");
  sub->add_option("--n", fl.n, "Training set size (fixed_n)");
  sub->add_option("--nu", fl.nu, "No-PII share of the synthetic allotment");
  sub->add_option("--steps", fl.steps, "Optimizer steps (compute_matched)");
  sub->add_option("--batch", fl.batch, "Batch size (compute_matched)");
}

void AddScreeningFlags(CLI::App* sub, Flags& fl) {
  sub->add_option("--threshold", fl.threshold, "Near-duplicate cosine threshold");
  sub->add_option("--shingle", fl.shingle, "Character shingle width");
}

void AddTaggerFlags(CLI::App* sub, Flags& fl) {
  sub->add_option("--exclude-role", fl.exclude_roles,
                  "Leave a role's pool out of the gazetteer");
  sub->add_flag("--case-insensitive", fl.case_insensitive,
                "Case-insensitive gazetteer matching");
  sub->add_flag("--no-patterns", fl.no_patterns, "Disable regex rules");
}

RunConfig BuildConfig(const Flags& fl) {
  RunConfig cfg;
  if (!fl.config.empty()) {
    cfg = LoadConfig(fl.config);
    const fs::path base = fs::path(fl.config).parent_path();
    for (auto& [key, value] : cfg.paths) {
      if (!value.empty() && fs::path(value).is_relative()) {
        value = (base / value).lexically_normal().string();
      }
    }
  }
  for (const std::string& s : fl.sets) {
    const auto dot = s.find('.');
    const auto eq = s.find('=');
    if (dot == std::string::npos || eq == std::string::npos || dot > eq) {
      throw Error(ErrorCode::kConfig,
                  "--set expects section.key=value, got '" + s + "'");
    }
    ApplySetting(cfg, s.substr(0, dot), s.substr(dot + 1, eq - dot - 1),
                 s.substr(eq + 1));
  }
  if (fl.seed) cfg.seed = fl.seed;
  if (fl.format) cfg.format = *fl.format;
  if (fl.allow_overlaps) cfg.allow_overlaps = true;
  if (fl.regime) ApplySetting(cfg, "mixture", "regime", *fl.regime);
  if (fl.f) cfg.mixture.f = fl.f;
  if (fl.r) cfg.mixture.r = fl.r;
  if (fl.n) cfg.mixture.n = static_cast<std::size_t>(*fl.n);
  if (fl.nu) cfg.mixture.nu = fl.nu;
  if (fl.steps) cfg.budget.steps = static_cast<std::size_t>(*fl.steps);
  if (fl.batch) cfg.budget.batch = static_cast<std::size_t>(*fl.batch);
  if (fl.threshold) cfg.screening.near_dup_threshold = *fl.threshold;
  if (fl.shingle) cfg.screening.shingle_size = static_cast<std::size_t>(*fl.shingle);
  if (fl.tolerance) cfg.length_tolerance = *fl.tolerance;
  if (fl.case_insensitive) cfg.tagger.case_insensitive = true;
  if (fl.no_patterns) cfg.tagger.use_patterns = false;
  for (const auto& r : fl.exclude_roles) cfg.tagger.exclude_roles.insert(r);
  cfg.Validate();
  return cfg;
}

// Flag value, else [paths] entry, else a usage error naming the flag.
std::string PathArg(const std::string& flag_value, const RunConfig& cfg,
                    const std::string& key) {
  if (!flag_value.empty()) return flag_value;
  auto it = cfg.paths.find(key);
  if (it != cfg.paths.end() && !it->second.empty()) return it->second;
  throw Error(ErrorCode::kConfig,
              "missing --" + key + " (or [paths] " + key + " in the config)");
}

ordered_json Meta(const Flags& fl, const RunConfig& cfg) {
  return {{"tool", "vetdeid"},
          {"command", fl.command},
          {"simd_backend", kernels::BackendName(kernels::ActiveBackend())},
          {"config", ordered_json::parse(cfg.ToJson())}};
}

// Writes `content` to --out (atomically) or stdout. JSON objects gain a
// leading "meta" member; other formats get a "<out>.meta.json" sidecar.
void Emit(const Flags& fl, const RunConfig& cfg, std::string content,
          bool is_json_object) {
  if (is_json_object) {
    ordered_json body = ordered_json::parse(content);
    ordered_json j;
    j["meta"] = Meta(fl, cfg);
    for (auto& [k, v] : body.items()) j[k] = v;
    content = j.dump(2) + "\n";
  }
  if (fl.out.empty()) {
    std::cout << content;
    std::cout.flush();
    return;
  }
  io::WriteFileAtomic(fl.out, content);
  if (!is_json_object) io::WriteFileAtomic(fl.out + ".meta.json", Meta(fl, cfg).dump(2) + "\n");
}

// The summary goes to stdout unless stdout carries the output itself.
void Summary(const Flags& fl, const std::string& line) {
  (fl.out.empty() ? std::cerr : std::cout) << line << "\n";
}

std::string Pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * v);
  return buf;
}

std::string Fix(double v, int d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", d, v);
  return buf;
}

Corpus LoadCorpus(const std::string& path, const RunConfig& cfg) {
  return ParseJsonl(path, ParseOptions{cfg.allow_overlaps});
}

int RunMask(const Flags& fl) {
  const RunConfig cfg = BuildConfig(fl);
  const Corpus corpus = LoadCorpus(PathArg(fl.in, cfg, "in"), cfg);
  std::string out;
  std::string prompts;
  std::size_t leaks = 0;
  std::size_t repeats = 0;
  for (const Note& n : corpus.notes) {
    Template t = MaskNote(n);
    t.constraints.length_tolerance = cfg.length_tolerance;
    for (const std::string& s : LeakedSurfaces(n, t)) {
      ++leaks;
      std::cerr << "doc " << n.id << ": unannotated identifier '" << s
                << "' remains in masked text\n";
    }
    if (t.repeat_bearing) ++repeats;
    out += TemplateToJsonLine(t) + "\n";
    if (!fl.prompts.empty()) {
      ordered_json p = {{"seed_id", n.id},
                        {"prompt", BuildPrompt(t, PromptStyle{}, cfg.allowlist)}};
      prompts += p.dump() + "\n";
    }
  }
  Emit(fl, cfg, out, false);
  if (!fl.prompts.empty()) io::WriteFileAtomic(fl.prompts, prompts);
  Summary(fl, "mask: " + std::to_string(corpus.notes.size()) + " notes masked, " +
                  std::to_string(repeats) + " repeat-bearing, " +
                  std::to_string(leaks) + " leaked surfaces");
  return leaks > 0 ? kExitFindings : kExitOk;
}

int RunValidateTemplates(const Flags& fl) {
  const RunConfig cfg = BuildConfig(fl);
  const Detector detector = cfg.MakeDetector();
  const std::string content = io::ReadFile(PathArg(fl.in, cfg, "templates"));
  std::istringstream lines(content);
  std::string line;
  std::size_t line_number = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::string out;
  std::string report;
  while (std::getline(lines, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const Template t = ParseTemplateLine(line, line_number);
    std::vector<TemplateFinding> findings =
        CheckTemplate(t.text, t.constraints, detector, cfg.allowlist);
    if (t.repeat_bearing) {
      findings.push_back({ErrorCode::kDuplicatePlaceholder, "repeat_bearing",
                          "seed note repeats an entity"});
    }
    if (findings.empty()) {
      ++accepted;
      out += TemplateToJsonLine(t) + "\n";
      continue;
    }
    ++rejected;
    for (const TemplateFinding& f : findings) {
      std::cerr << "line " << line_number << ": " << ErrorCodeName(f.code) << " "
                << f.subject << (f.detail.empty() ? "" : " (" + f.detail + ")")
                << "\n";
      ordered_json j = {{"line", line_number},
                        {"seed_id", t.seed_id ? ordered_json(*t.seed_id)
                                              : ordered_json()},
                        {"code", ErrorCodeName(f.code)},
                        {"subject", f.subject},
                        {"detail", f.detail}};
      report += j.dump() + "\n";
    }
  }
  Emit(fl, cfg, out, false);
  if (!fl.report.empty()) io::WriteFileAtomic(fl.report, report);
  Summary(fl, "validate-templates: " + std::to_string(accepted) + " accepted, " +
                  std::to_string(rejected) + " rejected");
  return rejected > 0 ? kExitFindings : kExitOk;
}

int RunFill(const Flags& fl) {
  const RunConfig cfg = BuildConfig(fl);
  const std::uint64_t seed = cfg.RequireSeed();
  const auto templates =
      ParseTemplatesJsonl(io::ReadFile(PathArg(fl.templates, cfg, "templates")));
  const EntityPool pools = LoadPools(PathArg(fl.pools, cfg, "pools"), cfg);
  const Corpus c = FillAll(templates, pools, cfg.allowlist, seed, fl.copies);
  std::size_t pii = 0;
  for (const Note& n : c.notes) pii += n.spans.empty() ? 0 : 1;
  Emit(fl, cfg, CorpusToJsonl(c), false);
  Summary(fl, "fill: " + std::to_string(c.notes.size()) + " notes (" +
                  std::to_string(pii) + " PII-bearing, " +
                  std::to_string(c.notes.size() - pii) + " no-PII) from " +
                  std::to_string(templates.size()) + " templates, seed " +
                  std::to_string(seed));
  return kExitOk;
}

int RunDedup(const Flags& fl) {
  const RunConfig cfg = BuildConfig(fl);
  const Corpus pool = LoadCorpus(PathArg(fl.in, cfg, "pool"), cfg);
  Corpus seeds;
  std::string seeds_path = fl.seeds;
  if (seeds_path.empty() && cfg.paths.contains("seeds")) seeds_path = cfg.paths.at("seeds");
  if (!seeds_path.empty()) seeds = LoadCorpus(seeds_path, cfg);
  const DedupResult r = Dedup(pool, seeds, cfg.screening);
  Emit(fl, cfg, CorpusToJsonl(r.retained), false);
  if (!fl.report.empty()) {
    std::vector<std::string> order;
    for (const Note& n : pool.notes) order.push_back(n.id);
    io::WriteFileAtomic(fl.report, DedupReportToJsonl(r.report, order));
  }
  std::size_t by[3] = {0, 0, 0};
  for (const auto& d : r.report.dropped) ++by[static_cast<int>(d.reason)];
  Summary(fl, "dedup: " + std::to_string(r.report.retained.size()) + " retained, " +
                  std::to_string(r.report.dropped.size()) + " dropped (" +
                  std::to_string(by[0]) + " exact, " + std::to_string(by[1]) +
                  " near, " + std::to_string(by[2]) + " seed) at threshold " +
                  Fix(cfg.screening.near_dup_threshold, 2));
  return kExitOk;
}

int RunMix(const Flags& fl) {
  const RunConfig cfg = BuildConfig(fl);
  MixtureSpec spec = cfg.mixture;
  spec.rng_seed = cfg.RequireSeed();
  const Corpus real = LoadCorpus(PathArg(fl.real, cfg, "real"), cfg);
  const Corpus pool = LoadCorpus(PathArg(fl.pool, cfg, "pool"), cfg);
  const MixturePlan plan = Plan(real, pool, spec, cfg.budget);
  Emit(fl, cfg, PlanToJson(plan), true);
  const PlanCounts& c = plan.counts;
  Summary(fl, "mix " + std::string(RegimeName(spec.regime)) + ": real " +
                  std::to_string(c.n_real) + " + synthetic " +
                  std::to_string(c.n_syn) + " (PII " + std::to_string(c.n_syn_pii) +
                  ", no-PII " + std::to_string(c.n_syn_nopii) + ") = " +
                  std::to_string(c.total) + ", realized " +
                  Pct(c.realized_fraction));
  return kExitOk;
}

int RunTag(const Flags& fl) {
  const RunConfig cfg = BuildConfig(fl);
  const Corpus corpus = LoadCorpus(PathArg(fl.in, cfg, "in"), cfg);
  const EntityPool pools = LoadPools(PathArg(fl.pools, cfg, "pools"), cfg);
  const Gazetteer gaz =
      Gazetteer::FromPools(pools, cfg.allowlist, cfg.tagger, cfg.MakeDetector());
  const auto preds = TagCorpus(corpus, gaz);
  std::size_t spans = 0;
  for (const auto& p : preds) spans += p.spans.size();
  Emit(fl, cfg, PredictionsToJsonl(preds), false);
  Summary(fl, "tag: " + std::to_string(spans) + " spans over " +
                  std::to_string(preds.size()) + " notes, gazetteer " +
                  std::to_string(gaz.size()) + " entries");
  return kExitOk;
}

int RunEvaluate(const Flags& fl) {
  const RunConfig cfg = BuildConfig(fl);
  const Corpus gold = LoadCorpus(PathArg(fl.gold, cfg, "gold"), cfg);
  std::vector<std::string> pred_paths = fl.preds;
  if (pred_paths.empty()) pred_paths.push_back(PathArg("", cfg, "pred"));
  std::vector<EvalReport> reports;
  for (const std::string& p : pred_paths) {
    try {
      const auto preds = ParsePredictionsJsonl(io::ReadFile(p));
      reports.push_back(Evaluate(gold, preds));
    } catch (const Error& e) {
      Error tagged(e.code(), p + ": " + e.what());
      if (e.line()) tagged.with_line(*e.line());
      if (e.doc_id()) tagged.with_doc(*e.doc_id());
      throw tagged;
    }
  }
  if (reports.size() == 1) {
    const EvalReport& r = reports.front();
    if (cfg.format == "json") {
      Emit(fl, cfg, ReportToJson(r), true);
    } else {
      Emit(fl, cfg, cfg.format == "csv" ? ReportToCsv(r) : ReportToTable(r), false);
    }
    Summary(fl, "evaluate: overlap F1 " + Fix(r.overlap_prf().f1, 4) +
                    ", exact F1 " + Fix(r.exact_prf().f1, 4) + ", leakage " +
                    Pct(r.leakage()) + " (" + std::to_string(r.n_leaked_docs) +
                    "/" + std::to_string(r.n_docs) + " documents)");
    return kExitOk;
  }
  const AggregateReport a = Aggregate(reports);
  if (cfg.format == "json") {
    Emit(fl, cfg, AggregateToJson(a), true);
  } else {
    Emit(fl, cfg, cfg.format == "csv" ? AggregateToCsv(a) : AggregateToTable(a),
         false);
  }
  std::string line = "evaluate: " + std::to_string(reports.size()) + " runs";
  for (const auto& m : a.metrics) {
    if (m.name == "span_overlap_f1" || m.name == "leakage") {
      line += ", " + m.name + " " + Fix(m.mean, 4) + " +/- " +
              Fix(m.ci_half_width.value_or(0.0), 4);
    }
  }
  Summary(fl, line);
  return kExitOk;
}

int RunDiagnose(const Flags& fl) {
  const RunConfig cfg = BuildConfig(fl);
  std::vector<std::string> paths = fl.inputs;
  if (paths.empty()) paths.push_back(PathArg("", cfg, "in"));
  std::vector<Diagnostics> ds;
  for (const std::string& p : paths) ds.push_back(Diagnose(LoadCorpus(p, cfg)));
  if (cfg.format == "json") {
    Emit(fl, cfg, DiagnosticsToJson(ds), true);
  } else {
    Emit(fl, cfg, cfg.format == "csv" ? DiagnosticsToCsv(ds) : DiagnosticsToTable(ds),
         false);
  }
  std::string line = "diagnose:";
  for (const auto& d : ds) {
    line += " " + d.subset.name + " " + std::to_string(d.subset.n_notes) +
            " notes (" + Fix(d.subset.pct_with_span(), 1) + "% with spans);";
  }
  line.pop_back();
  Summary(fl, line);
  return kExitOk;
}

int RunCompare(const Flags& fl) {
  const RunConfig cfg = BuildConfig(fl);
  const Diagnostics real = Diagnose(LoadCorpus(PathArg(fl.real, cfg, "real"), cfg));
  const Diagnostics syn =
      Diagnose(LoadCorpus(PathArg(fl.synthetic, cfg, "synthetic"), cfg));
  const ShiftReport s = Compare(real, syn);
  if (cfg.format == "json") {
    Emit(fl, cfg, ShiftToJson(s), true);
  } else {
    Emit(fl, cfg, cfg.format == "csv" ? ShiftToCsv(s) : ShiftToTable(s), false);
  }
  const ShiftField* chars = s.Find("median_chars_ratio");
  Summary(fl, "compare: " + std::to_string(s.fields.size()) +
                  " fields, median length ratio " +
                  (chars && chars->value ? Fix(*chars->value, 3) : "n/a"));
  return kExitOk;
}

int RunPipelineCommand(const Flags& fl, const std::string& out_dir) {
  const RunConfig cfg = BuildConfig(fl);
  PipelineInputs in;
  in.config = cfg;
  in.copies = fl.copies;
  in.templates =
      ParseTemplatesJsonl(io::ReadFile(PathArg(fl.templates, cfg, "templates")));
  in.pools = LoadPools(PathArg(fl.pools, cfg, "pools"), cfg);
  in.real = LoadCorpus(PathArg(fl.real, cfg, "real"), cfg);
  const PipelineResult r = RunPipeline(in);

  const fs::path dir = out_dir.empty() ? fs::path(PathArg("", cfg, "out_dir"))
                                       : fs::path(out_dir);
  fs::create_directories(dir);
  std::vector<std::string> order;
  for (const Note& n : r.synthetic.notes) order.push_back(n.id);
  io::WriteFileAtomic(dir / "synthetic.jsonl", CorpusToJsonl(r.synthetic));
  io::WriteFileAtomic(dir / "dedup.jsonl", DedupReportToJsonl(r.dedup.report, order));
  io::WriteFileAtomic(dir / "plan.json", PlanToJson(r.plan, 2) + "\n");
  io::WriteFileAtomic(dir / "train.jsonl", CorpusToJsonl(r.train));
  io::WriteFileAtomic(dir / "predictions.jsonl", PredictionsToJsonl(r.predictions));
  io::WriteFileAtomic(dir / "report.json", ReportToJson(r.report) + "\n");
  io::WriteFileAtomic(dir / "diagnostics.json", DiagnosticsToJson(r.diagnostics) + "\n");
  ordered_json meta = Meta(fl, cfg);
  meta["rejected_templates"] = ordered_json::array();
  for (const auto& rej : r.rejected) {
    meta["rejected_templates"].push_back({{"index", rej.index}, {"reason", rej.reason}});
  }
  io::WriteFileAtomic(dir / "meta.json", meta.dump(2) + "\n");
  std::cout << "pipeline: " << in.templates.size() - r.rejected.size() << "/"
            << in.templates.size() << " templates filled, "
            << r.dedup.report.retained.size() << " retained after dedup, train "
            << r.train.notes.size() << " notes, overlap F1 "
            << Fix(r.report.overlap_prf().f1, 4) << ", leakage "
            << Pct(r.report.leakage()) << " -> " << dir.string() << "\n";
  return kExitOk;
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo:
    case ErrorCode::kConfig:
      return kExitUsage;
    default:
      return kExitFindings;
  }
}

int Main(int argc, char** argv) {
  CLI::App app{"vetdeid: template-based synthetic notes and de-identification "
               "evaluation"};
  app.require_subcommand(1);
  Flags fl;
  std::string out_dir;

  auto* mask = app.add_subcommand("mask", "Mask annotated notes into templates");
  AddConfigFlags(mask, fl);
  mask->add_option("--in", fl.in, "Annotated notes JSONL");
  mask->add_option("--prompts", fl.prompts, "Also write generation prompts JSONL");
  mask->add_option("--length-tolerance", fl.tolerance, "Relative word-count band");

  auto* validate =
      app.add_subcommand("validate-templates", "Screen candidate templates");
  AddConfigFlags(validate, fl);
  validate->add_option("--in", fl.in, "Templates JSONL");
  validate->add_option("--report", fl.report, "Findings JSONL");

  auto* fill = app.add_subcommand("fill", "Instantiate templates from pools");
  AddConfigFlags(fill, fl);
  AddSeed(fill, fl);
  fill->add_option("--templates", fl.templates, "Templates JSONL");
  fill->add_option("--pools", fl.pools, "Directory of <ROLE>.txt pools");
  fill->add_option("--copies", fl.copies, "Fills per template")
      ->check(CLI::PositiveNumber);

  auto* dedup = app.add_subcommand("dedup", "Remove duplicate synthetic notes");
  AddConfigFlags(dedup, fl);
  AddScreeningFlags(dedup, fl);
  dedup->add_option("--in", fl.in, "Synthetic pool JSONL");
  dedup->add_option("--seeds", fl.seeds, "Seed (real) notes JSONL");
  dedup->add_option("--report", fl.report, "Per-note dedup report JSONL");

  auto* mix = app.add_subcommand("mix", "Plan a training mixture");
  AddConfigFlags(mix, fl);
  AddSeed(mix, fl);
  AddMixtureFlags(mix, fl);
  mix->add_option("--real", fl.real, "Real training notes JSONL");
  mix->add_option("--pool", fl.pool, "Synthetic pool JSONL");

  auto* tag = app.add_subcommand("tag", "Run the reference tagger");
  AddConfigFlags(tag, fl);
  AddTaggerFlags(tag, fl);
  tag->add_option("--in", fl.in, "Notes JSONL");
  tag->add_option("--pools", fl.pools, "Directory of <ROLE>.txt pools");

  auto* eval = app.add_subcommand("evaluate", "Score predictions against gold");
  AddConfigFlags(eval, fl);
  AddFormat(eval, fl);
  eval->add_option("--gold", fl.gold, "Gold notes JSONL");
  eval->add_option("--pred", fl.preds,
                   "Predictions JSONL; repeat for multi-seed aggregation");

  auto* diag = app.add_subcommand("diagnose", "Corpus statistics");
  AddConfigFlags(diag, fl);
  AddFormat(diag, fl);
  diag->add_option("--in", fl.inputs, "Corpus JSONL; repeat for several subsets");

  auto* cmp = app.add_subcommand("compare", "Synthetic-vs-real shift report");
  AddConfigFlags(cmp, fl);
  AddFormat(cmp, fl);
  cmp->add_option("--real", fl.real, "Real notes JSONL");
  cmp->add_option("--synthetic", fl.synthetic, "Synthetic notes JSONL");

  auto* pipe = app.add_subcommand(
      "pipeline", "fill, dedup, mix, tag, evaluate and diagnose in one run");
  pipe->add_option("--config", fl.config, "INI run configuration")
      ->check(CLI::ExistingFile);
  pipe->add_option("--set", fl.sets, "Override a config key");
  pipe->add_flag("--allow-overlaps", fl.allow_overlaps, "Resolve gold overlaps");
  AddSeed(pipe, fl);
  AddMixtureFlags(pipe, fl);
  AddScreeningFlags(pipe, fl);
  AddTaggerFlags(pipe, fl);
  pipe->add_option("--ablate-role", fl.exclude_roles,
                   "Alias of --exclude-role");
  pipe->add_option("--templates", fl.templates, "Templates JSONL");
  pipe->add_option("--pools", fl.pools, "Directory of <ROLE>.txt pools");
  pipe->add_option("--real", fl.real, "Real notes JSONL");
  pipe->add_option("--copies", fl.copies, "Fills per template")
      ->check(CLI::PositiveNumber);
  pipe->add_option("--out-dir", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    const std::pair<CLI::App*, int (*)(const Flags&)> commands[] = {
        {mask, RunMask},   {validate, RunValidateTemplates},
        {fill, RunFill},   {dedup, RunDedup},
        {mix, RunMix},     {tag, RunTag},
        {eval, RunEvaluate}, {diag, RunDiagnose},
        {cmp, RunCompare},
    };
    for (const auto& [sub, run] : commands) {
      if (!sub->parsed()) continue;
      fl.command = sub->get_name();
      return run(fl);
    }
    if (pipe->parsed()) {
      fl.command = "pipeline";
      return RunPipelineCommand(fl, out_dir);
    }
  } catch (const Error& e) {
    std::cerr << "error[" << ErrorCodeName(e.code()) << "]";
    if (e.line()) std::cerr << " line " << *e.line();
    if (e.doc_id()) std::cerr << " doc " << *e.doc_id();
    std::cerr << ": " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace
}  // namespace vetdeid

int main(int argc, char** argv) { return vetdeid::Main(argc, argv); }
