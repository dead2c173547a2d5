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

#include "vetdeid/screening.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include <json.hpp>

#include "vetdeid/error.hpp"
#include "vetdeid/kernels.hpp"
#include "vetdeid/placeholder.hpp"
#include "vetdeid/text.hpp"

namespace vetdeid {

void ScreeningConfig::Validate() const {
  if (!(near_dup_threshold > 0.0 && near_dup_threshold <= 1.0)) {
    throw Error(ErrorCode::kConfig,
                "near-duplicate threshold must lie in (0, 1], got " +
                    std::to_string(near_dup_threshold));
  }
  if (shingle_size < 2) {
    throw Error(ErrorCode::kConfig, "shingle size must be at least 2, got " +
                                        std::to_string(shingle_size));
  }
}

NamedPattern::NamedPattern(std::string n, std::string src)
    : name(std::move(n)), source(std::move(src)) {
  try {
    regex = std::regex(source, std::regex::ECMAScript | std::regex::optimize);
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::kConfig,
                "pattern '" + name + "' does not compile: " + e.what());
  }
}

std::vector<std::pair<std::string, std::string>> Detector::DefaultSources() {
  return {
      {"digit_run", R"(\d{7,})"},
      {"numeric_date", R"(\b\d{1,2}[/.\-]\d{1,2}[/.\-](\d{4}|\d{2})\b)"},
      {"month_date",
       R"(\b\d{1,2}(st|nd|rd|th)?\s+(Jan(uary)?|Feb(ruary)?|Mar(ch)?|Apr(il)?|May|June?|July?|Aug(ust)?|Sep(t(ember)?)?|Oct(ober)?|Nov(ember)?|Dec(ember)?)\b\.?(\s+\d{4}\b)?)"},
      {"clock_time", R"(\b([01]?\d|2[0-3]):[0-5]\d\b)"},
      {"email",
       R"([A-Za-z0-9._%+\-]+@[A-Za-z0-9\-]+(\.[A-Za-z0-9\-]+)*\.[A-Za-z]{2,})"},
      {"uk_postcode", R"(\b[A-Z]{1,2}\d[A-Z\d]?\s?\d[A-Z]{2}\b)"},
      {"honorific_name", R"(\b(Mr|Mrs|Ms|Dr)\.?\s+[A-Z][a-z]+)"},
  };
}

Detector Detector::Default() {
  std::vector<NamedPattern> patterns;
  for (auto& [name, source] : DefaultSources()) {
    patterns.emplace_back(name, source);
  }
  return Detector(std::move(patterns));
}

const NamedPattern* Detector::Find(std::string_view name) const {
  for (const auto& p : patterns_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

std::vector<DetectorFinding> MatchPattern(const NamedPattern& pattern,
                                          std::string_view text) {
  std::vector<DetectorFinding> out;
  const text::OffsetMap map(text);
  auto begin = std::cregex_iterator(text.data(), text.data() + text.size(),
                                    pattern.regex);
  for (auto it = begin; it != std::cregex_iterator(); ++it) {
    if (it->length(0) == 0) continue;
    const auto b = static_cast<std::size_t>(it->position(0));
    const auto e = b + static_cast<std::size_t>(it->length(0));
    out.push_back({pattern.name, map.cp_offset(b), map.cp_offset(e)});
  }
  return out;
}

std::vector<DetectorFinding> Detector::Detect(std::string_view text) const {
  std::vector<PlaceholderToken> placeholders = ScanPlaceholders(text);
  std::erase_if(placeholders,
                [](const PlaceholderToken& t) { return !t.well_formed; });
  std::vector<DetectorFinding> out;
  for (const auto& p : patterns_) {
    for (auto& f : MatchPattern(p, text)) {
      const bool inside = std::any_of(
          placeholders.begin(), placeholders.end(),
          [&](const PlaceholderToken& t) {
            return f.start < t.end && t.start < f.end;
          });
      if (!inside) out.push_back(std::move(f));
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.start != b.start) return a.start < b.start;
    if (a.end != b.end) return a.end < b.end;
    return a.pattern < b.pattern;
  });
  return out;
}

std::string NormalizeText(std::string_view text) {
  return text::Normalize(text);
}

ShingleProfile ShingleVocabulary::Profile(std::string_view raw_text,
                                          std::size_t shingle_size) {
  ShingleProfile p;
  p.normalized = NormalizeText(raw_text);
  p.hash = text::Fnv1a64(p.normalized);
  const std::u32string cps = text::Decode(p.normalized);
  if (cps.size() < shingle_size) {
    p.short_text = true;
    return p;
  }
  std::unordered_map<std::uint32_t, std::uint32_t> tf;
  for (std::size_t i = 0; i + shingle_size <= cps.size(); ++i) {
    std::u32string key = cps.substr(i, shingle_size);
    auto [it, inserted] =
        ids_.try_emplace(std::move(key), static_cast<std::uint32_t>(ids_.size()));
    ++tf[it->second];
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries(tf.begin(),
                                                              tf.end());
  std::sort(entries.begin(), entries.end());
  p.ids.reserve(entries.size());
  p.counts.reserve(entries.size());
  std::uint64_t norm = 0;
  for (auto [id, count] : entries) {
    p.ids.push_back(id);
    p.counts.push_back(count);
    norm += static_cast<std::uint64_t>(count) * count;
  }
  p.norm_sq = static_cast<double>(norm);
  return p;
}

namespace {

kernels::SparseView View(const ShingleProfile& p) {
  return {p.ids, p.counts};
}

}  // namespace

double ProfileSimilarity(const ShingleProfile& a, const ShingleProfile& b) {
  if (a.short_text || b.short_text) {
    return a.normalized == b.normalized ? 1.0 : 0.0;
  }
  const double dot = static_cast<double>(kernels::SparseDot(View(a), View(b)));
  return kernels::CosineFromDot(dot, a.norm_sq, b.norm_sq);
}

double Similarity(std::string_view a, std::string_view b,
                  const ScreeningConfig& cfg) {
  cfg.Validate();
  ShingleVocabulary vocab;
  const ShingleProfile pa = vocab.Profile(a, cfg.shingle_size);
  const ShingleProfile pb = vocab.Profile(b, cfg.shingle_size);
  return ProfileSimilarity(pa, pb);
}

std::string_view DropReasonName(DropReason reason) {
  switch (reason) {
    case DropReason::kExactDup: return "exact_dup";
    case DropReason::kNearDup: return "near_dup";
    case DropReason::kSeedDup: return "seed_dup";
  }
  return "?";
}

namespace {

// Inverted index over a growing set of profiles.
//
// Candidate generation is exact. Order the query's features by descending
// document frequency and take the longest prefix F whose squared mass stays
// strictly below t^2 * |q|^2. For any document d sharing no feature outside
// F, Cauchy-Schwarz gives q.d <= |q_F| |d| < t |q| |d|, so d cannot reach
// the threshold. Only postings of the remaining (rare) features are walked;
// candidates are then scored exactly with the SIMD kernels.
class NearIndex {
 public:
  NearIndex(const std::vector<std::uint32_t>& df, double threshold)
      : df_(df), threshold_(threshold), postings_(df.size()) {}

  void Add(const ShingleProfile* p) {
    const auto doc = static_cast<std::uint32_t>(docs_.size());
    docs_.push_back(p);
    norms_.push_back(p->norm_sq);
    for (std::uint32_t f : p->ids) postings_[f].push_back(doc);
  }

  void AddHash(std::uint64_t hash, std::uint32_t doc) {
    by_hash_[hash].push_back(doc);
  }

  std::optional<std::uint32_t> ExactMatch(const ShingleProfile& q,
                                          const std::vector<const ShingleProfile*>& all) const {
    auto it = by_hash_.find(q.hash);
    if (it == by_hash_.end()) return std::nullopt;
    for (std::uint32_t doc : it->second) {
      if (all[doc]->normalized == q.normalized) return doc;
    }
    return std::nullopt;
  }

  // Best-scoring indexed document among those that can reach the threshold.
  kernels::BestMatch Best(const ShingleProfile& q,
                          std::vector<std::uint32_t>& doc_of) {
    kernels::BestMatch none;
    doc_of.clear();
    if (q.short_text || docs_.empty()) return none;

    order_.resize(q.ids.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      const std::uint32_t da = df_[q.ids[a]];
      const std::uint32_t db = df_[q.ids[b]];
      if (da != db) return da > db;
      return q.ids[a] < q.ids[b];
    });
    const double budget = threshold_ * threshold_ * q.norm_sq * (1.0 - 1e-9);
    double mass = 0.0;
    std::size_t k = 0;
    for (; k < order_.size(); ++k) {
      const double c = q.counts[order_[k]];
      if (mass + c * c >= budget) break;
      mass += c * c;
    }

    if (seen_.size() < docs_.size()) seen_.resize(docs_.size(), 0);
    ++epoch_;
    if (epoch_ == 0) {
      std::fill(seen_.begin(), seen_.end(), 0);
      epoch_ = 1;
    }
    for (; k < order_.size(); ++k) {
      for (std::uint32_t doc : postings_[q.ids[order_[k]]]) {
        if (seen_[doc] != epoch_) {
          seen_[doc] = epoch_;
          doc_of.push_back(doc);
        }
      }
    }
    if (doc_of.empty()) return none;
    std::sort(doc_of.begin(), doc_of.end());
    dots_.resize(doc_of.size());
    cand_norms_.resize(doc_of.size());
    for (std::size_t c = 0; c < doc_of.size(); ++c) {
      const ShingleProfile* d = docs_[doc_of[c]];
      dots_[c] = static_cast<double>(
          kernels::SparseDot(View(q), View(*d)));
      cand_norms_[c] = norms_[doc_of[c]];
    }
    return kernels::BestCosine(dots_, cand_norms_, q.norm_sq);
  }

  std::size_t size() const { return docs_.size(); }

 private:
  const std::vector<std::uint32_t>& df_;
  double threshold_;
  std::vector<std::vector<std::uint32_t>> postings_;
  std::vector<const ShingleProfile*> docs_;
  std::vector<double> norms_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> by_hash_;
  std::vector<std::size_t> order_;
  std::vector<std::uint32_t> seen_;
  std::uint32_t epoch_ = 0;
  std::vector<double> dots_;
  std::vector<double> cand_norms_;
};

}  // namespace

DedupResult Dedup(const Corpus& pool, const Corpus& seeds,
                  const ScreeningConfig& cfg) {
  cfg.Validate();
  ShingleVocabulary vocab;
  std::vector<ShingleProfile> seed_profiles;
  seed_profiles.reserve(seeds.notes.size());
  for (const Note& n : seeds.notes) {
    seed_profiles.push_back(vocab.Profile(n.sentence, cfg.shingle_size));
  }
  std::vector<ShingleProfile> pool_profiles;
  pool_profiles.reserve(pool.notes.size());
  for (const Note& n : pool.notes) {
    pool_profiles.push_back(vocab.Profile(n.sentence, cfg.shingle_size));
  }

  std::vector<std::uint32_t> df(vocab.size(), 0);
  for (const auto* group : {&seed_profiles, &pool_profiles}) {
    for (const ShingleProfile& p : *group) {
      for (std::uint32_t f : p.ids) ++df[f];
    }
  }

  NearIndex seed_index(df, cfg.near_dup_threshold);
  std::vector<const ShingleProfile*> seed_docs;
  for (std::size_t i = 0; i < seed_profiles.size(); ++i) {
    seed_docs.push_back(&seed_profiles[i]);
    seed_index.AddHash(seed_profiles[i].hash, static_cast<std::uint32_t>(i));
    if (!seed_profiles[i].short_text) seed_index.Add(&seed_profiles[i]);
  }
  // Short seeds are never added to the postings, so seed_index doc numbers
  // only line up with seed_docs when every seed is long. Keep a separate map.
  std::vector<std::uint32_t> seed_doc_ids;
  for (std::size_t i = 0; i < seed_profiles.size(); ++i) {
    if (!seed_profiles[i].short_text) {
      seed_doc_ids.push_back(static_cast<std::uint32_t>(i));
    }
  }

  NearIndex retained_index(df, cfg.near_dup_threshold);
  std::vector<const ShingleProfile*> retained_docs;
  std::vector<std::size_t> retained_note;  // retained slot -> pool index
  std::vector<std::uint32_t> retained_long;  // index doc -> retained slot

  DedupResult result;
  result.retained.subset_name = pool.subset_name;
  std::vector<std::uint32_t> cand;

  for (std::size_t k = 0; k < pool.notes.size(); ++k) {
    const Note& note = pool.notes[k];
    const ShingleProfile& p = pool_profiles[k];

    if (auto hit = retained_index.ExactMatch(p, retained_docs)) {
      result.report.dropped.push_back({note.id, DropReason::kExactDup,
                                       pool.notes[retained_note[*hit]].id,
                                       1.0});
      continue;
    }
    kernels::BestMatch near = retained_index.Best(p, cand);
    if (near.index != kernels::BestMatch::kNone &&
        near.cosine >= cfg.near_dup_threshold) {
      const std::uint32_t slot = retained_long[cand[near.index]];
      result.report.dropped.push_back({note.id, DropReason::kNearDup,
                                       pool.notes[retained_note[slot]].id,
                                       near.cosine});
      continue;
    }
    if (auto hit = seed_index.ExactMatch(p, seed_docs)) {
      result.report.dropped.push_back(
          {note.id, DropReason::kSeedDup, seeds.notes[*hit].id, 1.0});
      continue;
    }
    kernels::BestMatch seed_near = seed_index.Best(p, cand);
    if (seed_near.index != kernels::BestMatch::kNone &&
        seed_near.cosine >= cfg.near_dup_threshold) {
      const std::uint32_t s = seed_doc_ids[cand[seed_near.index]];
      result.report.dropped.push_back(
          {note.id, DropReason::kSeedDup, seeds.notes[s].id, seed_near.cosine});
      continue;
    }

    const auto slot = static_cast<std::uint32_t>(retained_docs.size());
    retained_docs.push_back(&p);
    retained_note.push_back(k);
    retained_index.AddHash(p.hash, slot);
    if (!p.short_text) {
      retained_index.Add(&p);
      retained_long.push_back(slot);
    }
    result.report.retained.push_back(note.id);
    result.retained.notes.push_back(note);
  }
  return result;
}

std::string DedupReportToJsonl(const DedupReport& report,
                               const std::vector<std::string>& input_order) {
  std::unordered_map<std::string, const DroppedNote*> dropped;
  for (const auto& d : report.dropped) dropped.emplace(d.id, &d);
  std::string out;
  for (const std::string& id : input_order) {
    nlohmann::ordered_json j;
    j["id"] = id;
    if (auto it = dropped.find(id); it != dropped.end()) {
      j["status"] = DropReasonName(it->second->reason);
      j["of"] = it->second->of_id;
      j["similarity"] = it->second->similarity;
    } else {
      j["status"] = "retained";
    }
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace vetdeid
