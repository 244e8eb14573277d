// Copyright 2026 The Refinery Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "refinery/prefs/prefs.h"

#include <algorithm>
#include <numeric>

#include "refinery/adapters/miniui.h"
#include "refinery/common/status_macros.h"
#include "refinery/common/strings.h"
#include "refinery/scoring/relevance.h"

namespace refinery::prefs {

std::vector<adapters::SamplingProfile> DefaultProfilePack(std::string stop_token,
                                                          int max_tokens) {
  std::vector<adapters::SamplingProfile> pack;
  for (double t : {0.2, 0.5, 0.8, 1.1}) {
    for (double p : {0.85, 0.95}) {
      pack.push_back({fmt::format("t{:.1f}-p{:.2f}", t, p), t, 50, p, stop_token,
                      max_tokens});
    }
  }
  pack.push_back({"greedy", 0.0, 1, 1.0, stop_token, max_tokens});
  pack.push_back({"default", 0.2, 70, 0.85, stop_token, max_tokens});
  return pack;
}

refine::Candidate FailedGenerationCandidate(const VariantSource& v) {
  refine::Candidate c;
  c.candidate_id = v.candidate_id;
  c.description_id = v.description_id;
  c.description = v.description;
  c.profile_id = v.profile_id;
  c.source_ref = store::MakeBlobRef("", store::MediaKind::kProgramSource);
  c.outcome.success = false;
  c.outcome.total_lines = 0;
  c.outcome.diagnostics.push_back({1, std::nullopt, std::string(adapters::miniui::kEmpty),
                                   "generation failed", adapters::Severity::kError});
  return c;
}

absl::StatusOr<std::vector<refine::Candidate>> GenerateVariants(
    std::string_view description_id, std::string_view description,
    std::span<const adapters::SamplingProfile> profiles, adapters::Generator& generator,
    const CandidateFactory& factory, const scoring::PromptTemplates& templates,
    std::string_view id_prefix) {
  if (profiles.size() < 2) {
    return absl::InvalidArgumentError("variant generation needs at least two profiles");
  }
  RF_ASSIGN_OR_RETURN(std::string prompt, templates.GenerationPrompt(description));
  std::vector<refine::Candidate> out;
  int failures = 0;
  std::string last_error;
  for (const auto& profile : profiles) {
    RF_RETURN_IF_ERROR(profile.Validate());
    VariantSource v{StrCat(id_prefix, description_id, ":", profile.profile_id),
                    std::string(description_id), std::string(description),
                    profile.profile_id, ""};
    auto text = generator.Generate(prompt, profile);
    if (!text.ok()) {
      ++failures;
      last_error = std::string(text.status().message());
      out.push_back(FailedGenerationCandidate(v));
      continue;
    }
    v.source = std::move(*text);
    RF_ASSIGN_OR_RETURN(refine::Candidate c, factory(v));
    out.push_back(std::move(c));
  }
  if (failures == static_cast<int>(profiles.size())) {
    return absl::FailedPreconditionError(
        StrCat("all generations failed for ", description_id, ": ", last_error));
  }
  return out;
}

bool RanksBefore(const RankKey& a, const RankKey& b) {
  if (a.compilable != b.compilable) return a.compilable;
  if (a.value != b.value) return a.value > b.value;
  return a.candidate_id < b.candidate_id;
}

absl::StatusOr<RankedSet> RankCandidates(std::span<const refine::Candidate> candidates) {
  RankedSet ranked;
  if (candidates.empty()) return ranked;
  ranked.description_id = candidates.front().description_id;
  std::vector<RankKey> keys;
  keys.reserve(candidates.size());
  for (const auto& c : candidates) {
    RankKey key{c.candidate_id, c.compiles(), 0.0};
    if (c.compiles()) {
      if (!c.score) {
        return absl::InvalidArgumentError(
            StrCat("compilable candidate ", c.candidate_id, " is unscored"));
      }
      key.value = c.score->combined;
    } else if (c.outcome.total_lines > 0) {
      RF_ASSIGN_OR_RETURN(key.value, scoring::ErrorFreeFraction(c.outcome));
    }
    keys.push_back(std::move(key));
  }
  std::sort(keys.begin(), keys.end(), RanksBefore);
  for (const auto& k : keys) ranked.ordered.push_back(k.candidate_id);
  ranked.keys = std::move(keys);
  return ranked;
}

std::string_view PairModeName(PairMode mode) {
  switch (mode) {
    case PairMode::kAdjacent: return "adjacent";
    case PairMode::kTopVsRest: return "top_vs_rest";
    case PairMode::kAllOrdered: return "all_ordered";
  }
  return "adjacent";
}

absl::StatusOr<PairMode> ParsePairMode(std::string_view name) {
  for (PairMode m : {PairMode::kAdjacent, PairMode::kTopVsRest, PairMode::kAllOrdered}) {
    if (PairModeName(m) == name) return m;
  }
  return absl::InvalidArgumentError(StrCat("unknown pair mode: ", name));
}

std::string_view MarginKindName(MarginKind kind) {
  switch (kind) {
    case MarginKind::kCompileDominance: return "compile_dominance";
    case MarginKind::kScoreGap: return "score_gap";
    case MarginKind::kErrorFractionGap: return "error_fraction_gap";
  }
  return "score_gap";
}

std::vector<PreferencePair> ToPreferencePairs(const RankedSet& ranked, PairMode mode) {
  std::vector<PreferencePair> pairs;
  const std::size_t n = ranked.keys.size();
  auto make = [&](std::size_t i, std::size_t j) {
    const RankKey& chosen = ranked.keys[i];
    const RankKey& rejected = ranked.keys[j];
    MarginKind kind = MarginKind::kErrorFractionGap;
    if (chosen.compilable && !rejected.compilable) {
      kind = MarginKind::kCompileDominance;
    } else if (chosen.compilable) {
      kind = MarginKind::kScoreGap;
    }
    pairs.push_back({ranked.description_id, chosen.candidate_id, rejected.candidate_id, kind});
  };
  if (n < 2) return pairs;
  switch (mode) {
    case PairMode::kAdjacent:
      for (std::size_t i = 0; i + 1 < n; ++i) make(i, i + 1);
      break;
    case PairMode::kTopVsRest:
      for (std::size_t j = 1; j < n; ++j) make(0, j);
      break;
    case PairMode::kAllOrdered:
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) make(i, j);
      }
      break;
  }
  return pairs;
}

absl::StatusOr<std::vector<nlohmann::json>> PreferenceRecords(
    std::span<const PreferencePair> pairs,
    const std::map<std::string, refine::Candidate>& by_id) {
  std::vector<nlohmann::json> out;
  for (const auto& p : pairs) {
    const auto chosen = by_id.find(p.chosen);
    const auto rejected = by_id.find(p.rejected);
    if (chosen == by_id.end() || rejected == by_id.end()) {
      return absl::NotFoundError(StrCat("pair references unknown candidate: ", p.chosen,
                                        " / ", p.rejected));
    }
    out.push_back({{"pair_id", StrCat(p.chosen, ">", p.rejected)},
                   {"description_id", p.description_id},
                   {"description", chosen->second.description},
                   {"chosen_source_ref", store::ToJson(chosen->second.source_ref)},
                   {"rejected_source_ref", store::ToJson(rejected->second.source_ref)},
                   {"margin_kind", std::string(MarginKindName(p.margin_kind))}});
  }
  return out;
}

absl::StatusOr<std::vector<nlohmann::json>> ExportTopDataset(
    std::span<const RankedSet> sets, const std::map<std::string, refine::Candidate>& by_id,
    const store::BlobStore& blobs) {
  std::vector<nlohmann::json> out;
  for (const auto& set : sets) {
    if (set.keys.empty()) {
      return absl::InvalidArgumentError(StrCat("ranked set ", set.description_id, " is empty"));
    }
    if (!set.keys.front().compilable) continue;
    const auto it = by_id.find(set.ordered.front());
    if (it == by_id.end()) {
      return absl::NotFoundError(StrCat("unknown candidate ", set.ordered.front()));
    }
    RF_ASSIGN_OR_RETURN(std::string source, blobs.Get(it->second.source_ref.key));
    out.push_back({{"description_id", set.description_id},
                   {"description", it->second.description},
                   {"candidate_id", it->second.candidate_id},
                   {"source_ref", store::ToJson(it->second.source_ref)},
                   {"source", std::move(source)}});
  }
  return out;
}

}  // namespace refinery::prefs
