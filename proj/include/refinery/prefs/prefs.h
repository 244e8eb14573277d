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

#ifndef REFINERY_PREFS_PREFS_H_
#define REFINERY_PREFS_PREFS_H_

#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "refinery/adapters/types.h"
#include "refinery/refine/candidate.h"
#include "refinery/scoring/prompts.h"
#include "refinery/store/blob_store.h"

namespace refinery::prefs {

// Ten sampling configurations: temperature {0.2, 0.5, 0.8, 1.1} x top_p
// {0.85, 0.95} at top_k 50, plus greedy and the trained model's default
// (temperature 0.2, top_k 70, top_p 0.85).
std::vector<adapters::SamplingProfile> DefaultProfilePack(std::string stop_token,
                                                          int max_tokens);

struct VariantSource {
  std::string candidate_id;
  std::string description_id;
  std::string description;
  std::string profile_id;
  std::string source;
};

// Turns generated source into a fully processed candidate (repair, compile,
// render, score). Supplied by the caller so preference generation reuses the
// same path as the filter pipeline.
using CandidateFactory =
    std::function<absl::StatusOr<refine::Candidate>(const VariantSource&)>;

// Samples one program per profile. A profile whose generation fails yields
// an empty-source, non-compiling candidate instead. kFailedPrecondition
// when every generation failed.
absl::StatusOr<std::vector<refine::Candidate>> GenerateVariants(
    std::string_view description_id, std::string_view description,
    std::span<const adapters::SamplingProfile> profiles, adapters::Generator& generator,
    const CandidateFactory& factory,
    const scoring::PromptTemplates& templates = scoring::PromptTemplates::Defaults(),
    std::string_view id_prefix = "");

// Candidate standing in for a failed generation.
refine::Candidate FailedGenerationCandidate(const VariantSource& v);

struct RankKey {
  std::string candidate_id;
  bool compilable = false;
  double value = 0.0;  // combined score if compilable, else error-free fraction
};

struct RankedSet {
  std::string description_id;
  std::vector<std::string> ordered;  // best first
  std::vector<RankKey> keys;         // parallel to `ordered`
};

// Compilable before non-compilable; compilable by combined score, the rest
// by error-free line fraction (zero-line programs count as 0); ties by
// candidate_id.
absl::StatusOr<RankedSet> RankCandidates(std::span<const refine::Candidate> candidates);

// True when `a` ranks strictly before `b`.
bool RanksBefore(const RankKey& a, const RankKey& b);

enum class PairMode { kAdjacent, kTopVsRest, kAllOrdered };
enum class MarginKind { kCompileDominance, kScoreGap, kErrorFractionGap };

std::string_view PairModeName(PairMode mode);
absl::StatusOr<PairMode> ParsePairMode(std::string_view name);
std::string_view MarginKindName(MarginKind kind);

struct PreferencePair {
  std::string description_id;
  std::string chosen;
  std::string rejected;
  MarginKind margin_kind = MarginKind::kScoreGap;

  friend bool operator==(const PreferencePair&, const PreferencePair&) = default;
};

std::vector<PreferencePair> ToPreferencePairs(const RankedSet& ranked, PairMode mode);

// Records {pair_id, description_id, description, chosen_source_ref,
// rejected_source_ref, margin_kind}.
absl::StatusOr<std::vector<nlohmann::json>> PreferenceRecords(
    std::span<const PreferencePair> pairs,
    const std::map<std::string, refine::Candidate>& by_id);

// One record {description_id, description, candidate_id, source_ref, source}
// per set whose best candidate compiles.
absl::StatusOr<std::vector<nlohmann::json>> ExportTopDataset(
    std::span<const RankedSet> sets, const std::map<std::string, refine::Candidate>& by_id,
    const store::BlobStore& blobs);

}  // namespace refinery::prefs

#endif  // REFINERY_PREFS_PREFS_H_
