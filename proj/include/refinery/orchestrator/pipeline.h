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

#ifndef REFINERY_ORCHESTRATOR_PIPELINE_H_
#define REFINERY_ORCHESTRATOR_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "refinery/orchestrator/config.h"
#include "refinery/prefs/prefs.h"
#include "refinery/refine/candidate.h"
#include "refinery/repair/repair.h"
#include "refinery/store/blob_store.h"

namespace refinery::orchestrator {

// One line of a description source: {description_id, description} plus an
// optional MiniUI `ground_truth` program whose render stands in for the
// reference screenshot.
struct DescriptionRecord {
  std::string description_id;
  std::string description;
  std::string ground_truth;
};

absl::StatusOr<std::vector<DescriptionRecord>> LoadDescriptions(
    const std::filesystem::path& path);

struct Sample {
  std::string candidate_id;
  DescriptionRecord record;
};

// Draws `n` descriptions. Each draw picks a source with probability
// proportional to its weight, then takes the next description from that
// source's current shuffled pass, so no description repeats within a pass.
absl::StatusOr<std::vector<Sample>> SampleDescriptions(
    const std::vector<std::vector<DescriptionRecord>>& sources, std::span<const double> weights,
    int n, std::uint64_t seed, int iteration);

struct RepairSettings {
  bool enabled = true;
  int max_rounds = repair::kDefaultMaxRounds;
  std::vector<repair::RepairRule> rules;
};

absl::StatusOr<RepairSettings> LoadRepairSettings(const RunConfig& cfg, bool enabled);

// Repairs (optionally), compiles and renders one generated program. Source
// and render bytes go to `blobs`. The candidate comes back unscored.
absl::StatusOr<refine::Candidate> BuildCandidate(const prefs::VariantSource& v, int iteration,
                                                 Adapters& adapters,
                                                 const RepairSettings& repair,
                                                 store::BlobStore& blobs);

// Render embeddings of ground-truth programs, keyed by description_id.
// Records without one, or whose program does not render, are absent.
absl::StatusOr<std::map<std::string, adapters::EmbeddingVector>> GroundTruthVectors(
    std::span<const DescriptionRecord> records, Adapters& adapters);

// Scores every rendered candidate in place through the batch kernel.
// Returns how many were scored. Candidates whose scoring prompt embeds to
// nothing are left unscored.
absl::StatusOr<int> ScoreCandidates(
    std::vector<refine::Candidate>& candidates, adapters::Embedder& embedder,
    const scoring::PromptTemplates& templates,
    const std::map<std::string, adapters::EmbeddingVector>& ground_truth);

}  // namespace refinery::orchestrator

#endif  // REFINERY_ORCHESTRATOR_PIPELINE_H_
