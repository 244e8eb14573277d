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

#ifndef REFINERY_ORCHESTRATOR_ITERATION_H_
#define REFINERY_ORCHESTRATOR_ITERATION_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "refinery/orchestrator/config.h"
#include "refinery/store/blob_store.h"

namespace refinery::orchestrator {

struct IterationCounts {
  int sampled = 0;
  int generated = 0;
  int generation_failed = 0;
  int repaired = 0;
  int compiled = 0;
  int rendered = 0;
  int scored = 0;
  int passed_min = 0;
  int passed_percentile = 0;
  int after_dedup = 0;
  int preference_pairs = 0;  // prefs mode only
  int top_records = 0;       // prefs mode only

  // generated >= compiled >= rendered >= scored >= passed_min >=
  // passed_percentile >= after_dedup >= 0.
  bool ChainHolds() const;
};

struct IterationManifest {
  int iteration = 0;
  std::string mode = "sft";
  nlohmann::json config;
  IterationCounts counts;
  std::vector<store::BlobRef> shard_refs;
  std::vector<std::string> shard_paths;  // relative to the iteration dir
  double wall_clock_s = 0.0;
  bool capped = false;  // stopped by wall_clock_cap_s
  std::optional<int> trainer_exit_code;
};

nlohmann::json ToJson(const IterationCounts& c);
nlohmann::json ToJson(const IterationManifest& m);
absl::StatusOr<IterationManifest> ManifestFromJson(const nlohmann::json& j);

// <work_dir>/iter-NNN
std::filesystem::path IterationDir(const std::filesystem::path& work_dir, int iteration);

// Test hook: the process calls _exit after completing this many queue jobs.
struct IterationHooks {
  int exit_after_jobs = -1;
};

// Runs one mining iteration: sample, generate, repair+compile+render through
// the job queue, then score, filter and dedup as one batch and write the
// refined shard and manifest. Safe to rerun after a crash; finished jobs and
// recorded candidates are reused. Dispatches to preference mode when
// cfg.mode is "prefs".
absl::StatusOr<IterationManifest> RunIteration(const RunConfig& cfg, int iteration,
                                               const IterationHooks& hooks = {});

// Preference mode: every sampled description is generated under the whole
// profile pack, ranked, and exported as preference pairs and a top-output
// dataset.
absl::StatusOr<IterationManifest> RunPreferenceIteration(const RunConfig& cfg, int iteration);

}  // namespace refinery::orchestrator

#endif  // REFINERY_ORCHESTRATOR_ITERATION_H_
