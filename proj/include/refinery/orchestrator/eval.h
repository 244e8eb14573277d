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

#ifndef REFINERY_ORCHESTRATOR_EVAL_H_
#define REFINERY_ORCHESTRATOR_EVAL_H_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "refinery/arena/elo.h"
#include "refinery/arena/evaluation.h"
#include "refinery/orchestrator/config.h"
#include "refinery/orchestrator/iteration.h"

namespace refinery::orchestrator {

inline constexpr int kDefaultEvalSetSize = 200;

struct ModelResult {
  std::string model_id;
  std::string params;
  bool complete = true;  // false when the endpoint failed mid-run
  std::string error;
  int entries = 0;
  std::optional<double> compile_rate;
  std::optional<double> mean_relevance;
  double elo = arena::kDefaultInitialRating;
};

struct EvalReport {
  int eval_set_size = 0;
  std::vector<ModelResult> models;
  std::vector<arena::EvalEntry> entries;      // complete models only
  std::vector<arena::MatchRecord> auto_matches;
  std::vector<std::string> warnings;
};

nlohmann::json ToJson(const EvalReport& report);

// Generates and renders one program per (model, description) with each
// model's own profile, scores them, and seeds automatic matches. Writes
// entries.jsonl, matches.jsonl, results.md and summary.json under
// cfg.eval_dir, plus an eval snapshot for cfg.snapshot_iteration if set.
absl::StatusOr<EvalReport> RunEval(const RunConfig& cfg);

// Results table with columns Model | Params | Compile | CLIP | Elo.
std::string FormatResultsTable(const EvalReport& report);

struct EvalSnapshot {
  double compile_rate = 0.0;
  double mean_relevance = 0.0;
};

struct TimeseriesRow {
  int iteration = 0;
  std::optional<double> compile_rate;
  std::optional<double> mean_relevance;
  int mined_count = 0;
};

// One row per manifest, ordered by iteration; iterations without a
// snapshot get empty metrics.
std::vector<TimeseriesRow> ReportTimeseries(std::span<const IterationManifest> manifests,
                                            const std::map<int, EvalSnapshot>& snapshots);

// Tab-separated table with a header; missing values print as "null".
std::string FormatTimeseries(std::span<const TimeseriesRow> rows);

// Reads every iter-*/manifest.json and iter-*/eval_snapshot.json under
// `runs_dir`. kNotFound when there are no manifests.
absl::StatusOr<std::vector<TimeseriesRow>> LoadTimeseries(const std::filesystem::path& runs_dir);

inline constexpr char kEvalSnapshotFile[] = "eval_snapshot.json";

}  // namespace refinery::orchestrator

#endif  // REFINERY_ORCHESTRATOR_EVAL_H_
