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

#ifndef REFINERY_REFINE_FILTERS_H_
#define REFINERY_REFINE_FILTERS_H_

#include <span>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "refinery/refine/candidate.h"
#include "refinery/refine/dbscan.h"

namespace refinery::refine {

enum class DedupMode { kWholeBatch, kPerDescription };

std::string_view DedupModeName(DedupMode mode);
absl::StatusOr<DedupMode> ParseDedupMode(std::string_view name);

struct FilterConfig {
  double min_text_sim = 0.35;
  double min_visual_sim = 0.75;
  double keep_top_percentile = 0.5;  // percent of min-passing candidates kept
  double dbscan_eps = 0.25;
  int dbscan_min_pts = 2;
  DedupMode dedup_mode = DedupMode::kWholeBatch;

  absl::Status Validate() const;
};

nlohmann::json ToJson(const FilterConfig& cfg);

// Keeps candidates whose program compiled; warnings do not matter. Order is
// preserved.
std::vector<Candidate> CompilationFilter(std::span<const Candidate> candidates);

struct ScoreFilterResult {
  std::vector<Candidate> kept;  // best first: combined desc, candidate_id asc
  int passed_min = 0;
};

// Drops candidates under either similarity minimum, then keeps the
// ceil(keep_top_percentile / 100 * survivors) best by combined score.
absl::StatusOr<ScoreFilterResult> ScoreFilter(std::span<const Candidate> candidates,
                                              const FilterConfig& cfg);

// Number of candidates a percentile cut keeps out of `survivors`.
int PercentileKeepCount(double keep_top_percentile, int survivors);

// Clusters render embeddings and labels each candidate.
absl::StatusOr<std::vector<ClusterLabel>> ClusterCandidates(
    std::span<const Candidate> candidates, const FilterConfig& cfg);

// Keeps the best-scoring candidate of each cluster (ties to the smaller
// candidate_id) plus every noise candidate. Output is sorted by candidate_id.
absl::StatusOr<std::vector<Candidate>> Dedup(std::span<const Candidate> candidates,
                                             const FilterConfig& cfg);

}  // namespace refinery::refine

#endif  // REFINERY_REFINE_FILTERS_H_
