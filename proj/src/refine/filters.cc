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

#include "refinery/refine/filters.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "refinery/common/status_macros.h"
#include "refinery/common/strings.h"

namespace refinery::refine {
namespace {

bool BetterScore(const Candidate& a, const Candidate& b) {
  if (a.score->combined != b.score->combined) return a.score->combined > b.score->combined;
  return a.candidate_id < b.candidate_id;
}

absl::StatusOr<std::vector<Candidate>> DedupGroup(std::vector<Candidate> group,
                                                  const FilterConfig& cfg) {
  RF_ASSIGN_OR_RETURN(std::vector<ClusterLabel> labels, ClusterCandidates(group, cfg));
  std::map<int, std::size_t> best;  // cluster -> index of current best
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < group.size(); ++i) {
    const int label = labels[i].label;
    if (label == kNoise) {
      out.push_back(group[i]);
      continue;
    }
    auto [it, inserted] = best.try_emplace(label, i);
    if (!inserted && BetterScore(group[i], group[it->second])) it->second = i;
  }
  for (const auto& [label, idx] : best) out.push_back(std::move(group[idx]));
  return out;
}

}  // namespace

std::string_view DedupModeName(DedupMode mode) {
  return mode == DedupMode::kWholeBatch ? "whole_batch" : "per_description";
}

absl::StatusOr<DedupMode> ParseDedupMode(std::string_view name) {
  if (name == "whole_batch") return DedupMode::kWholeBatch;
  if (name == "per_description") return DedupMode::kPerDescription;
  return absl::InvalidArgumentError(StrCat("unknown dedup mode: ", name));
}

absl::Status FilterConfig::Validate() const {
  if (!(keep_top_percentile > 0.0 && keep_top_percentile <= 100.0)) {
    return absl::InvalidArgumentError("keep_top_percentile must lie in (0, 100]");
  }
  if (!(dbscan_eps > 0.0)) return absl::InvalidArgumentError("dbscan_eps must be positive");
  if (dbscan_min_pts < 1) return absl::InvalidArgumentError("dbscan_min_pts must be >= 1");
  if (!std::isfinite(min_text_sim) || !std::isfinite(min_visual_sim)) {
    return absl::InvalidArgumentError("similarity minimums must be finite");
  }
  return absl::OkStatus();
}

nlohmann::json ToJson(const FilterConfig& cfg) {
  return {{"min_text_sim", cfg.min_text_sim},
          {"min_visual_sim", cfg.min_visual_sim},
          {"percentile_thresh", cfg.keep_top_percentile},
          {"dbscan_eps", cfg.dbscan_eps},
          {"dbscan_min_pts", cfg.dbscan_min_pts},
          {"dedup_mode", std::string(DedupModeName(cfg.dedup_mode))}};
}

std::vector<Candidate> CompilationFilter(std::span<const Candidate> candidates) {
  std::vector<Candidate> out;
  std::copy_if(candidates.begin(), candidates.end(), std::back_inserter(out),
               [](const Candidate& c) { return c.compiles(); });
  return out;
}

int PercentileKeepCount(double keep_top_percentile, int survivors) {
  if (survivors <= 0) return 0;
  // p * n / 100 keeps whole-number products exact (10% of 30 is 3, not
  // 3.0000000000000004); the epsilon absorbs what rounding remains.
  const double exact = keep_top_percentile * static_cast<double>(survivors) / 100.0;
  const int k = static_cast<int>(std::ceil(exact - 1e-9));
  return std::clamp(k, 1, survivors);
}

absl::StatusOr<ScoreFilterResult> ScoreFilter(std::span<const Candidate> candidates,
                                              const FilterConfig& cfg) {
  RF_RETURN_IF_ERROR(cfg.Validate());
  ScoreFilterResult result;
  std::vector<Candidate> passing;
  for (const auto& c : candidates) {
    if (!c.score) {
      return absl::InvalidArgumentError(StrCat("candidate ", c.candidate_id, " is unscored"));
    }
    if (c.score->text_sim < cfg.min_text_sim) continue;
    if (c.score->visual_sim && *c.score->visual_sim < cfg.min_visual_sim) continue;
    passing.push_back(c);
  }
  result.passed_min = static_cast<int>(passing.size());
  std::sort(passing.begin(), passing.end(), BetterScore);
  passing.resize(static_cast<std::size_t>(
      PercentileKeepCount(cfg.keep_top_percentile, result.passed_min)));
  result.kept = std::move(passing);
  return result;
}

absl::StatusOr<std::vector<ClusterLabel>> ClusterCandidates(
    std::span<const Candidate> candidates, const FilterConfig& cfg) {
  std::vector<adapters::EmbeddingVector> vectors;
  vectors.reserve(candidates.size());
  for (const auto& c : candidates) {
    if (!c.render_vec) {
      return absl::InvalidArgumentError(
          StrCat("candidate ", c.candidate_id, " has no render embedding"));
    }
    vectors.push_back(*c.render_vec);
  }
  RF_ASSIGN_OR_RETURN(std::vector<int> labels,
                      Dbscan(vectors, {cfg.dbscan_eps, cfg.dbscan_min_pts, true}));
  std::vector<ClusterLabel> out;
  out.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out.push_back({candidates[i].candidate_id, labels[i]});
  }
  return out;
}

absl::StatusOr<std::vector<Candidate>> Dedup(std::span<const Candidate> candidates,
                                             const FilterConfig& cfg) {
  RF_RETURN_IF_ERROR(cfg.Validate());
  for (const auto& c : candidates) {
    if (!c.score) {
      return absl::InvalidArgumentError(StrCat("candidate ", c.candidate_id, " is unscored"));
    }
  }
  std::vector<Candidate> out;
  if (cfg.dedup_mode == DedupMode::kWholeBatch) {
    RF_ASSIGN_OR_RETURN(out, DedupGroup({candidates.begin(), candidates.end()}, cfg));
  } else {
    std::map<std::string, std::vector<Candidate>> groups;
    for (const auto& c : candidates) groups[c.description_id].push_back(c);
    for (auto& [id, group] : groups) {
      RF_ASSIGN_OR_RETURN(std::vector<Candidate> kept, DedupGroup(std::move(group), cfg));
      std::move(kept.begin(), kept.end(), std::back_inserter(out));
    }
  }
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    return a.candidate_id < b.candidate_id;
  });
  return out;
}

}  // namespace refinery::refine
