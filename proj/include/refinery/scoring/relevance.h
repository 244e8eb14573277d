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

#ifndef REFINERY_SCORING_RELEVANCE_H_
#define REFINERY_SCORING_RELEVANCE_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "refinery/adapters/types.h"

namespace refinery::scoring {

inline constexpr double kDefaultMinTextSim = 0.35;
inline constexpr double kDefaultMinVisualSim = 0.75;

// combined is the unweighted mean of text_sim and visual_sim when a
// ground-truth screenshot exists, text_sim alone otherwise.
struct RelevanceScore {
  double text_sim = 0.0;
  std::optional<double> visual_sim;
  double combined = 0.0;

  friend bool operator==(const RelevanceScore&, const RelevanceScore&) = default;
};

RelevanceScore Combine(double text_sim, std::optional<double> visual_sim);

absl::StatusOr<RelevanceScore> ComputeRelevance(
    const adapters::EmbeddingVector& description,
    const adapters::EmbeddingVector& render,
    const adapters::EmbeddingVector* ground_truth);

struct RelevanceInput {
  const adapters::EmbeddingVector* description = nullptr;
  const adapters::EmbeddingVector* render = nullptr;
  const adapters::EmbeddingVector* ground_truth = nullptr;  // optional
};

// Scores a batch through the row-wise dot kernels. Inputs must be unit-norm
// and share one dimension.
absl::StatusOr<std::vector<RelevanceScore>> ComputeRelevanceBatch(
    std::span<const RelevanceInput> inputs, bool parallel = true);

nlohmann::json ToJson(const RelevanceScore& s);
absl::StatusOr<RelevanceScore> RelevanceFromJson(const nlohmann::json& j);

// 1 - (distinct lines with an error diagnostic) / total_lines. Warnings do
// not count. kInvalidArgument when total_lines is 0.
absl::StatusOr<double> ErrorFreeFraction(const adapters::CompileOutcome& outcome);

}  // namespace refinery::scoring

#endif  // REFINERY_SCORING_RELEVANCE_H_
