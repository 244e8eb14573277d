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

#ifndef REFINERY_ARENA_EVALUATION_H_
#define REFINERY_ARENA_EVALUATION_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "refinery/adapters/types.h"
#include "refinery/arena/elo.h"
#include "refinery/store/blob_store.h"

namespace refinery::arena {

// One model's output for one evaluation description.
struct EvalEntry {
  std::string model_id;
  std::string description_id;
  std::string description;
  store::BlobRef source_ref;
  adapters::CompileOutcome outcome;
  std::optional<store::BlobRef> render_ref;  // present iff outcome.success
  std::optional<double> combined_score;
};

nlohmann::json ToJson(const EvalEntry& e);
absl::StatusOr<EvalEntry> EvalEntryFromJson(const nlohmann::json& j);

// Fraction of entries that compiled. kInvalidArgument on empty input.
absl::StatusOr<double> CompileRate(std::span<const EvalEntry> entries);

// Mean combined score with non-compiling entries counted as 0.
// kInvalidArgument on empty input.
absl::StatusOr<double> MeanRelevance(std::span<const EvalEntry> entries);

// Automatic verdict for two entries on the same description. nullopt means
// both compiled and a human has to judge. kInvalidArgument when the
// descriptions or the models do not differ as required.
absl::StatusOr<std::optional<MatchRecord>> AutoOutcome(const EvalEntry& a,
                                                       const EvalEntry& b);

// Every automatic match over all (description, unordered model pair)
// combinations, ordered by description_id then model ids.
absl::StatusOr<std::vector<MatchRecord>> SeedAutoMatches(std::span<const EvalEntry> entries);

}  // namespace refinery::arena

#endif  // REFINERY_ARENA_EVALUATION_H_
