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

#ifndef REFINERY_REFINE_CANDIDATE_H_
#define REFINERY_REFINE_CANDIDATE_H_

#include <optional>
#include <string>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "refinery/adapters/types.h"
#include "refinery/scoring/relevance.h"
#include "refinery/store/blob_store.h"

namespace refinery::refine {

// One generated program moving through the filter chain. render, render_vec
// and score are present only for programs that compiled.
struct Candidate {
  std::string candidate_id;
  std::string description_id;
  std::string description;
  std::string profile_id;
  store::BlobRef source_ref;
  adapters::CompileOutcome outcome;
  std::optional<store::BlobRef> render_ref;
  std::optional<adapters::EmbeddingVector> render_vec;
  std::optional<scoring::RelevanceScore> score;
  int iteration = 0;
  int repairs_applied = 0;

  bool compiles() const { return outcome.success; }
};

nlohmann::json ToJson(const Candidate& c);
absl::StatusOr<Candidate> CandidateFromJson(const nlohmann::json& j);

}  // namespace refinery::refine

#endif  // REFINERY_REFINE_CANDIDATE_H_
