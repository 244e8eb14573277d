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

#include "refinery/refine/candidate.h"

#include "refinery/common/status_macros.h"
#include "refinery/common/strings.h"

namespace refinery::refine {

nlohmann::json ToJson(const Candidate& c) {
  nlohmann::json j{{"candidate_id", c.candidate_id},
                   {"description_id", c.description_id},
                   {"description", c.description},
                   {"profile_id", c.profile_id},
                   {"source_ref", store::ToJson(c.source_ref)},
                   {"outcome", adapters::ToJson(c.outcome)},
                   {"iteration", c.iteration},
                   {"repairs_applied", c.repairs_applied}};
  j["render_ref"] = c.render_ref ? store::ToJson(*c.render_ref) : nlohmann::json(nullptr);
  j["render_vec"] = c.render_vec ? adapters::ToJson(*c.render_vec) : nlohmann::json(nullptr);
  j["score"] = c.score ? scoring::ToJson(*c.score) : nlohmann::json(nullptr);
  return j;
}

absl::StatusOr<Candidate> CandidateFromJson(const nlohmann::json& j) {
  Candidate c;
  try {
    c.candidate_id = j.at("candidate_id").get<std::string>();
    c.description_id = j.at("description_id").get<std::string>();
    c.description = j.at("description").get<std::string>();
    c.profile_id = j.value("profile_id", "");
    c.iteration = j.value("iteration", 0);
    c.repairs_applied = j.value("repairs_applied", 0);
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(StrCat("malformed candidate: ", e.what()));
  }
  RF_ASSIGN_OR_RETURN(c.source_ref, store::BlobRefFromJson(j.at("source_ref")));
  RF_ASSIGN_OR_RETURN(c.outcome, adapters::CompileOutcomeFromJson(j.at("outcome")));
  if (j.contains("render_ref") && !j.at("render_ref").is_null()) {
    RF_ASSIGN_OR_RETURN(c.render_ref, store::BlobRefFromJson(j.at("render_ref")));
  }
  if (j.contains("render_vec") && !j.at("render_vec").is_null()) {
    RF_ASSIGN_OR_RETURN(c.render_vec, adapters::EmbeddingFromJson(j.at("render_vec")));
  }
  if (j.contains("score") && !j.at("score").is_null()) {
    RF_ASSIGN_OR_RETURN(c.score, scoring::RelevanceFromJson(j.at("score")));
  }
  return c;
}

}  // namespace refinery::refine
