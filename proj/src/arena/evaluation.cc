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

#include "refinery/arena/evaluation.h"

#include <map>

#include "refinery/common/status_macros.h"
#include "refinery/common/strings.h"

namespace refinery::arena {

nlohmann::json ToJson(const EvalEntry& e) {
  nlohmann::json j = {{"model_id", e.model_id},
                      {"description_id", e.description_id},
                      {"description", e.description},
                      {"source_ref", store::ToJson(e.source_ref)},
                      {"outcome", adapters::ToJson(e.outcome)},
                      {"render_ref", nullptr},
                      {"combined_score", nullptr}};
  if (e.render_ref) j["render_ref"] = store::ToJson(*e.render_ref);
  if (e.combined_score) j["combined_score"] = *e.combined_score;
  return j;
}

absl::StatusOr<EvalEntry> EvalEntryFromJson(const nlohmann::json& j) {
  EvalEntry e;
  try {
    e.model_id = j.at("model_id").get<std::string>();
    e.description_id = j.at("description_id").get<std::string>();
    e.description = j.value("description", "");
    RF_ASSIGN_OR_RETURN(e.source_ref, store::BlobRefFromJson(j.at("source_ref")));
    RF_ASSIGN_OR_RETURN(e.outcome, adapters::CompileOutcomeFromJson(j.at("outcome")));
    if (j.contains("render_ref") && !j.at("render_ref").is_null()) {
      RF_ASSIGN_OR_RETURN(e.render_ref, store::BlobRefFromJson(j.at("render_ref")));
    }
    if (j.contains("combined_score") && !j.at("combined_score").is_null()) {
      e.combined_score = j.at("combined_score").get<double>();
    }
  } catch (const nlohmann::json::exception& ex) {
    return absl::InvalidArgumentError(StrCat("malformed eval entry: ", ex.what()));
  }
  if (e.outcome.success != e.render_ref.has_value()) {
    return absl::InvalidArgumentError(
        StrCat("eval entry ", e.model_id, "/", e.description_id,
               ": render must be present exactly when the program compiles"));
  }
  return e;
}

absl::StatusOr<double> CompileRate(std::span<const EvalEntry> entries) {
  if (entries.empty()) return absl::InvalidArgumentError("compile rate of no entries");
  int ok = 0;
  for (const auto& e : entries) ok += e.outcome.success ? 1 : 0;
  return static_cast<double>(ok) / entries.size();
}

absl::StatusOr<double> MeanRelevance(std::span<const EvalEntry> entries) {
  if (entries.empty()) return absl::InvalidArgumentError("mean relevance of no entries");
  double sum = 0.0;
  for (const auto& e : entries) {
    if (e.outcome.success && e.combined_score) sum += *e.combined_score;
  }
  return sum / entries.size();
}

absl::StatusOr<std::optional<MatchRecord>> AutoOutcome(const EvalEntry& a,
                                                       const EvalEntry& b) {
  if (a.description_id != b.description_id) {
    return absl::InvalidArgumentError(StrCat("auto outcome across descriptions ",
                                             a.description_id, " and ", b.description_id));
  }
  if (a.model_id == b.model_id) {
    return absl::InvalidArgumentError(StrCat("auto outcome of ", a.model_id, " against itself"));
  }
  const bool ca = a.outcome.success;
  const bool cb = b.outcome.success;
  if (ca && cb) return std::optional<MatchRecord>();
  MatchRecord m;
  m.match_id = StrCat("auto:", a.description_id, ":", a.model_id, ":", b.model_id);
  m.description_id = a.description_id;
  m.model_a = a.model_id;
  m.model_b = b.model_id;
  m.source = MatchSource::kAutoCompile;
  m.outcome = ca ? Outcome::kAWins : cb ? Outcome::kBWins : Outcome::kTie;
  return std::optional<MatchRecord>(std::move(m));
}

absl::StatusOr<std::vector<MatchRecord>> SeedAutoMatches(std::span<const EvalEntry> entries) {
  std::map<std::string, std::map<std::string, const EvalEntry*>> by_desc;
  for (const auto& e : entries) {
    if (!by_desc[e.description_id].emplace(e.model_id, &e).second) {
      return absl::InvalidArgumentError(
          StrCat("duplicate eval entry for ", e.model_id, "/", e.description_id));
    }
  }
  std::vector<MatchRecord> out;
  for (const auto& [desc, models] : by_desc) {
    for (auto i = models.begin(); i != models.end(); ++i) {
      for (auto j = std::next(i); j != models.end(); ++j) {
        RF_ASSIGN_OR_RETURN(auto m, AutoOutcome(*i->second, *j->second));
        if (m) out.push_back(std::move(*m));
      }
    }
  }
  return out;
}

}  // namespace refinery::arena
