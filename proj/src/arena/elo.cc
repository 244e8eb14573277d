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

#include "refinery/arena/elo.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "refinery/common/status_macros.h"
#include "refinery/common/strings.h"

namespace refinery::arena {

double ExpectedScore(double r_a, double r_b) {
  return 1.0 / (1.0 + std::pow(10.0, (r_b - r_a) / 400.0));
}

std::string_view OutcomeName(Outcome o) {
  switch (o) {
    case Outcome::kAWins: return "a_wins";
    case Outcome::kBWins: return "b_wins";
    case Outcome::kTie: return "tie";
  }
  return "tie";
}

absl::StatusOr<Outcome> ParseOutcome(std::string_view name) {
  for (Outcome o : {Outcome::kAWins, Outcome::kBWins, Outcome::kTie}) {
    if (OutcomeName(o) == name) return o;
  }
  return absl::InvalidArgumentError(StrCat("unknown outcome: ", name));
}

std::string_view MatchSourceName(MatchSource s) {
  return s == MatchSource::kHuman ? "human" : "auto_compile";
}

absl::StatusOr<MatchSource> ParseMatchSource(std::string_view name) {
  if (name == "human") return MatchSource::kHuman;
  if (name == "auto_compile") return MatchSource::kAutoCompile;
  return absl::InvalidArgumentError(StrCat("unknown match source: ", name));
}

nlohmann::json ToJson(const MatchRecord& m) {
  return {{"match_id", m.match_id},
          {"description_id", m.description_id},
          {"model_a", m.model_a},
          {"model_b", m.model_b},
          {"outcome", std::string(OutcomeName(m.outcome))},
          {"source", std::string(MatchSourceName(m.source))},
          {"rater_id", m.rater_id ? nlohmann::json(*m.rater_id) : nlohmann::json(nullptr)},
          {"timestamp_ms", m.timestamp_ms}};
}

absl::StatusOr<MatchRecord> MatchFromJson(const nlohmann::json& j) {
  MatchRecord m;
  try {
    m.match_id = j.at("match_id").get<std::string>();
    m.description_id = j.at("description_id").get<std::string>();
    m.model_a = j.at("model_a").get<std::string>();
    m.model_b = j.at("model_b").get<std::string>();
    if (j.contains("rater_id") && !j.at("rater_id").is_null()) {
      m.rater_id = j.at("rater_id").get<std::string>();
    }
    m.timestamp_ms = j.value("timestamp_ms", std::int64_t{0});
    RF_ASSIGN_OR_RETURN(m.outcome, ParseOutcome(j.at("outcome").get<std::string>()));
    RF_ASSIGN_OR_RETURN(m.source, ParseMatchSource(j.at("source").get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(StrCat("malformed match record: ", e.what()));
  }
  return m;
}

void EloTable::AddModel(const std::string& model_id) {
  ratings_.try_emplace(model_id, initial_rating_);
  matches_.try_emplace(model_id, 0);
}

void EloTable::SetRating(const std::string& model_id, double rating) {
  AddModel(model_id);
  ratings_[model_id] = rating;
}

absl::Status EloTable::Apply(const MatchRecord& match) {
  if (match.model_a == match.model_b) {
    return absl::InvalidArgumentError(
        StrCat("match ", match.match_id, " pits ", match.model_a, " against itself"));
  }
  AddModel(match.model_a);
  AddModel(match.model_b);
  double& r_a = ratings_[match.model_a];
  double& r_b = ratings_[match.model_b];
  const double s_a = match.outcome == Outcome::kAWins   ? 1.0
                     : match.outcome == Outcome::kBWins ? 0.0
                                                        : 0.5;
  const double delta = k_factor_ * (s_a - ExpectedScore(r_a, r_b));
  r_a += delta;
  r_b -= delta;
  ++matches_[match.model_a];
  ++matches_[match.model_b];
  return absl::OkStatus();
}

double EloTable::rating(const std::string& model_id) const {
  const auto it = ratings_.find(model_id);
  return it == ratings_.end() ? initial_rating_ : it->second;
}

int EloTable::matches(const std::string& model_id) const {
  const auto it = matches_.find(model_id);
  return it == matches_.end() ? 0 : it->second;
}

absl::StatusOr<EloTable> EloUpdate(EloTable table, const MatchRecord& match) {
  RF_RETURN_IF_ERROR(table.Apply(match));
  return table;
}

absl::StatusOr<EloTable> Replay(std::span<const MatchRecord> log, double k_factor,
                                double initial_rating) {
  EloTable table(k_factor, initial_rating);
  for (const auto& m : log) RF_RETURN_IF_ERROR(table.Apply(m));
  return table;
}

absl::StatusOr<std::map<std::string, double>> ReplayShuffledAverage(
    std::span<const MatchRecord> log, int rounds, std::uint64_t seed, double k_factor,
    double initial_rating) {
  if (rounds < 1) return absl::InvalidArgumentError("rounds must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<MatchRecord> shuffled(log.begin(), log.end());
  std::map<std::string, double> sum;
  for (int r = 0; r < rounds; ++r) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    RF_ASSIGN_OR_RETURN(EloTable table, Replay(shuffled, k_factor, initial_rating));
    for (const auto& [model, rating] : table.ratings()) sum[model] += rating;
  }
  for (auto& [model, total] : sum) total /= rounds;
  return sum;
}

}  // namespace refinery::arena
