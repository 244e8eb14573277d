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

#ifndef REFINERY_ARENA_ELO_H_
#define REFINERY_ARENA_ELO_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"

namespace refinery::arena {

inline constexpr double kDefaultInitialRating = 1000.0;
inline constexpr double kDefaultKFactor = 32.0;

// Win probability of a player rated `r_a` against one rated `r_b`:
// 1 / (1 + 10^((r_b - r_a) / 400)).
double ExpectedScore(double r_a, double r_b);

enum class Outcome { kAWins, kBWins, kTie };
enum class MatchSource { kHuman, kAutoCompile };

std::string_view OutcomeName(Outcome o);
absl::StatusOr<Outcome> ParseOutcome(std::string_view name);
std::string_view MatchSourceName(MatchSource s);
absl::StatusOr<MatchSource> ParseMatchSource(std::string_view name);

struct MatchRecord {
  std::string match_id;
  std::string description_id;
  std::string model_a;
  std::string model_b;
  Outcome outcome = Outcome::kTie;
  MatchSource source = MatchSource::kHuman;
  std::optional<std::string> rater_id;  // none for automatic matches
  std::int64_t timestamp_ms = 0;

  friend bool operator==(const MatchRecord&, const MatchRecord&) = default;
};

nlohmann::json ToJson(const MatchRecord& m);
absl::StatusOr<MatchRecord> MatchFromJson(const nlohmann::json& j);

class EloTable {
 public:
  explicit EloTable(double k_factor = kDefaultKFactor,
                    double initial_rating = kDefaultInitialRating)
      : k_factor_(k_factor), initial_rating_(initial_rating) {}

  // Registers a model at the initial rating; no-op if already present.
  void AddModel(const std::string& model_id);
  // Registers or overwrites a rating, e.g. when resuming from a snapshot.
  void SetRating(const std::string& model_id, double rating);

  // Sequential update: s_a is 1, 0 or 0.5, and
  //   r_a += K (s_a - E(r_a, r_b)),  r_b -= K (s_a - E(r_a, r_b)),
  // which equals r_b + K((1 - s_a) - E(r_b, r_a)). Unknown models enter at
  // the initial rating. kInvalidArgument when model_a == model_b.
  absl::Status Apply(const MatchRecord& match);

  double rating(const std::string& model_id) const;
  int matches(const std::string& model_id) const;
  bool contains(const std::string& model_id) const { return ratings_.contains(model_id); }
  const std::map<std::string, double>& ratings() const { return ratings_; }
  double k_factor() const { return k_factor_; }
  double initial_rating() const { return initial_rating_; }

 private:
  double k_factor_;
  double initial_rating_;
  std::map<std::string, double> ratings_;
  std::map<std::string, int> matches_;
};

// Pure form of EloTable::Apply.
absl::StatusOr<EloTable> EloUpdate(EloTable table, const MatchRecord& match);

// Applies `log` in order to a fresh table.
absl::StatusOr<EloTable> Replay(std::span<const MatchRecord> log,
                                double k_factor = kDefaultKFactor,
                                double initial_rating = kDefaultInitialRating);

// Mean ratings over `rounds` replays of independently shuffled copies of
// `log`, for an estimate that does not depend on match order.
absl::StatusOr<std::map<std::string, double>> ReplayShuffledAverage(
    std::span<const MatchRecord> log, int rounds, std::uint64_t seed,
    double k_factor = kDefaultKFactor, double initial_rating = kDefaultInitialRating);

}  // namespace refinery::arena

#endif  // REFINERY_ARENA_ELO_H_
