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

#ifndef REFINERY_ARENA_PAIR_SERVICE_H_
#define REFINERY_ARENA_PAIR_SERVICE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "refinery/arena/elo.h"
#include "refinery/arena/evaluation.h"
#include "refinery/store/job_queue.h"

namespace refinery::arena {

// Shown to raters above every comparison.
inline constexpr std::string_view kRaterInstructions =
    "Select the UI screenshot that better matches the description. All images and icons "
    "have been replaced with the same placeholder image, and the screens may also contain "
    "some placeholder text. Focus on the overall quality of the structure and layout when "
    "selecting the preferred screen.";

enum class Choice { kLeft, kRight, kSame };

absl::StatusOr<Choice> ParseChoice(std::string_view name);

// What a rater sees. Carries no model identifiers.
struct BlindedPair {
  std::string pair_id;
  std::string description;
  std::string render_a_ref;  // left
  std::string render_b_ref;  // right
};

nlohmann::json ToJson(const BlindedPair& p);

struct LeaderboardRow {
  std::string model_id;
  double rating = 0.0;
  int matches = 0;
  double compile_rate = 0.0;
  double mean_relevance = 0.0;
};

struct Leaderboard {
  double k_factor = kDefaultKFactor;
  std::vector<LeaderboardRow> rows;  // rating desc, model_id asc
};

nlohmann::json ToJson(const Leaderboard& board);

// Blinded pairwise comparison sessions over a fixed set of eval entries.
// Thread-safe; all state changes happen under one lock.
class PairService {
 public:
  struct Options {
    std::uint64_t seed = 0;
    double k_factor = kDefaultKFactor;
    double initial_rating = kDefaultInitialRating;
    store::Clock clock;  // defaults to system time
    std::function<void(const MatchRecord&)> on_match;  // called under the lock
  };

  // `prior` is replayed into the ratings in order; human matches in it also
  // count as already judged by their rater.
  static absl::StatusOr<std::unique_ptr<PairService>> Create(std::span<const EvalEntry> entries,
                                                             std::span<const MatchRecord> prior,
                                                             Options options);

  // kResourceExhausted when the rater has seen every judgeable combination.
  absl::StatusOr<BlindedPair> NextPair(const std::string& rater_id);

  // kNotFound for unknown pairs or pairs issued to another rater;
  // kAlreadyExists for a second submission.
  absl::StatusOr<Leaderboard> SubmitPreference(const std::string& pair_id, Choice choice,
                                               const std::string& rater_id);

  Leaderboard GetLeaderboard() const;
  std::vector<MatchRecord> matches() const;

  // True when `key` is the render of some entry, i.e. safe to hand out.
  bool IsServableRender(const std::string& key) const;

 private:
  // (description_id, model_x, model_y) with model_x < model_y.
  using Combo = std::tuple<std::string, std::string, std::string>;

  struct Issued {
    std::string rater_id;
    Combo combo;
    std::string left_model;
    std::string right_model;
    bool submitted = false;
  };

  PairService(Options options);
  Leaderboard LeaderboardLocked() const;

  Options options_;
  mutable std::mutex mu_;
  std::mt19937_64 rng_;
  EloTable elo_;
  std::vector<MatchRecord> matches_;
  std::map<std::string, std::map<std::string, EvalEntry>> by_desc_;  // desc -> model -> entry
  std::map<std::string, std::vector<Combo>> judgeable_;              // desc -> combos
  std::map<std::string, std::set<Combo>> served_;                    // rater -> combos
  std::map<std::string, Issued> issued_;                             // pair_id -> issue
  std::map<std::string, std::pair<double, double>> model_metrics_;   // compile, relevance
  std::set<std::string> render_keys_;
};

}  // namespace refinery::arena

#endif  // REFINERY_ARENA_PAIR_SERVICE_H_
