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

#include "refinery/arena/pair_service.h"

#include <algorithm>
#include <chrono>

#include "fmt/format.h"
#include "refinery/common/status_macros.h"
#include "refinery/common/strings.h"

namespace refinery::arena {

absl::StatusOr<Choice> ParseChoice(std::string_view name) {
  if (name == "left") return Choice::kLeft;
  if (name == "right") return Choice::kRight;
  if (name == "same") return Choice::kSame;
  return absl::InvalidArgumentError(StrCat("unknown choice: ", name));
}

nlohmann::json ToJson(const BlindedPair& p) {
  return {{"pair_id", p.pair_id},
          {"description", p.description},
          {"render_a_ref", p.render_a_ref},
          {"render_b_ref", p.render_b_ref}};
}

nlohmann::json ToJson(const Leaderboard& board) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : board.rows) {
    rows.push_back({{"model_id", r.model_id},
                    {"rating", r.rating},
                    {"matches", r.matches},
                    {"compile_rate", r.compile_rate},
                    {"mean_relevance", r.mean_relevance}});
  }
  return {{"k_factor", board.k_factor}, {"rows", rows}};
}

PairService::PairService(Options options)
    : options_(std::move(options)),
      rng_(options_.seed),
      elo_(options_.k_factor, options_.initial_rating) {
  if (!options_.clock) options_.clock = [] { return std::chrono::system_clock::now(); };
}

absl::StatusOr<std::unique_ptr<PairService>> PairService::Create(
    std::span<const EvalEntry> entries, std::span<const MatchRecord> prior, Options options) {
  if (!(options.k_factor > 0.0)) return absl::InvalidArgumentError("k_factor must be > 0");
  std::unique_ptr<PairService> svc(new PairService(std::move(options)));

  std::map<std::string, std::vector<EvalEntry>> by_model;
  for (const auto& e : entries) {
    if (e.outcome.success != e.render_ref.has_value()) {
      return absl::InvalidArgumentError(
          StrCat("eval entry ", e.model_id, "/", e.description_id,
                 ": render must be present exactly when the program compiles"));
    }
    if (!svc->by_desc_[e.description_id].emplace(e.model_id, e).second) {
      return absl::InvalidArgumentError(
          StrCat("duplicate eval entry for ", e.model_id, "/", e.description_id));
    }
    svc->elo_.AddModel(e.model_id);
    by_model[e.model_id].push_back(e);
    if (e.render_ref) svc->render_keys_.insert(e.render_ref->key);
  }
  for (const auto& [model, list] : by_model) {
    RF_ASSIGN_OR_RETURN(double rate, CompileRate(list));
    RF_ASSIGN_OR_RETURN(double rel, MeanRelevance(list));
    svc->model_metrics_[model] = {rate, rel};
  }
  for (const auto& [desc, models] : svc->by_desc_) {
    std::vector<Combo> combos;
    for (auto i = models.begin(); i != models.end(); ++i) {
      if (!i->second.outcome.success) continue;
      for (auto j = std::next(i); j != models.end(); ++j) {
        if (j->second.outcome.success) combos.emplace_back(desc, i->first, j->first);
      }
    }
    if (!combos.empty()) svc->judgeable_[desc] = std::move(combos);
  }
  for (const auto& m : prior) {
    RF_RETURN_IF_ERROR(svc->elo_.Apply(m));
    svc->matches_.push_back(m);
    if (m.source == MatchSource::kHuman && m.rater_id) {
      svc->served_[*m.rater_id].insert(Combo(m.description_id, std::min(m.model_a, m.model_b),
                                             std::max(m.model_a, m.model_b)));
    }
  }
  return svc;
}

absl::StatusOr<BlindedPair> PairService::NextPair(const std::string& rater_id) {
  if (rater_id.empty()) return absl::InvalidArgumentError("rater id is empty");
  std::lock_guard<std::mutex> lock(mu_);
  const std::set<Combo>& seen = served_[rater_id];

  std::vector<std::pair<const std::string*, std::vector<const Combo*>>> open;
  for (const auto& [desc, combos] : judgeable_) {
    std::vector<const Combo*> left;
    for (const auto& c : combos) {
      if (!seen.contains(c)) left.push_back(&c);
    }
    if (!left.empty()) open.emplace_back(&desc, std::move(left));
  }
  if (open.empty()) {
    return absl::ResourceExhaustedError(StrCat("no comparisons left for rater ", rater_id));
  }

  const auto& [desc, combos] =
      open[std::uniform_int_distribution<size_t>(0, open.size() - 1)(rng_)];
  const Combo combo = *combos[std::uniform_int_distribution<size_t>(0, combos.size() - 1)(rng_)];
  const bool swap = std::bernoulli_distribution(0.5)(rng_);
  const std::string& left = swap ? std::get<2>(combo) : std::get<1>(combo);
  const std::string& right = swap ? std::get<1>(combo) : std::get<2>(combo);

  std::string pair_id;
  do {
    pair_id = fmt::format("{:016x}{:016x}", rng_(), rng_());
  } while (issued_.contains(pair_id));

  const auto& models = by_desc_.at(*desc);
  BlindedPair out{pair_id, models.at(left).description, models.at(left).render_ref->key,
                  models.at(right).render_ref->key};
  issued_[pair_id] = Issued{rater_id, combo, left, right, false};
  served_[rater_id].insert(combo);
  return out;
}

absl::StatusOr<Leaderboard> PairService::SubmitPreference(const std::string& pair_id,
                                                          Choice choice,
                                                          const std::string& rater_id) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = issued_.find(pair_id);
  if (it == issued_.end() || it->second.rater_id != rater_id) {
    return absl::NotFoundError(StrCat("no outstanding pair ", pair_id, " for rater ", rater_id));
  }
  Issued& issue = it->second;
  if (issue.submitted) {
    return absl::AlreadyExistsError(StrCat("pair ", pair_id, " already judged"));
  }
  MatchRecord m;
  m.match_id = StrCat("human:", pair_id);
  m.description_id = std::get<0>(issue.combo);
  m.model_a = std::get<1>(issue.combo);
  m.model_b = std::get<2>(issue.combo);
  m.source = MatchSource::kHuman;
  m.rater_id = rater_id;
  m.timestamp_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       options_.clock().time_since_epoch())
                       .count();
  if (choice == Choice::kSame) {
    m.outcome = Outcome::kTie;
  } else {
    const std::string& winner = choice == Choice::kLeft ? issue.left_model : issue.right_model;
    m.outcome = winner == m.model_a ? Outcome::kAWins : Outcome::kBWins;
  }
  RF_RETURN_IF_ERROR(elo_.Apply(m));
  issue.submitted = true;
  matches_.push_back(m);
  if (options_.on_match) options_.on_match(m);
  return LeaderboardLocked();
}

Leaderboard PairService::GetLeaderboard() const {
  std::lock_guard<std::mutex> lock(mu_);
  return LeaderboardLocked();
}

Leaderboard PairService::LeaderboardLocked() const {
  Leaderboard board;
  board.k_factor = elo_.k_factor();
  for (const auto& [model, rating] : elo_.ratings()) {
    LeaderboardRow row{model, rating, elo_.matches(model), 0.0, 0.0};
    if (auto it = model_metrics_.find(model); it != model_metrics_.end()) {
      row.compile_rate = it->second.first;
      row.mean_relevance = it->second.second;
    }
    board.rows.push_back(std::move(row));
  }
  std::sort(board.rows.begin(), board.rows.end(), [](const auto& a, const auto& b) {
    return a.rating != b.rating ? a.rating > b.rating : a.model_id < b.model_id;
  });
  return board;
}

std::vector<MatchRecord> PairService::matches() const {
  std::lock_guard<std::mutex> lock(mu_);
  return matches_;
}

bool PairService::IsServableRender(const std::string& key) const {
  return render_keys_.contains(key);
}

}  // namespace refinery::arena
