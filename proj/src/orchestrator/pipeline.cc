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

#include "refinery/orchestrator/pipeline.h"

#include <algorithm>
#include <random>
#include <set>

#include "refinery/common/status_macros.h"
#include "refinery/common/strings.h"
#include "refinery/scoring/relevance.h"
#include "refinery/store/dataset.h"

namespace refinery::orchestrator {

absl::StatusOr<std::vector<DescriptionRecord>> LoadDescriptions(
    const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    return absl::NotFoundError(StrCat("description source not found: ", path.string()));
  }
  RF_ASSIGN_OR_RETURN(auto lines, store::ReadJsonLines(path));
  std::vector<DescriptionRecord> out;
  std::set<std::string> seen;
  for (const auto& j : lines) {
    DescriptionRecord r;
    try {
      r.description_id = j.at("description_id").get<std::string>();
      r.description = j.at("description").get<std::string>();
      r.ground_truth = j.value("ground_truth", "");
    } catch (const nlohmann::json::exception& e) {
      return absl::InvalidArgumentError(
          StrCat("malformed description in ", path.string(), ": ", e.what()));
    }
    if (!seen.insert(r.description_id).second) {
      return absl::InvalidArgumentError(
          StrCat("duplicate description_id ", r.description_id, " in ", path.string()));
    }
    out.push_back(std::move(r));
  }
  return out;
}

absl::StatusOr<std::vector<Sample>> SampleDescriptions(
    const std::vector<std::vector<DescriptionRecord>>& sources, std::span<const double> weights,
    int n, std::uint64_t seed, int iteration) {
  if (n <= 0) return absl::FailedPreconditionError("samples_per_iteration must be positive");
  if (sources.empty() || weights.size() != sources.size()) {
    return absl::FailedPreconditionError("no description sources");
  }
  std::vector<double> w(weights.begin(), weights.end());
  double total = 0.0;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (!(w[i] >= 0.0)) return absl::InvalidArgumentError("source weights must be >= 0");
    if (sources[i].empty()) w[i] = 0.0;
    total += w[i];
  }
  if (total <= 0.0) return absl::FailedPreconditionError("description sources are empty");

  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(iteration)};
  std::mt19937_64 rng(seq);
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  std::vector<std::vector<std::size_t>> order(sources.size());
  std::vector<std::size_t> cursor(sources.size(), 0);

  std::vector<Sample> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    const std::size_t s = sources.size() == 1 ? 0 : pick(rng);
    if (cursor[s] == order[s].size()) {
      order[s].resize(sources[s].size());
      for (std::size_t i = 0; i < order[s].size(); ++i) order[s][i] = i;
      std::shuffle(order[s].begin(), order[s].end(), rng);
      cursor[s] = 0;
    }
    out.push_back({fmt::format("it{:03d}-{:06d}", iteration, k),
                   sources[s][order[s][cursor[s]++]]});
  }
  return out;
}

absl::StatusOr<RepairSettings> LoadRepairSettings(const RunConfig& cfg, bool enabled) {
  RepairSettings r;
  r.enabled = enabled;
  r.max_rounds = cfg.repair_max_rounds;
  if (!enabled) return r;
  if (cfg.repair_rules.empty()) {
    r.rules = repair::DefaultMiniUiRules();
  } else {
    RF_ASSIGN_OR_RETURN(r.rules, repair::LoadRules(cfg.repair_rules));
  }
  return r;
}

absl::StatusOr<refine::Candidate> BuildCandidate(const prefs::VariantSource& v, int iteration,
                                                 Adapters& adapters,
                                                 const RepairSettings& repair,
                                                 store::BlobStore& blobs) {
  refine::Candidate c;
  c.candidate_id = v.candidate_id;
  c.description_id = v.description_id;
  c.description = v.description;
  c.profile_id = v.profile_id;
  c.iteration = iteration;

  std::string source = v.source;
  if (repair.enabled && !source.empty()) {
    RF_ASSIGN_OR_RETURN(auto repaired,
                        repair::ApplyRepairs(source, repair.rules, *adapters.compiler,
                                             repair.max_rounds));
    c.repairs_applied = static_cast<int>(repaired.report.applied.size());
    source = std::move(repaired.source);
  }
  if (source.empty()) {
    refine::Candidate failed = prefs::FailedGenerationCandidate(v);
    failed.iteration = iteration;
    return failed;
  }
  RF_ASSIGN_OR_RETURN(c.source_ref, blobs.Put(source, store::MediaKind::kProgramSource));
  RF_ASSIGN_OR_RETURN(c.outcome, adapters.compiler->Compile(source));
  if (!c.outcome.success) return c;

  auto artifact = adapters.renderer->Render(source);
  if (!artifact.ok()) return c;
  RF_ASSIGN_OR_RETURN(c.render_ref,
                      blobs.Put(artifact->Serialize(), store::MediaKind::kRenderArtifact));
  auto vec = adapters.embedder->EmbedRender(*artifact);
  if (vec.ok()) c.render_vec = std::move(*vec);
  return c;
}

absl::StatusOr<std::map<std::string, adapters::EmbeddingVector>> GroundTruthVectors(
    std::span<const DescriptionRecord> records, Adapters& adapters) {
  std::map<std::string, adapters::EmbeddingVector> out;
  for (const auto& r : records) {
    if (r.ground_truth.empty() || out.contains(r.description_id)) continue;
    auto artifact = adapters.renderer->Render(r.ground_truth);
    if (!artifact.ok()) continue;
    auto vec = adapters.embedder->EmbedRender(*artifact);
    if (vec.ok()) out.emplace(r.description_id, std::move(*vec));
  }
  return out;
}

absl::StatusOr<int> ScoreCandidates(
    std::vector<refine::Candidate>& candidates, adapters::Embedder& embedder,
    const scoring::PromptTemplates& templates,
    const std::map<std::string, adapters::EmbeddingVector>& ground_truth) {
  std::map<std::string, adapters::EmbeddingVector> text_vecs;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    if (!c.compiles() || !c.render_vec) continue;
    if (!text_vecs.contains(c.description)) {
      RF_ASSIGN_OR_RETURN(std::string prompt, templates.ScoringPrompt(c.description));
      auto vec = embedder.EmbedText(prompt);
      if (!vec.ok()) continue;
      text_vecs.emplace(c.description, std::move(*vec));
    }
    idx.push_back(i);
  }
  std::vector<scoring::RelevanceInput> inputs;
  inputs.reserve(idx.size());
  for (std::size_t i : idx) {
    const auto& c = candidates[i];
    const auto gt = ground_truth.find(c.description_id);
    inputs.push_back({&text_vecs.at(c.description), &*c.render_vec,
                      gt == ground_truth.end() ? nullptr : &gt->second});
  }
  RF_ASSIGN_OR_RETURN(auto scores, scoring::ComputeRelevanceBatch(inputs));
  for (std::size_t k = 0; k < idx.size(); ++k) candidates[idx[k]].score = scores[k];
  return static_cast<int>(idx.size());
}

}  // namespace refinery::orchestrator
