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

#include "refinery/orchestrator/eval.h"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include "fmt/format.h"
#include "refinery/common/status_macros.h"
#include "refinery/common/strings.h"
#include "refinery/orchestrator/pipeline.h"
#include "refinery/store/dataset.h"
#include "spdlog/spdlog.h"

namespace refinery::orchestrator {
namespace {

absl::Status WriteText(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out.flush()) return absl::UnavailableError(StrCat("cannot write ", path.string()));
  return absl::OkStatus();
}

std::string Cell(const std::optional<double>& v, int digits) {
  return v ? fmt::format("{:.{}f}", *v, digits) : "n/a";
}

// Up to cfg.max_attempts tries; transient failures are retried at once.
absl::StatusOr<std::string> GenerateWithRetry(adapters::Generator& g, const std::string& prompt,
                                              const adapters::SamplingProfile& profile,
                                              int attempts) {
  absl::StatusOr<std::string> text = absl::UnknownError("not attempted");
  for (int i = 0; i < attempts; ++i) {
    text = g.Generate(prompt, profile);
    if (text.ok() || !adapters::IsTransient(text.status())) break;
  }
  return text;
}

}  // namespace

nlohmann::json ToJson(const EvalReport& report) {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& m : report.models) {
    models.push_back({{"model_id", m.model_id},
                      {"params", m.params},
                      {"complete", m.complete},
                      {"error", m.error},
                      {"entries", m.entries},
                      {"compile_rate", m.compile_rate ? nlohmann::json(*m.compile_rate)
                                                      : nlohmann::json(nullptr)},
                      {"mean_relevance", m.mean_relevance ? nlohmann::json(*m.mean_relevance)
                                                          : nlohmann::json(nullptr)},
                      {"elo", m.elo}});
  }
  return {{"eval_set_size", report.eval_set_size},
          {"models", models},
          {"auto_matches", report.auto_matches.size()},
          {"mean_relevance_convention", "non-compiling entries score 0"},
          {"warnings", report.warnings}};
}

absl::StatusOr<EvalReport> RunEval(const RunConfig& cfg) {
  if (cfg.models.empty()) return absl::FailedPreconditionError("no models configured");
  if (cfg.eval_set.empty()) return absl::FailedPreconditionError("no eval_set configured");
  RF_ASSIGN_OR_RETURN(auto eval_set, LoadDescriptions(cfg.eval_set));
  if (eval_set.empty()) return absl::FailedPreconditionError("eval set is empty");

  EvalReport report;
  report.eval_set_size = static_cast<int>(eval_set.size());
  if (report.eval_set_size != kDefaultEvalSetSize) {
    report.warnings.push_back(fmt::format("eval set has {} descriptions, expected {}",
                                          report.eval_set_size, kDefaultEvalSetSize));
    spdlog::warn("{}", report.warnings.back());
  }

  RF_ASSIGN_OR_RETURN(Adapters shared, MakeAdapters(cfg));
  RF_ASSIGN_OR_RETURN(auto templates, cfg.Templates());
  RF_ASSIGN_OR_RETURN(auto gt, GroundTruthVectors(eval_set, shared));
  const RepairSettings no_repair{false, 1, {}};
  std::error_code ec;
  std::filesystem::create_directories(cfg.eval_dir, ec);
  if (ec) return absl::UnavailableError(StrCat("cannot create ", cfg.eval_dir.string()));
  store::BlobStore blobs(cfg.work_dir);

  for (const auto& spec : cfg.models) {
    ModelResult result{spec.model_id, spec.params};
    auto generator = MakeGenerator(spec.generator);
    if (!generator.ok()) {
      result.complete = false;
      result.error = std::string(generator.status().message());
    }
    std::vector<refine::Candidate> candidates;
    for (std::size_t i = 0; result.complete && i < eval_set.size(); ++i) {
      const auto& d = eval_set[i];
      RF_ASSIGN_OR_RETURN(std::string prompt, templates.GenerationPrompt(d.description));
      auto text = GenerateWithRetry(**generator, prompt, spec.profile, cfg.max_attempts);
      if (!text.ok() && adapters::IsTransient(text.status())) {
        result.complete = false;
        result.error = std::string(text.status().message());
        break;
      }
      const prefs::VariantSource v{StrCat("eval:", spec.model_id, ":", d.description_id),
                                   d.description_id, d.description, spec.model_id,
                                   text.ok() ? *text : std::string()};
      RF_ASSIGN_OR_RETURN(auto c, BuildCandidate(v, 0, shared, no_repair, blobs));
      candidates.push_back(std::move(c));
    }
    if (!result.complete) {
      spdlog::warn("model {} incomplete: {}", spec.model_id, result.error);
      report.warnings.push_back(StrCat("model ", spec.model_id, " incomplete: ", result.error));
      report.models.push_back(std::move(result));
      continue;
    }
    RF_RETURN_IF_ERROR(
        ScoreCandidates(candidates, *shared.embedder, templates, gt).status());
    std::vector<arena::EvalEntry> entries;
    for (auto& c : candidates) {
      arena::EvalEntry e;
      e.model_id = spec.model_id;
      e.description_id = c.description_id;
      e.description = c.description;
      e.source_ref = c.source_ref;
      e.outcome = c.outcome;
      // A program that compiles but cannot be rendered is judged as failing.
      if (c.compiles() && !c.render_ref) e.outcome.success = false;
      if (e.outcome.success) {
        e.render_ref = c.render_ref;
        if (c.score) e.combined_score = c.score->combined;
      }
      entries.push_back(std::move(e));
    }
    result.entries = static_cast<int>(entries.size());
    RF_ASSIGN_OR_RETURN(double rate, arena::CompileRate(entries));
    RF_ASSIGN_OR_RETURN(double rel, arena::MeanRelevance(entries));
    result.compile_rate = rate;
    result.mean_relevance = rel;
    report.entries.insert(report.entries.end(), entries.begin(), entries.end());
    report.models.push_back(std::move(result));
  }

  RF_ASSIGN_OR_RETURN(report.auto_matches, arena::SeedAutoMatches(report.entries));
  RF_ASSIGN_OR_RETURN(auto table, arena::Replay(report.auto_matches));
  for (auto& m : report.models) m.elo = table.rating(m.model_id);

  std::vector<nlohmann::json> entry_lines, match_lines;
  for (const auto& e : report.entries) entry_lines.push_back(arena::ToJson(e));
  for (const auto& m : report.auto_matches) match_lines.push_back(arena::ToJson(m));
  RF_RETURN_IF_ERROR(WriteText(cfg.eval_dir / "entries.jsonl", store::ToJsonLines(entry_lines)));
  RF_RETURN_IF_ERROR(WriteText(cfg.eval_dir / "matches.jsonl", store::ToJsonLines(match_lines)));
  RF_RETURN_IF_ERROR(WriteText(cfg.eval_dir / "results.md", FormatResultsTable(report)));
  RF_RETURN_IF_ERROR(WriteText(cfg.eval_dir / "summary.json", ToJson(report).dump(2) + "\n"));

  if (cfg.snapshot_iteration) {
    const std::string wanted =
        cfg.snapshot_model.empty() ? cfg.models.front().model_id : cfg.snapshot_model;
    const auto it = std::find_if(report.models.begin(), report.models.end(),
                                 [&](const auto& m) { return m.model_id == wanted; });
    if (it == report.models.end() || !it->compile_rate) {
      return absl::FailedPreconditionError(StrCat("no complete results for model ", wanted));
    }
    const auto dir = IterationDir(cfg.work_dir, *cfg.snapshot_iteration);
    std::filesystem::create_directories(dir, ec);
    const nlohmann::json snap = {{"model_id", wanted},
                                 {"compile_rate", *it->compile_rate},
                                 {"mean_relevance", *it->mean_relevance}};
    RF_RETURN_IF_ERROR(WriteText(dir / kEvalSnapshotFile, snap.dump(2) + "\n"));
  }
  return report;
}

std::string FormatResultsTable(const EvalReport& report) {
  std::string out = "| Model | Params | Compile | CLIP | Elo |\n|---|---|---|---|---|\n";
  for (const auto& m : report.models) {
    out += fmt::format("| {} | {} | {} | {} | {} |\n", m.model_id,
                       m.params.empty() ? "-" : m.params, Cell(m.compile_rate, 3),
                       Cell(m.mean_relevance, 3),
                       m.complete ? fmt::format("{:.0f}", m.elo) : "n/a");
  }
  return out;
}

std::vector<TimeseriesRow> ReportTimeseries(std::span<const IterationManifest> manifests,
                                            const std::map<int, EvalSnapshot>& snapshots) {
  std::vector<TimeseriesRow> rows;
  for (const auto& m : manifests) {
    TimeseriesRow row;
    row.iteration = m.iteration;
    row.mined_count = m.mode == "prefs" ? m.counts.top_records : m.counts.after_dedup;
    if (const auto it = snapshots.find(m.iteration); it != snapshots.end()) {
      row.compile_rate = it->second.compile_rate;
      row.mean_relevance = it->second.mean_relevance;
    }
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.iteration < b.iteration; });
  return rows;
}

std::string FormatTimeseries(std::span<const TimeseriesRow> rows) {
  auto num = [](const std::optional<double>& v) {
    return v ? fmt::format("{}", *v) : std::string("null");
  };
  std::string out = "iteration\tcompile_rate\tmean_relevance\tmined_count\n";
  for (const auto& r : rows) {
    out += fmt::format("{}\t{}\t{}\t{}\n", r.iteration, num(r.compile_rate),
                       num(r.mean_relevance), r.mined_count);
  }
  return out;
}

absl::StatusOr<std::vector<TimeseriesRow>> LoadTimeseries(const std::filesystem::path& runs_dir) {
  if (!std::filesystem::is_directory(runs_dir)) {
    return absl::NotFoundError(StrCat("no runs directory ", runs_dir.string()));
  }
  static const std::regex kIterDir(R"(iter-\d+)");
  std::vector<IterationManifest> manifests;
  std::map<int, EvalSnapshot> snapshots;
  for (const auto& entry : std::filesystem::directory_iterator(runs_dir)) {
    if (!entry.is_directory() ||
        !std::regex_match(entry.path().filename().string(), kIterDir)) {
      continue;
    }
    const auto manifest_path = entry.path() / "manifest.json";
    if (!std::filesystem::exists(manifest_path)) continue;
    std::ifstream in(manifest_path);
    const auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) {
      return absl::DataLossError(StrCat("unreadable manifest ", manifest_path.string()));
    }
    RF_ASSIGN_OR_RETURN(auto m, ManifestFromJson(j));
    const auto snap_path = entry.path() / kEvalSnapshotFile;
    if (std::filesystem::exists(snap_path)) {
      std::ifstream sin(snap_path);
      const auto s = nlohmann::json::parse(sin, nullptr, false);
      if (s.is_discarded() || !s.contains("compile_rate") || !s.contains("mean_relevance")) {
        return absl::DataLossError(StrCat("unreadable snapshot ", snap_path.string()));
      }
      snapshots[m.iteration] = {s["compile_rate"].get<double>(),
                                s["mean_relevance"].get<double>()};
    }
    manifests.push_back(std::move(m));
  }
  if (manifests.empty()) {
    return absl::NotFoundError(StrCat("no iteration manifests under ", runs_dir.string()));
  }
  return ReportTimeseries(manifests, snapshots);
}

}  // namespace refinery::orchestrator
