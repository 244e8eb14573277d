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

// Command-line driver for the refinery.

#include <csignal>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "refinery/arena/elo.h"
#include "refinery/arena/pair_service.h"
#include "refinery/arena/server.h"
#include "refinery/orchestrator/config.h"
#include "refinery/orchestrator/eval.h"
#include "refinery/orchestrator/iteration.h"
#include "refinery/scoring/prompts.h"
#include "refinery/store/dataset.h"
#include "spdlog/spdlog.h"

namespace {

using ::refinery::orchestrator::LoadRunConfig;
using ::refinery::orchestrator::RunConfig;

refinery::arena::ArenaServer* g_server = nullptr;

void HandleSignal(int) {
  if (g_server != nullptr) g_server->Stop();
}

int Fail(const absl::Status& s) {
  spdlog::error("{}", std::string(s.message()));
  return 1;
}

int Iterate(const std::string& config_path, int iteration) {
  auto cfg = LoadRunConfig(config_path);
  if (!cfg.ok()) return Fail(cfg.status());
  auto manifest = refinery::orchestrator::RunIteration(*cfg, iteration);
  if (!manifest.ok()) return Fail(manifest.status());
  std::cout << refinery::orchestrator::ToJson(*manifest).dump(2) << "\n";
  return 0;
}

int Eval(const std::string& config_path) {
  auto cfg = LoadRunConfig(config_path);
  if (!cfg.ok()) return Fail(cfg.status());
  auto report = refinery::orchestrator::RunEval(*cfg);
  if (!report.ok()) return Fail(report.status());
  std::cout << refinery::orchestrator::FormatResultsTable(*report);
  std::cout << "mean relevance counts non-compiling programs as 0\n";
  return 0;
}

struct ServeOptions {
  int port = 8080;
  std::string host = "0.0.0.0";
  std::string config;
  std::string eval_dir;
  std::string blobs;
  std::string ui_dir;
  std::uint64_t seed = 0;
  double k_factor = refinery::arena::kDefaultKFactor;
};

int Serve(const ServeOptions& opt) {
  std::filesystem::path eval_dir = opt.eval_dir;
  std::filesystem::path blob_root = opt.blobs;
  if (!opt.config.empty()) {
    auto cfg = LoadRunConfig(opt.config);
    if (!cfg.ok()) return Fail(cfg.status());
    if (eval_dir.empty()) eval_dir = cfg->eval_dir;
    if (blob_root.empty()) blob_root = cfg->work_dir;
  }
  if (eval_dir.empty()) eval_dir = "runs/eval";
  if (blob_root.empty()) blob_root = "runs";

  auto entry_lines = refinery::store::ReadJsonLines(eval_dir / "entries.jsonl");
  if (!entry_lines.ok()) return Fail(entry_lines.status());
  std::vector<refinery::arena::EvalEntry> entries;
  for (const auto& j : *entry_lines) {
    auto e = refinery::arena::EvalEntryFromJson(j);
    if (!e.ok()) return Fail(e.status());
    entries.push_back(std::move(*e));
  }
  if (entries.empty()) {
    return Fail(absl::FailedPreconditionError(
        "no eval entries in " + eval_dir.string() + "; run `refinery eval` first"));
  }
  auto match_lines = refinery::store::ReadJsonLines(eval_dir / "matches.jsonl");
  if (!match_lines.ok()) return Fail(match_lines.status());
  std::vector<refinery::arena::MatchRecord> prior;
  for (const auto& j : *match_lines) {
    auto m = refinery::arena::MatchFromJson(j);
    if (!m.ok()) return Fail(m.status());
    prior.push_back(std::move(*m));
  }
  auto log = refinery::store::Dataset::Open(eval_dir / "matches.jsonl", "match_id");
  if (!log.ok()) return Fail(log.status());

  refinery::arena::PairService::Options options;
  options.seed = opt.seed;
  options.k_factor = opt.k_factor;
  options.on_match = [&log](const refinery::arena::MatchRecord& m) {
    if (auto s = log->Append(refinery::arena::ToJson(m)); !s.ok()) {
      spdlog::error("cannot persist match {}: {}", m.match_id, std::string(s.status().message()));
    }
  };
  auto service = refinery::arena::PairService::Create(entries, prior, options);
  if (!service.ok()) return Fail(service.status());

  refinery::store::BlobStore blobs(blob_root);
  refinery::arena::ArenaServer server(**service, blobs);
  if (!opt.ui_dir.empty()) {
    if (auto s = server.MountStatic(opt.ui_dir); !s.ok()) return Fail(s);
  }
  auto port = server.Bind(opt.host, opt.port);
  if (!port.ok()) return Fail(port.status());
  g_server = &server;
  std::signal(SIGINT, HandleSignal);
  std::signal(SIGTERM, HandleSignal);
  spdlog::info("arena listening on {}:{} ({} entries, {} prior matches)", opt.host, *port,
               entries.size(), prior.size());
  const absl::Status s = server.Serve();
  g_server = nullptr;
  return s.ok() ? 0 : Fail(s);
}

int Report(const std::string& runs_dir) {
  auto rows = refinery::orchestrator::LoadTimeseries(runs_dir);
  if (!rows.ok()) return Fail(rows.status());
  std::cout << refinery::orchestrator::FormatTimeseries(*rows);
  return 0;
}

int ShowPrompts(const std::string& config_path, const std::string& description) {
  auto templates = refinery::scoring::PromptTemplates::Defaults();
  if (!config_path.empty()) {
    auto cfg = LoadRunConfig(config_path);
    if (!cfg.ok()) return Fail(cfg.status());
    auto t = cfg->Templates();
    if (!t.ok()) return Fail(t.status());
    templates = *t;
  }
  std::cout << "generation: " << templates.generation_template() << "\n"
            << "scoring:    " << templates.scoring_template() << "\n"
            << "paraphrase: " << templates.paraphrase_template() << "\n"
            << "digest:     " << templates.Digest() << "\n";
  if (!description.empty()) {
    auto gen = templates.GenerationPrompt(description);
    auto score = templates.ScoringPrompt(description);
    auto para = templates.ParaphrasePrompt(description);
    if (!gen.ok()) return Fail(gen.status());
    if (!score.ok()) return Fail(score.status());
    if (!para.ok()) return Fail(para.status());
    std::cout << "\n" << *gen << "\n" << *score << "\n" << *para << "\n";
  }
  return 0;
}

int ReplayMatches(const std::string& path, int shuffle, std::uint64_t seed, double k) {
  auto lines = refinery::store::ReadJsonLines(path);
  if (!lines.ok()) return Fail(lines.status());
  std::vector<refinery::arena::MatchRecord> log;
  for (const auto& j : *lines) {
    auto m = refinery::arena::MatchFromJson(j);
    if (!m.ok()) return Fail(m.status());
    log.push_back(std::move(*m));
  }
  std::map<std::string, double> ratings;
  if (shuffle > 0) {
    auto avg = refinery::arena::ReplayShuffledAverage(log, shuffle, seed, k);
    if (!avg.ok()) return Fail(avg.status());
    ratings = *avg;
  } else {
    auto table = refinery::arena::Replay(log, k);
    if (!table.ok()) return Fail(table.status());
    ratings = table->ratings();
  }
  std::vector<std::pair<std::string, double>> rows(ratings.begin(), ratings.end());
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& [model, rating] : rows) std::printf("%s\t%.2f\n", model.c_str(), rating);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-training data refinery for UI code"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  std::string config;
  int iteration = 0;
  auto* iterate = app.add_subcommand("iterate", "Run one mining iteration");
  iterate->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
  iterate->add_option("--iteration", iteration, "Iteration number")->required();

  auto* eval = app.add_subcommand("eval", "Evaluate models and seed the arena");
  eval->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);

  ServeOptions serve_opt;
  auto* serve = app.add_subcommand("serve", "Serve the pairwise rating API");
  serve->add_option("--port", serve_opt.port, "Port")->required();
  serve->add_option("--host", serve_opt.host, "Bind address");
  serve->add_option("--config", serve_opt.config, "Config file for eval_dir and work_dir");
  serve->add_option("--eval-dir", serve_opt.eval_dir, "Directory written by `eval`");
  serve->add_option("--blobs", serve_opt.blobs, "Blob store root");
  serve->add_option("--ui-dir", serve_opt.ui_dir, "Static files served at /");
  serve->add_option("--seed", serve_opt.seed, "Pair sampling seed");
  serve->add_option("--k-factor", serve_opt.k_factor, "Elo K factor");

  std::string runs;
  auto* report = app.add_subcommand("report", "Per-iteration metrics table");
  report->add_option("--runs", runs, "Runs directory")->required();

  std::string description;
  auto* prompts = app.add_subcommand("show-prompts", "Print the prompt templates");
  prompts->add_option("--config", config, "Config file with template overrides");
  prompts->add_option("--description", description, "Fill the templates with this text");

  std::string matches;
  int shuffle = 0;
  std::uint64_t seed = 0;
  double k = refinery::arena::kDefaultKFactor;
  auto* replay = app.add_subcommand("replay", "Recompute Elo ratings from a match log");
  replay->add_option("--matches", matches, "matches.jsonl")->required()->check(CLI::ExistingFile);
  replay->add_option("--shuffle", shuffle, "Average over this many shuffled replays");
  replay->add_option("--seed", seed, "Shuffle seed");
  replay->add_option("--k-factor", k, "Elo K factor");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  if (*iterate) return Iterate(config, iteration);
  if (*eval) return Eval(config);
  if (*serve) return Serve(serve_opt);
  if (*report) return Report(runs);
  if (*prompts) return ShowPrompts(config, description);
  if (*replay) return ReplayMatches(matches, shuffle, seed, k);
  return 1;
}
