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

#include "refinery/orchestrator/iteration.h"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <thread>

#include "fmt/format.h"
#include "refinery/adapters/generators.h"
#include "refinery/common/status_macros.h"
#include "refinery/common/strings.h"
#include "refinery/orchestrator/pipeline.h"
#include "refinery/prefs/prefs.h"
#include "refinery/refine/filters.h"
#include "refinery/store/dataset.h"
#include "refinery/store/job_queue.h"
#include "spdlog/spdlog.h"

namespace refinery::orchestrator {
namespace {

using SteadyClock = std::chrono::steady_clock;

constexpr char kSamplesFile[] = "samples.jsonl";
constexpr char kGeneratedFile[] = "generated.jsonl";
constexpr char kCandidatesFile[] = "candidates.jsonl";
constexpr char kQueueFile[] = "queue.db";
constexpr char kRefinedFile[] = "refined.jsonl";
constexpr char kPrefsFile[] = "preferences.jsonl";
constexpr char kTopFile[] = "top.jsonl";
constexpr char kManifestFile[] = "manifest.json";

absl::Status WriteFileAtomic(const std::filesystem::path& path, std::string_view content) {
  const auto tmp = path.parent_path() / StrCat(".", path.filename().string(), ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out.flush()) return absl::UnavailableError(StrCat("cannot write ", tmp.string()));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) return absl::UnavailableError(StrCat("cannot rename to ", path.string()));
  return absl::OkStatus();
}

absl::StatusOr<std::vector<Sample>> SampleForConfig(const RunConfig& cfg, int iteration) {
  if (cfg.samples_per_iteration <= 0) {
    return absl::FailedPreconditionError("samples_per_iteration must be positive");
  }
  if (cfg.description_sources.empty()) {
    return absl::FailedPreconditionError("no description sources configured");
  }
  std::vector<std::vector<DescriptionRecord>> sources;
  std::vector<double> weights;
  for (const auto& s : cfg.description_sources) {
    RF_ASSIGN_OR_RETURN(auto records, LoadDescriptions(s.path));
    sources.push_back(std::move(records));
    weights.push_back(s.weight);
  }
  return SampleDescriptions(sources, weights, cfg.samples_per_iteration, cfg.seed, iteration);
}

std::vector<DescriptionRecord> Records(const std::vector<Sample>& samples) {
  std::vector<DescriptionRecord> out;
  for (const auto& s : samples) out.push_back(s.record);
  return out;
}

std::optional<int> RunTrainerHook(const std::string& hook, const std::filesystem::path& shard) {
  if (hook.empty()) return std::nullopt;
  std::string cmd = hook;
  const std::string quoted = StrCat("'", std::filesystem::absolute(shard).string(), "'");
  if (const auto pos = cmd.find("{shard}"); pos != std::string::npos) {
    cmd.replace(pos, 7, quoted);
  } else {
    cmd = StrCat(cmd, " ", quoted);
  }
  const int rc = std::system(cmd.c_str());
  const int code = rc == -1 ? -1 : WIFEXITED(rc) ? WEXITSTATUS(rc) : 128 + WTERMSIG(rc);
  if (code != 0) spdlog::warn("trainer hook exited with {}", code);
  return code;
}

absl::StatusOr<std::vector<refine::Candidate>> ReadCandidates(const std::filesystem::path& path) {
  RF_ASSIGN_OR_RETURN(auto lines, store::ReadJsonLines(path));
  std::vector<refine::Candidate> out;
  for (const auto& j : lines) {
    RF_ASSIGN_OR_RETURN(auto c, refine::CandidateFromJson(j));
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.candidate_id < b.candidate_id; });
  return out;
}

class Runner {
 public:
  Runner(const RunConfig& cfg, int iteration, const IterationHooks& hooks,
         std::filesystem::path dir, Adapters adapters, RepairSettings repair,
         scoring::PromptTemplates templates, store::BlobStore blobs,
         std::unique_ptr<store::JobQueue> queue, store::Dataset generated,
         store::Dataset candidates)
      : cfg_(cfg),
        iteration_(iteration),
        hooks_(hooks),
        dir_(std::move(dir)),
        adapters_(std::move(adapters)),
        repair_(std::move(repair)),
        templates_(std::move(templates)),
        blobs_(std::move(blobs)),
        queue_(std::move(queue)),
        generated_(std::move(generated)),
        candidates_(std::move(candidates)) {}

  absl::Status Enqueue(const std::vector<Sample>& samples) {
    for (const auto& s : samples) {
      const nlohmann::json payload = {{"candidate_id", s.candidate_id},
                                      {"description_id", s.record.description_id},
                                      {"description", s.record.description}};
      RF_ASSIGN_OR_RETURN(auto ref,
                          blobs_.Put(payload.dump(), store::MediaKind::kDatasetShard));
      RF_RETURN_IF_ERROR(
          queue_->Enqueue(StrCat("generate:", s.candidate_id), store::JobKind::kGenerate, ref)
              .status());
    }
    return absl::OkStatus();
  }

  // Returns true when stopped by the wall-clock cap.
  absl::StatusOr<bool> Drain() {
    start_ = SteadyClock::now();
    std::vector<std::thread> threads;
    for (int i = 0; i < cfg_.workers; ++i) threads.emplace_back([this] { WorkerLoop(); });
    for (auto& t : threads) t.join();
    if (!first_error_.ok()) return first_error_;
    return capped_.load();
  }

  store::BlobStore& blobs() { return blobs_; }
  Adapters& adapters() { return adapters_; }
  const scoring::PromptTemplates& templates() const { return templates_; }

 private:
  void Fail(const absl::Status& s) {
    std::lock_guard<std::mutex> lock(err_mu_);
    if (first_error_.ok()) first_error_ = s;
    stop_ = true;
  }

  bool CapReached() const {
    if (cfg_.wall_clock_cap_s <= 0.0) return false;
    return std::chrono::duration<double>(SteadyClock::now() - start_).count() >=
           cfg_.wall_clock_cap_s;
  }

  void WorkerLoop() {
    const auto lease = std::chrono::milliseconds(cfg_.lease_ms);
    while (!stop_) {
      if (CapReached()) {
        capped_ = true;
        return;
      }
      bool worked = false;
      for (auto kind : {store::JobKind::kCompileRender, store::JobKind::kGenerate}) {
        auto job = queue_->Lease(kind, lease);
        if (!job.ok()) return Fail(job.status());
        if (!job->has_value()) continue;
        const absl::Status s = kind == store::JobKind::kGenerate ? ProcessGenerate(**job)
                                                                 : ProcessCompile(**job);
        if (!s.ok()) return Fail(s);
        worked = true;
        break;
      }
      if (worked) continue;
      auto gen = queue_->Counts(store::JobKind::kGenerate);
      auto comp = queue_->Counts(store::JobKind::kCompileRender);
      if (!gen.ok()) return Fail(gen.status());
      if (!comp.ok()) return Fail(comp.status());
      if (gen->pending + gen->leased + comp->pending + comp->leased == 0) return;
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
  }

  absl::Status Finish(const store::Job& job) {
    RF_RETURN_IF_ERROR(queue_->Complete(job.job_id).status());
    if (hooks_.exit_after_jobs >= 0 && ++jobs_done_ >= hooks_.exit_after_jobs) _exit(86);
    return absl::OkStatus();
  }

  absl::Status ProcessGenerate(const store::Job& job) {
    RF_ASSIGN_OR_RETURN(std::string bytes, blobs_.Get(job.payload_ref.key));
    nlohmann::json record = nlohmann::json::parse(bytes, nullptr, false);
    if (record.is_discarded()) return absl::DataLossError(StrCat("bad payload for ", job.job_id));
    const std::string description = record["description"].get<std::string>();
    record["profile_id"] = cfg_.profile.profile_id;
    record["iteration"] = iteration_;

    RF_ASSIGN_OR_RETURN(std::string prompt, templates_.GenerationPrompt(description));
    auto text = adapters_.generator->Generate(prompt, cfg_.profile);
    if (!text.ok() && adapters::IsTransient(text.status()) && job.attempts < cfg_.max_attempts) {
      spdlog::debug("{} attempt {}: {}", job.job_id, job.attempts,
                    std::string(text.status().message()));
      return absl::OkStatus();  // lease expiry redelivers it
    }
    if (text.ok() && text->empty()) text = adapters::EmptyCompletionError();
    if (!text.ok()) {
      record["status"] = "failed";
      record["error"] = std::string(text.status().message());
      RF_RETURN_IF_ERROR(generated_.Append(record).status());
      return Finish(job);
    }
    RF_ASSIGN_OR_RETURN(auto source_ref, blobs_.Put(*text, store::MediaKind::kProgramSource));
    record["status"] = "ok";
    record["source_ref"] = store::ToJson(source_ref);
    RF_RETURN_IF_ERROR(generated_.Append(record).status());
    RF_ASSIGN_OR_RETURN(auto payload, blobs_.Put(record.dump(), store::MediaKind::kDatasetShard));
    const std::string cid = record["candidate_id"].get<std::string>();
    RF_RETURN_IF_ERROR(
        queue_->Enqueue(StrCat("compile_render:", cid), store::JobKind::kCompileRender, payload)
            .status());
    return Finish(job);
  }

  absl::Status ProcessCompile(const store::Job& job) {
    RF_ASSIGN_OR_RETURN(std::string bytes, blobs_.Get(job.payload_ref.key));
    const nlohmann::json record = nlohmann::json::parse(bytes, nullptr, false);
    if (record.is_discarded()) return absl::DataLossError(StrCat("bad payload for ", job.job_id));
    RF_ASSIGN_OR_RETURN(auto source_ref, store::BlobRefFromJson(record.at("source_ref")));
    RF_ASSIGN_OR_RETURN(std::string source, blobs_.Get(source_ref.key));
    const prefs::VariantSource v{record["candidate_id"].get<std::string>(),
                                 record["description_id"].get<std::string>(),
                                 record["description"].get<std::string>(),
                                 record["profile_id"].get<std::string>(), std::move(source)};
    RF_ASSIGN_OR_RETURN(auto candidate, BuildCandidate(v, iteration_, adapters_, repair_, blobs_));
    RF_RETURN_IF_ERROR(candidates_.Append(refine::ToJson(candidate)).status());
    return Finish(job);
  }

  const RunConfig& cfg_;
  const int iteration_;
  const IterationHooks hooks_;
  const std::filesystem::path dir_;
  Adapters adapters_;
  const RepairSettings repair_;
  const scoring::PromptTemplates templates_;
  store::BlobStore blobs_;
  std::unique_ptr<store::JobQueue> queue_;
  store::Dataset generated_;
  store::Dataset candidates_;

  SteadyClock::time_point start_;
  std::atomic<bool> stop_{false};
  std::atomic<bool> capped_{false};
  std::atomic<int> jobs_done_{0};
  std::mutex err_mu_;
  absl::Status first_error_;
};

nlohmann::json ShardRecord(const refine::Candidate& c, const std::string& program) {
  return {{"candidate_id", c.candidate_id},
          {"description_id", c.description_id},
          {"description", c.description},
          {"profile_id", c.profile_id},
          {"source_ref", store::ToJson(c.source_ref)},
          {"program", program},
          {"combined", c.score->combined},
          {"text_sim", c.score->text_sim},
          {"visual_sim", c.score->visual_sim ? nlohmann::json(*c.score->visual_sim)
                                             : nlohmann::json(nullptr)},
          {"iteration", c.iteration}};
}

absl::Status WriteShard(const std::filesystem::path& dir, const std::string& name,
                        const std::vector<nlohmann::json>& records, store::BlobStore& blobs,
                        IterationManifest& manifest) {
  const std::string body = store::ToJsonLines(records);
  RF_RETURN_IF_ERROR(WriteFileAtomic(dir / name, body));
  manifest.shard_paths.push_back(name);
  if (!body.empty()) {
    RF_ASSIGN_OR_RETURN(auto ref, blobs.Put(body, store::MediaKind::kDatasetShard));
    manifest.shard_refs.push_back(ref);
  }
  return absl::OkStatus();
}

absl::Status WriteManifest(const std::filesystem::path& dir, const IterationManifest& m) {
  return WriteFileAtomic(dir / kManifestFile, ToJson(m).dump(2) + "\n");
}

}  // namespace

bool IterationCounts::ChainHolds() const {
  return after_dedup >= 0 && passed_percentile >= after_dedup &&
         passed_min >= passed_percentile && scored >= passed_min && rendered >= scored &&
         compiled >= rendered && generated >= compiled && sampled >= 0 && repaired >= 0 &&
         generation_failed >= 0;
}

nlohmann::json ToJson(const IterationCounts& c) {
  return {{"sampled", c.sampled},
          {"generated", c.generated},
          {"generation_failed", c.generation_failed},
          {"repaired", c.repaired},
          {"compiled", c.compiled},
          {"rendered", c.rendered},
          {"scored", c.scored},
          {"passed_min", c.passed_min},
          {"passed_percentile", c.passed_percentile},
          {"after_dedup", c.after_dedup},
          {"preference_pairs", c.preference_pairs},
          {"top_records", c.top_records}};
}

nlohmann::json ToJson(const IterationManifest& m) {
  nlohmann::json refs = nlohmann::json::array();
  for (const auto& r : m.shard_refs) refs.push_back(store::ToJson(r));
  return {{"iteration", m.iteration},
          {"mode", m.mode},
          {"config", m.config},
          {"counts", ToJson(m.counts)},
          {"shard_refs", refs},
          {"shard_paths", m.shard_paths},
          {"wall_clock_s", m.wall_clock_s},
          {"capped", m.capped},
          {"trainer_exit_code",
           m.trainer_exit_code ? nlohmann::json(*m.trainer_exit_code) : nlohmann::json(nullptr)}};
}

absl::StatusOr<IterationManifest> ManifestFromJson(const nlohmann::json& j) {
  IterationManifest m;
  try {
    m.iteration = j.at("iteration").get<int>();
    m.mode = j.value("mode", "sft");
    m.config = j.value("config", nlohmann::json::object());
    const auto& c = j.at("counts");
    auto& k = m.counts;
    for (auto [name, slot] :
         {std::pair{"sampled", &k.sampled}, {"generated", &k.generated},
          {"generation_failed", &k.generation_failed}, {"repaired", &k.repaired},
          {"compiled", &k.compiled}, {"rendered", &k.rendered}, {"scored", &k.scored},
          {"passed_min", &k.passed_min}, {"passed_percentile", &k.passed_percentile},
          {"after_dedup", &k.after_dedup}, {"preference_pairs", &k.preference_pairs},
          {"top_records", &k.top_records}}) {
      *slot = c.value(name, 0);
    }
    for (const auto& r : j.value("shard_refs", nlohmann::json::array())) {
      RF_ASSIGN_OR_RETURN(auto ref, store::BlobRefFromJson(r));
      m.shard_refs.push_back(ref);
    }
    m.shard_paths = j.value("shard_paths", std::vector<std::string>{});
    m.wall_clock_s = j.value("wall_clock_s", 0.0);
    m.capped = j.value("capped", false);
    if (j.contains("trainer_exit_code") && !j.at("trainer_exit_code").is_null()) {
      m.trainer_exit_code = j.at("trainer_exit_code").get<int>();
    }
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(StrCat("malformed manifest: ", e.what()));
  }
  return m;
}

std::filesystem::path IterationDir(const std::filesystem::path& work_dir, int iteration) {
  return work_dir / fmt::format("iter-{:03d}", iteration);
}

absl::StatusOr<IterationManifest> RunIteration(const RunConfig& cfg, int iteration,
                                               const IterationHooks& hooks) {
  if (cfg.mode == "prefs") return RunPreferenceIteration(cfg, iteration);
  if (iteration < 0) return absl::InvalidArgumentError("iteration must be >= 0");
  const auto t0 = SteadyClock::now();

  // Configuration errors abort here, before anything is queued.
  RF_ASSIGN_OR_RETURN(auto samples, SampleForConfig(cfg, iteration));
  RF_ASSIGN_OR_RETURN(Adapters adapters, MakeAdapters(cfg));
  RF_ASSIGN_OR_RETURN(RepairSettings repair, LoadRepairSettings(cfg, cfg.repair));
  RF_ASSIGN_OR_RETURN(auto templates, cfg.Templates());

  const auto dir = IterationDir(cfg.work_dir, iteration);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) return absl::UnavailableError(StrCat("cannot create ", dir.string()));

  RF_ASSIGN_OR_RETURN(auto sample_log, store::Dataset::Open(dir / kSamplesFile, "candidate_id"));
  for (const auto& s : samples) {
    RF_RETURN_IF_ERROR(sample_log
                           .Append({{"candidate_id", s.candidate_id},
                                    {"description_id", s.record.description_id},
                                    {"description", s.record.description}})
                           .status());
  }
  RF_ASSIGN_OR_RETURN(auto queue, store::JobQueue::Open(dir / kQueueFile));
  RF_ASSIGN_OR_RETURN(auto generated, store::Dataset::Open(dir / kGeneratedFile, "candidate_id"));
  RF_ASSIGN_OR_RETURN(auto candidates,
                      store::Dataset::Open(dir / kCandidatesFile, "candidate_id"));

  Runner runner(cfg, iteration, hooks, dir, std::move(adapters), std::move(repair), templates,
                store::BlobStore(cfg.work_dir), std::move(queue), std::move(generated),
                std::move(candidates));
  RF_RETURN_IF_ERROR(runner.Enqueue(samples));
  RF_ASSIGN_OR_RETURN(const bool capped, runner.Drain());

  IterationManifest manifest;
  manifest.iteration = iteration;
  manifest.mode = "sft";
  manifest.config = ToJson(cfg);
  manifest.capped = capped;
  auto& counts = manifest.counts;
  counts.sampled = static_cast<int>(samples.size());

  RF_ASSIGN_OR_RETURN(auto gen_records, store::ReadJsonLines(dir / kGeneratedFile));
  for (const auto& r : gen_records) {
    (r.value("status", "") == "ok" ? counts.generated : counts.generation_failed) += 1;
  }
  RF_ASSIGN_OR_RETURN(auto all, ReadCandidates(dir / kCandidatesFile));
  for (const auto& c : all) {
    if (c.repairs_applied > 0) ++counts.repaired;
  }

  std::vector<refine::Candidate> compiled = refine::CompilationFilter(all);
  counts.compiled = static_cast<int>(compiled.size());
  counts.rendered = static_cast<int>(std::count_if(
      compiled.begin(), compiled.end(), [](const auto& c) { return c.render_ref.has_value(); }));

  RF_ASSIGN_OR_RETURN(auto gt, GroundTruthVectors(Records(samples), runner.adapters()));
  RF_ASSIGN_OR_RETURN(counts.scored,
                      ScoreCandidates(compiled, *runner.adapters().embedder, templates, gt));
  std::vector<refine::Candidate> scored;
  for (auto& c : compiled) {
    if (c.score) scored.push_back(std::move(c));
  }
  RF_ASSIGN_OR_RETURN(auto filtered, refine::ScoreFilter(scored, cfg.filter));
  counts.passed_min = filtered.passed_min;
  counts.passed_percentile = static_cast<int>(filtered.kept.size());
  RF_ASSIGN_OR_RETURN(auto refined, refine::Dedup(filtered.kept, cfg.filter));
  counts.after_dedup = static_cast<int>(refined.size());

  std::vector<nlohmann::json> shard;
  for (const auto& c : refined) {
    RF_ASSIGN_OR_RETURN(std::string program, runner.blobs().Get(c.source_ref.key));
    shard.push_back(ShardRecord(c, program));
  }
  RF_RETURN_IF_ERROR(WriteShard(dir, kRefinedFile, shard, runner.blobs(), manifest));
  manifest.trainer_exit_code = RunTrainerHook(cfg.trainer_hook, dir / kRefinedFile);
  manifest.wall_clock_s = std::chrono::duration<double>(SteadyClock::now() - t0).count();
  if (!counts.ChainHolds()) {
    return absl::InternalError(StrCat("count chain violated: ", ToJson(counts).dump()));
  }
  RF_RETURN_IF_ERROR(WriteManifest(dir, manifest));
  spdlog::info("iteration {}: {}", iteration, ToJson(counts).dump());
  return manifest;
}

absl::StatusOr<IterationManifest> RunPreferenceIteration(const RunConfig& cfg, int iteration) {
  if (iteration < 0) return absl::InvalidArgumentError("iteration must be >= 0");
  const auto t0 = SteadyClock::now();
  RF_ASSIGN_OR_RETURN(auto samples, SampleForConfig(cfg, iteration));
  RF_ASSIGN_OR_RETURN(Adapters adapters, MakeAdapters(cfg));
  RF_ASSIGN_OR_RETURN(RepairSettings repair, LoadRepairSettings(cfg, cfg.repair_in_prefs));
  RF_ASSIGN_OR_RETURN(auto templates, cfg.Templates());
  RF_ASSIGN_OR_RETURN(auto pair_mode, prefs::ParsePairMode(cfg.pair_mode));
  const auto profiles = prefs::DefaultProfilePack(cfg.profile.stop_token, cfg.profile.max_tokens);

  const auto dir = IterationDir(cfg.work_dir, iteration);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) return absl::UnavailableError(StrCat("cannot create ", dir.string()));
  store::BlobStore blobs(cfg.work_dir);

  RF_ASSIGN_OR_RETURN(auto gt, GroundTruthVectors(Records(samples), adapters));
  const prefs::CandidateFactory factory = [&](const prefs::VariantSource& v) {
    return BuildCandidate(v, iteration, adapters, repair, blobs);
  };

  IterationManifest manifest;
  manifest.iteration = iteration;
  manifest.mode = "prefs";
  manifest.config = ToJson(cfg);
  auto& counts = manifest.counts;
  counts.sampled = static_cast<int>(samples.size());

  std::map<std::string, refine::Candidate> by_id;
  std::vector<prefs::RankedSet> sets;
  std::vector<prefs::PreferencePair> pairs;
  for (const auto& s : samples) {
    auto variants =
        prefs::GenerateVariants(s.record.description_id, s.record.description, profiles,
                                *adapters.generator, factory, templates, s.candidate_id + "/");
    if (absl::IsFailedPrecondition(variants.status())) {
      counts.generation_failed += static_cast<int>(profiles.size());
      spdlog::warn("{}", std::string(variants.status().message()));
      continue;
    }
    if (!variants.ok()) return variants.status();
    RF_ASSIGN_OR_RETURN(int scored, ScoreCandidates(*variants, *adapters.embedder, templates, gt));
    counts.scored += scored;
    for (const auto& c : *variants) {
      if (c.outcome.total_lines == 0 && !c.compiles() && c.source_ref.size_bytes == 0) {
        ++counts.generation_failed;
        continue;
      }
      ++counts.generated;
      if (c.repairs_applied > 0) ++counts.repaired;
      if (c.compiles()) ++counts.compiled;
      if (c.compiles() && c.render_ref) ++counts.rendered;
    }
    RF_ASSIGN_OR_RETURN(auto ranked, prefs::RankCandidates(*variants));
    for (auto& p : prefs::ToPreferencePairs(ranked, pair_mode)) pairs.push_back(std::move(p));
    sets.push_back(std::move(ranked));
    for (auto& c : *variants) by_id.emplace(c.candidate_id, std::move(c));
  }

  RF_ASSIGN_OR_RETURN(auto pref_records, prefs::PreferenceRecords(pairs, by_id));
  RF_ASSIGN_OR_RETURN(auto top_records, prefs::ExportTopDataset(sets, by_id, blobs));
  counts.preference_pairs = static_cast<int>(pref_records.size());
  counts.top_records = static_cast<int>(top_records.size());
  RF_RETURN_IF_ERROR(WriteShard(dir, kPrefsFile, pref_records, blobs, manifest));
  RF_RETURN_IF_ERROR(WriteShard(dir, kTopFile, top_records, blobs, manifest));
  manifest.trainer_exit_code = RunTrainerHook(cfg.trainer_hook, dir / kPrefsFile);
  manifest.wall_clock_s = std::chrono::duration<double>(SteadyClock::now() - t0).count();
  RF_RETURN_IF_ERROR(WriteManifest(dir, manifest));
  spdlog::info("preference iteration {}: {}", iteration, ToJson(counts).dump());
  return manifest;
}

}  // namespace refinery::orchestrator
