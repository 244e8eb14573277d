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

#include <sys/wait.h>
#include <unistd.h>

#include <map>
#include <set>

#include "gtest/gtest.h"
#include "refinery/orchestrator/config.h"
#include "refinery/orchestrator/eval.h"
#include "refinery/orchestrator/iteration.h"
#include "refinery/orchestrator/pipeline.h"
#include "refinery/store/dataset.h"
#include "spdlog/spdlog.h"
#include "testing/e2e_fixture.h"
#include "testing/fixtures.h"

namespace refinery::orchestrator {
namespace {

using ::refinery::testing::BuildE2eFixture;
using ::refinery::testing::E2eExpectedAfterDedup;
using ::refinery::testing::ReadFile;
using ::refinery::testing::TempDir;
using ::refinery::testing::WriteFile;

class Quiet : public ::testing::Environment {
 public:
  void SetUp() override { spdlog::set_level(spdlog::level::err); }
};
const auto* const kQuiet = ::testing::AddGlobalTestEnvironment(new Quiet);

TEST(FlatConfigTest, Parses) {
  auto kv = ParseFlatConfig(
      "# comment\n"
      "\n"
      "a = 1\n"
      "b = \"two\"  \n"
      "c = [1, 2]\n"
      "model.x.params = 15B\n"
      "d = true\n");
  ASSERT_TRUE(kv.ok()) << kv.status();
  EXPECT_EQ(kv->at("a"), 1);
  EXPECT_EQ(kv->at("b"), "two");
  EXPECT_EQ(kv->at("c"), nlohmann::json({1, 2}));
  EXPECT_EQ(kv->at("model.x.params"), "15B");
  EXPECT_EQ(kv->at("d"), true);
  EXPECT_FALSE(ParseFlatConfig("a = 1\na = 2\n").ok());
  EXPECT_FALSE(ParseFlatConfig("no equals sign\n").ok());
  EXPECT_FALSE(ParseFlatConfig(" = 3\n").ok());
}

TEST(RunConfigTest, KeysAndDefaults) {
  auto kv = ParseFlatConfig(
      "description_sources = [\"a.jsonl\", \"/abs/b.jsonl\"]\n"
      "source_weights = [3, 1]\n"
      "percentile_thresh = 0.5\n"
      "dedup_mode = \"per_description\"\n"
      "top_k = 70\n"
      "models = [\"m\"]\n"
      "model.m.params = \"7B\"\n"
      "model.m.temperature = 0.5\n");
  ASSERT_TRUE(kv.ok());
  auto cfg = RunConfigFromFlat(*kv, "/base");
  ASSERT_TRUE(cfg.ok()) << cfg.status();
  ASSERT_EQ(cfg->description_sources.size(), 2u);
  EXPECT_EQ(cfg->description_sources[0].path, "/base/a.jsonl");
  EXPECT_EQ(cfg->description_sources[0].weight, 3);
  EXPECT_EQ(cfg->description_sources[1].path, "/abs/b.jsonl");
  EXPECT_EQ(cfg->filter.keep_top_percentile, 0.5);
  EXPECT_EQ(cfg->filter.dedup_mode, refine::DedupMode::kPerDescription);
  EXPECT_EQ(cfg->work_dir, "/base/runs");
  EXPECT_EQ(cfg->eval_dir, "/base/runs/eval");
  EXPECT_EQ(cfg->profile.top_k, 70);
  EXPECT_EQ(cfg->profile.top_p, 0.85);
  EXPECT_EQ(cfg->profile.temperature, 0.2);
  ASSERT_EQ(cfg->models.size(), 1u);
  EXPECT_EQ(cfg->models[0].params, "7B");
  EXPECT_EQ(cfg->models[0].profile.temperature, 0.5);
  EXPECT_EQ(cfg->models[0].profile.top_k, 70);
}

TEST(RunConfigTest, Errors) {
  auto bad = [](const std::string& text) {
    auto kv = ParseFlatConfig("description_sources = [\"a.jsonl\"]\n" + text);
    if (!kv.ok()) return true;
    return !RunConfigFromFlat(*kv, "/base").ok();
  };
  EXPECT_FALSE(bad(""));
  EXPECT_TRUE(bad("mystery_key = 1\n"));
  EXPECT_TRUE(bad("samples_per_iteration = \"many\"\n"));
  EXPECT_TRUE(bad("source_weights = [1, 2]\n"));
  EXPECT_TRUE(bad("mode = \"rl\"\n"));
  EXPECT_TRUE(bad("pair_mode = \"random\"\n"));
  EXPECT_TRUE(bad("workers = 0\n"));
  EXPECT_TRUE(bad("percentile_thresh = 0\n"));
  EXPECT_TRUE(bad("top_p = 1.5\n"));
  EXPECT_TRUE(bad("template.generation = \"no slot\"\n"));
  EXPECT_TRUE(bad("dedup_mode = \"global\"\n"));
  EXPECT_TRUE(bad("models = [\"m\"]\nmodel.m.top_k = 0\n"));
  EXPECT_FALSE(LoadRunConfig("/nonexistent/refinery.toml").ok());
}

TEST(RunConfigTest, AdapterErrorsSurfaceEarly) {
  RunConfig cfg;
  cfg.generator.kind = "scripted";
  cfg.generator.script = "/nonexistent/script.jsonl";
  EXPECT_EQ(MakeAdapters(cfg).status().code(), absl::StatusCode::kNotFound);
  cfg.generator.kind = "carrier-pigeon";
  EXPECT_FALSE(MakeAdapters(cfg).ok());
  cfg.generator = GeneratorSpec{};
  cfg.compiler.kind = "external";
  EXPECT_FALSE(MakeAdapters(cfg).ok());
  cfg.compiler = CompilerSpec{};
  EXPECT_TRUE(MakeAdapters(cfg).ok());
}

TEST(RunConfigTest, SnapshotCarriesTemplateDigest) {
  RunConfig cfg;
  const auto j = ToJson(cfg);
  EXPECT_EQ(j["template_digest"], scoring::PromptTemplates::Defaults().Digest());
  EXPECT_EQ(j["filter"]["percentile_thresh"], 0.5);
}

std::vector<DescriptionRecord> Records(const std::string& prefix, int n) {
  std::vector<DescriptionRecord> out;
  for (int i = 0; i < n; ++i) {
    out.push_back({prefix + std::to_string(i), "description " + std::to_string(i), ""});
  }
  return out;
}

TEST(SamplingTest, RejectsEmptyDraw) {
  const std::vector<double> w = {1.0};
  EXPECT_EQ(SampleDescriptions({Records("a", 5)}, w, 0, 1, 0).status().code(),
            absl::StatusCode::kFailedPrecondition);
  EXPECT_FALSE(SampleDescriptions({}, {}, 3, 1, 0).ok());
}

TEST(SamplingTest, NoRepeatsWithinAPass) {
  const std::vector<double> w = {1.0};
  auto s = SampleDescriptions({Records("a", 50)}, w, 50, 3, 0);
  ASSERT_TRUE(s.ok());
  std::set<std::string> ids;
  for (const auto& x : *s) ids.insert(x.record.description_id);
  EXPECT_EQ(ids.size(), 50u);
  EXPECT_EQ((*s)[0].candidate_id, "it000-000000");
  EXPECT_EQ((*s)[49].candidate_id, "it000-000049");
  auto more = SampleDescriptions({Records("a", 50)}, w, 120, 3, 0);
  std::map<std::string, int> counts;
  for (const auto& x : *more) ++counts[x.record.description_id];
  for (const auto& [id, n] : counts) EXPECT_TRUE(n == 2 || n == 3) << id;
}

TEST(SamplingTest, DeterministicPerSeedAndIteration) {
  const std::vector<double> w = {1.0, 1.0};
  const std::vector<std::vector<DescriptionRecord>> src = {Records("a", 30), Records("b", 30)};
  auto ids = [&](std::uint64_t seed, int it) {
    std::vector<std::string> out;
    for (const auto& x : *SampleDescriptions(src, w, 20, seed, it)) out.push_back(x.record.description_id);
    return out;
  };
  EXPECT_EQ(ids(1, 0), ids(1, 0));
  EXPECT_NE(ids(1, 0), ids(1, 1));
  EXPECT_NE(ids(1, 0), ids(2, 0));
}

TEST(SamplingTest, WeightsBiasSources) {
  const std::vector<double> w = {9.0, 1.0};
  auto s = SampleDescriptions({Records("a", 500), Records("b", 500)}, w, 1000, 5, 0);
  ASSERT_TRUE(s.ok());
  int from_a = 0;
  for (const auto& x : *s) from_a += x.record.description_id[0] == 'a';
  EXPECT_NEAR(from_a / 1000.0, 0.9, 0.03);
}

TEST(DescriptionsTest, LoadValidates) {
  TempDir dir;
  WriteFile(dir / "ok.jsonl",
            "{\"description_id\": \"x\", \"description\": \"a list\", \"ground_truth\": "
            "\"Screen {\\n}\\n\"}\n");
  auto ok = LoadDescriptions(dir / "ok.jsonl");
  ASSERT_TRUE(ok.ok());
  EXPECT_EQ((*ok)[0].ground_truth, "Screen {\n}\n");
  WriteFile(dir / "dup.jsonl",
            "{\"description_id\": \"x\", \"description\": \"a\"}\n"
            "{\"description_id\": \"x\", \"description\": \"b\"}\n");
  EXPECT_FALSE(LoadDescriptions(dir / "dup.jsonl").ok());
  EXPECT_FALSE(LoadDescriptions(dir / "missing.jsonl").ok());
}

RunConfig LoadE2e(const TempDir& dir, bool clustered, const std::string& extra = "") {
  const auto fx = BuildE2eFixture(dir.path(), clustered, extra);
  auto cfg = LoadRunConfig(fx.config_path);
  EXPECT_TRUE(cfg.ok()) << cfg.status();
  return *cfg;
}

TEST(IterationTest, EndToEndCounts) {
  TempDir dir;
  const auto fx = BuildE2eFixture(dir.path(), false);
  auto cfg = LoadRunConfig(fx.config_path);
  ASSERT_TRUE(cfg.ok()) << cfg.status();
  auto m = RunIteration(*cfg, 0);
  ASSERT_TRUE(m.ok()) << m.status();
  const auto& c = m->counts;
  EXPECT_EQ(c.sampled, 100);
  EXPECT_EQ(c.generated, 100);
  EXPECT_EQ(c.generation_failed, 0);
  EXPECT_EQ(c.compiled, 37);
  EXPECT_EQ(c.rendered, 37);
  EXPECT_EQ(c.scored, 37);
  EXPECT_EQ(c.passed_min, 37);
  EXPECT_EQ(c.passed_percentile, 19);
  EXPECT_EQ(c.after_dedup, E2eExpectedAfterDedup(fx, 50, 1e-9, 2));
  EXPECT_EQ(c.after_dedup, 19);
  EXPECT_TRUE(c.ChainHolds());

  const auto iter_dir = IterationDir(cfg->work_dir, 0);
  auto shard = store::ReadJsonLines(iter_dir / "refined.jsonl");
  ASSERT_TRUE(shard.ok());
  ASSERT_EQ(shard->size(), 19u);
  for (const char* key : {"candidate_id", "description", "source_ref", "combined", "text_sim",
                          "visual_sim", "iteration"}) {
    EXPECT_TRUE((*shard)[0].contains(key)) << key;
  }
  EXPECT_EQ(m->shard_refs.size(), 1u);
  auto on_disk = ManifestFromJson(nlohmann::json::parse(ReadFile(iter_dir / "manifest.json")));
  ASSERT_TRUE(on_disk.ok());
  EXPECT_EQ(on_disk->counts.after_dedup, 19);
}

TEST(IterationTest, ClusteredDedupMatchesOracle) {
  TempDir dir;
  const auto fx = BuildE2eFixture(dir.path(), true, "percentile_thresh = 100\n");
  auto cfg = LoadRunConfig(fx.config_path);
  ASSERT_TRUE(cfg.ok());
  auto m = RunIteration(*cfg, 0);
  ASSERT_TRUE(m.ok()) << m.status();
  const int expected = E2eExpectedAfterDedup(fx, 100, 0.25, 2);
  EXPECT_LT(expected, 37);
  EXPECT_EQ(m->counts.after_dedup, expected);
}

TEST(IterationTest, SameSeedSameShard) {
  TempDir a, b;
  auto ma = RunIteration(LoadE2e(a, false), 0);
  auto mb = RunIteration(LoadE2e(b, false), 0);
  ASSERT_TRUE(ma.ok() && mb.ok());
  EXPECT_EQ(ma->shard_refs[0].key, mb->shard_refs[0].key);
  EXPECT_EQ(ToJson(ma->counts), ToJson(mb->counts));
}

TEST(IterationTest, RerunIsIdempotent) {
  TempDir dir;
  const RunConfig cfg = LoadE2e(dir, false);
  auto first = RunIteration(cfg, 0);
  auto second = RunIteration(cfg, 0);
  ASSERT_TRUE(first.ok() && second.ok());
  EXPECT_EQ(first->shard_refs[0].key, second->shard_refs[0].key);
}

TEST(IterationTest, ResumesAfterCrash) {
  TempDir clean_dir, crash_dir;
  auto clean = RunIteration(LoadE2e(clean_dir, false), 0);
  ASSERT_TRUE(clean.ok());

  const RunConfig cfg = LoadE2e(crash_dir, false);
  const pid_t pid = fork();
  ASSERT_GE(pid, 0);
  if (pid == 0) {
    IterationHooks hooks;
    hooks.exit_after_jobs = 60;
    (void)RunIteration(cfg, 0, hooks);
    _exit(0);  // only reached if the hook never fired
  }
  int status = 0;
  ASSERT_EQ(waitpid(pid, &status, 0), pid);
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 86);
  EXPECT_FALSE(std::filesystem::exists(IterationDir(cfg.work_dir, 0) / "manifest.json"));

  auto resumed = RunIteration(cfg, 0);
  ASSERT_TRUE(resumed.ok()) << resumed.status();
  EXPECT_EQ(resumed->shard_refs[0].key, clean->shard_refs[0].key);
  EXPECT_EQ(ToJson(resumed->counts), ToJson(clean->counts));
}

TEST(IterationTest, TrainerHookReceivesShard) {
  TempDir dir;
  const RunConfig cfg =
      LoadE2e(dir, false, "trainer_hook = \"wc -l < {shard} > hook.out; exit 3\"\n");
  const auto cwd = std::filesystem::current_path();
  std::filesystem::current_path(dir.path());
  auto m = RunIteration(cfg, 0);
  std::filesystem::current_path(cwd);
  ASSERT_TRUE(m.ok());
  EXPECT_EQ(m->trainer_exit_code, 3);
  EXPECT_EQ(std::stoi(ReadFile(dir / "hook.out")), 19);
}

TEST(IterationTest, TransientFaultsAreRetried) {
  TempDir dir;
  const auto fx = BuildE2eFixture(dir.path(), false, "max_attempts = 1\n");
  // Replace one completion with a timeout fault.
  auto lines = *store::ReadJsonLines(dir / "script.jsonl");
  lines[1].erase("completion");
  lines[1]["fault"] = "timeout";
  lines[2].erase("completion");
  lines[2]["fault"] = "empty";
  WriteFile(dir / "script.jsonl", store::ToJsonLines(lines));
  auto cfg = LoadRunConfig(fx.config_path);
  auto m = RunIteration(*cfg, 0);
  ASSERT_TRUE(m.ok()) << m.status();
  EXPECT_EQ(m->counts.generation_failed, 2);
  EXPECT_EQ(m->counts.generated, 98);
  EXPECT_TRUE(m->counts.ChainHolds());
}

TEST(IterationTest, PreferenceMode) {
  TempDir dir;
  const RunConfig cfg = LoadE2e(dir, false, "mode = \"prefs\"\nsamples_per_iteration = 10\n");
  auto m = RunIteration(cfg, 2);
  ASSERT_TRUE(m.ok()) << m.status();
  EXPECT_EQ(m->mode, "prefs");
  EXPECT_EQ(m->counts.sampled, 10);
  EXPECT_EQ(m->counts.generated, 100);  // 10 profiles each
  EXPECT_EQ(m->counts.preference_pairs, 90);  // adjacent: n - 1 per description
  const auto dir2 = IterationDir(cfg.work_dir, 2);
  auto top = store::ReadJsonLines(dir2 / "top.jsonl");
  ASSERT_TRUE(top.ok());
  EXPECT_EQ(static_cast<int>(top->size()), m->counts.top_records);
  auto prefs = store::ReadJsonLines(dir2 / "preferences.jsonl");
  ASSERT_TRUE(prefs.ok());
  ASSERT_EQ(prefs->size(), 90u);
  for (const char* key : {"description", "chosen_source_ref", "rejected_source_ref", "margin_kind"}) {
    EXPECT_TRUE((*prefs)[0].contains(key)) << key;
  }
  EXPECT_EQ(m->shard_refs.size(), 2u);
}

std::string Script(const std::vector<std::string>& descs, const std::string& program) {
  std::string out;
  for (const auto& d : descs) {
    out += nlohmann::json{{"prompt", *scoring::BuildGenerationPrompt(d)},
                          {"profile_id", "*"},
                          {"completion", program}}
               .dump() +
           "\n";
  }
  return out;
}

std::string EvalConfig(const TempDir& dir, int n, const std::string& extra = "") {
  std::vector<std::string> descs;
  std::string set;
  for (int i = 0; i < n; ++i) {
    descs.push_back("eval screen " + std::to_string(i) + " with photos");
    set += nlohmann::json{{"description_id", "e" + std::to_string(i)}, {"description", descs.back()}}
               .dump() +
           "\n";
  }
  WriteFile(dir / "eval.jsonl", set);
  WriteFile(dir / "good.jsonl", Script(descs, "Screen {\n  Text \"photos\"\n}\n"));
  WriteFile(dir / "bad.jsonl", Script(descs, "Screen {\n  Carousel \"photos\"\n}\n"));
  WriteFile(dir / "eval.toml",
            "description_sources = [\"eval.jsonl\"]\n"
            "eval_set = \"eval.jsonl\"\n"
            "models = [\"good\", \"bad\"]\n"
            "model.good.params = \"15B\"\n"
            "model.good.generator = \"scripted\"\n"
            "model.good.generator_script = \"good.jsonl\"\n"
            "model.bad.generator = \"scripted\"\n"
            "model.bad.generator_script = \"bad.jsonl\"\n" +
                extra);
  return (dir / "eval.toml").string();
}

TEST(EvalTest, TwoModels) {
  TempDir dir;
  auto cfg = LoadRunConfig(EvalConfig(dir, 200, "snapshot_iteration = 4\nsnapshot_model = \"good\"\n"));
  ASSERT_TRUE(cfg.ok()) << cfg.status();
  auto report = RunEval(*cfg);
  ASSERT_TRUE(report.ok()) << report.status();
  EXPECT_TRUE(report->warnings.empty());
  ASSERT_EQ(report->models.size(), 2u);
  const auto& good = report->models[0];
  const auto& bad = report->models[1];
  EXPECT_EQ(good.compile_rate, 1.0);
  EXPECT_EQ(bad.compile_rate, 0.0);
  EXPECT_EQ(bad.mean_relevance, 0.0);
  EXPECT_GT(*good.mean_relevance, 0.0);
  ASSERT_EQ(report->auto_matches.size(), 200u);
  for (const auto& m : report->auto_matches) {
    EXPECT_EQ(m.model_a, "bad");
    EXPECT_EQ(m.outcome, arena::Outcome::kBWins);
  }
  auto replay = arena::Replay(report->auto_matches);
  EXPECT_EQ(good.elo, replay->rating("good"));
  EXPECT_GT(good.elo, 1000);
  EXPECT_NEAR(good.elo + bad.elo, 2000, 1e-9);

  const std::string table = FormatResultsTable(*report);
  EXPECT_EQ(table.substr(0, table.find('\n')), "| Model | Params | Compile | CLIP | Elo |");
  EXPECT_NE(table.find("| good | 15B | 1.000 |"), std::string::npos);
  for (const char* f : {"entries.jsonl", "matches.jsonl", "results.md", "summary.json"}) {
    EXPECT_TRUE(std::filesystem::exists(cfg->eval_dir / f)) << f;
  }
  auto snap = nlohmann::json::parse(ReadFile(IterationDir(cfg->work_dir, 4) / kEvalSnapshotFile));
  EXPECT_EQ(snap["compile_rate"], 1.0);
}

TEST(EvalTest, WarnsOnNonStandardSetSize) {
  TempDir dir;
  auto cfg = LoadRunConfig(EvalConfig(dir, 12));
  ASSERT_TRUE(cfg.ok());
  auto report = RunEval(*cfg);
  ASSERT_TRUE(report.ok());
  ASSERT_EQ(report->warnings.size(), 1u);
  EXPECT_NE(report->warnings[0].find("12"), std::string::npos);
  EXPECT_EQ(report->eval_set_size, 12);
}

TEST(EvalTest, IncompleteModelIsReported) {
  TempDir dir;
  auto cfg = LoadRunConfig(EvalConfig(dir, 5));
  ASSERT_TRUE(cfg.ok());
  auto lines = *store::ReadJsonLines(dir / "bad.jsonl");
  lines[3].erase("completion");
  lines[3]["fault"] = "timeout";
  WriteFile(dir / "bad.jsonl", store::ToJsonLines(lines));
  auto report = RunEval(*cfg);
  ASSERT_TRUE(report.ok()) << report.status();
  EXPECT_FALSE(report->models[1].complete);
  EXPECT_FALSE(report->models[1].compile_rate.has_value());
  EXPECT_TRUE(report->auto_matches.empty());
  EXPECT_NE(FormatResultsTable(*report).find("n/a"), std::string::npos);
}

TEST(TimeseriesTest, EchoesSnapshotsWithNulls) {
  std::vector<IterationManifest> ms(5);
  const std::vector<double> rates = {0.03, 0.4, 0.6, 0.79};
  std::map<int, EvalSnapshot> snaps;
  for (int i = 0; i < 5; ++i) {
    ms[i].iteration = 4 - i;  // out of order on purpose
    ms[i].counts.after_dedup = 10 * (4 - i);
  }
  for (int i = 0; i < 4; ++i) {
    if (i == 2) continue;
    snaps[i] = {rates[i], rates[i] / 2};
  }
  const auto rows = ReportTimeseries(ms, snaps);
  ASSERT_EQ(rows.size(), 5u);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(rows[i].iteration, i);
    EXPECT_EQ(rows[i].mined_count, 10 * i);
    if (i == 2 || i == 4) {
      EXPECT_FALSE(rows[i].compile_rate.has_value());
    } else {
      EXPECT_EQ(rows[i].compile_rate, rates[i]);
    }
  }
  const std::string tsv = FormatTimeseries(rows);
  EXPECT_EQ(tsv,
            "iteration\tcompile_rate\tmean_relevance\tmined_count\n"
            "0\t0.03\t0.015\t0\n"
            "1\t0.4\t0.2\t10\n"
            "2\tnull\tnull\t20\n"
            "3\t0.79\t0.395\t30\n"
            "4\tnull\tnull\t40\n");
}

TEST(TimeseriesTest, LoadsFromRunsDir) {
  TempDir dir;
  EXPECT_EQ(LoadTimeseries(dir / "none").status().code(), absl::StatusCode::kNotFound);
  EXPECT_EQ(LoadTimeseries(dir.path()).status().code(), absl::StatusCode::kNotFound);
  for (int i : {0, 1}) {
    IterationManifest m;
    m.iteration = i;
    m.counts.after_dedup = i + 5;
    WriteFile(IterationDir(dir.path(), i) / "manifest.json", ToJson(m).dump());
  }
  WriteFile(IterationDir(dir.path(), 1) / kEvalSnapshotFile,
            "{\"compile_rate\": 0.4, \"mean_relevance\": 0.2}");
  auto rows = LoadTimeseries(dir.path());
  ASSERT_TRUE(rows.ok()) << rows.status();
  ASSERT_EQ(rows->size(), 2u);
  EXPECT_FALSE((*rows)[0].compile_rate);
  EXPECT_EQ((*rows)[1].compile_rate, 0.4);
  EXPECT_EQ((*rows)[1].mined_count, 6);
}

TEST(ManifestTest, RoundTrip) {
  IterationManifest m;
  m.iteration = 3;
  m.mode = "prefs";
  m.counts.generated = 9;
  m.counts.top_records = 2;
  m.shard_refs.push_back(store::MakeBlobRef("x", store::MediaKind::kDatasetShard));
  m.shard_paths.push_back("top.jsonl");
  m.trainer_exit_code = 0;
  auto back = ManifestFromJson(ToJson(m));
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(ToJson(*back), ToJson(m));
}

}  // namespace
}  // namespace refinery::orchestrator
