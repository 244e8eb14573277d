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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "refinery/adapters/miniui.h"
#include "refinery/arena/elo.h"
#include "refinery/arena/evaluation.h"
#include "refinery/orchestrator/config.h"
#include "refinery/orchestrator/iteration.h"
#include "refinery/prefs/prefs.h"
#include "refinery/refine/dbscan.h"
#include "refinery/refine/filters.h"
#include "refinery/repair/repair.h"
#include "refinery/scoring/prompts.h"
#include "refinery/scoring/relevance.h"
#include "refinery/store/dataset.h"
#include "refinery/store/job_queue.h"
#include "spdlog/spdlog.h"
#include "testing/e2e_fixture.h"
#include "testing/fixtures.h"
#include "testing/oracles.h"

namespace refinery {
namespace {

using namespace std::chrono_literals;
using ::refinery::testing::TempDir;

// Collects failures for one criterion.
class Check {
 public:
  void Expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  void Note(std::string note) { note_ = std::move(note); }

  bool ok() const { return failed_ == 0; }
  std::string Summary() const {
    std::string s = note_;
    for (const auto& f : failures_) s += (s.empty() ? "" : "; ") + f;
    if (failed_ > static_cast<int>(failures_.size())) {
      s += "; +" + std::to_string(failed_ - failures_.size()) + " more";
    }
    return s;
  }

 private:
  int failed_ = 0;
  std::vector<std::string> failures_;
  std::string note_;
};

struct Criterion {
  std::string name;
  double budget_s;  // 0 for no runtime bound
  std::function<void(Check&)> run;
};

std::string Sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1e", x);
  return buf;
}

std::string CandidateId(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "c%04d", i);
  return buf;
}

// ---------------------------------------------------------------------------
// Elo.

arena::MatchRecord Match(int i, std::string a, std::string b, arena::Outcome o) {
  arena::MatchRecord m;
  m.match_id = "m" + std::to_string(i);
  m.description_id = "d";
  m.model_a = std::move(a);
  m.model_b = std::move(b);
  m.outcome = o;
  return m;
}

void EloAlgebra(Check& check) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> rating(0, 3000);
  double worst = 0;
  for (int i = 0; i < 100000; ++i) {
    const double a = rating(rng), b = rating(rng);
    worst = std::max(worst, std::abs(arena::ExpectedScore(a, b) + arena::ExpectedScore(b, a) - 1));
  }
  check.Expect(worst <= 1e-12, "expected-score symmetry off by " + Sci(worst));

  const std::vector<std::string> models = {"m0", "m1", "m2", "m3", "m4", "m5"};
  std::vector<arena::MatchRecord> log;
  for (int i = 0; i < 10000; ++i) {
    const auto a = rng() % models.size();
    const auto b = (a + 1 + rng() % (models.size() - 1)) % models.size();
    log.push_back(Match(i, models[a], models[b], static_cast<arena::Outcome>(rng() % 3)));
  }
  auto first = arena::Replay(log);
  auto second = arena::Replay(log);
  if (!first.ok() || !second.ok()) {
    check.Expect(false, "replay failed");
    return;
  }
  double sum = 0;
  for (const auto& [m, r] : first->ratings()) sum += r;
  const double drift = std::abs(sum - 1000.0 * static_cast<double>(models.size()));
  check.Expect(drift < 1e-9, "rating sum drifted by " + Sci(drift));
  bool identical = first->ratings().size() == second->ratings().size();
  for (const auto& [m, r] : first->ratings()) {
    const double other = second->rating(m);
    identical = identical && std::memcmp(&r, &other, sizeof(double)) == 0;
  }
  check.Expect(identical, "replays differ");
  check.Note("symmetry err " + Sci(worst) + ", zero-sum drift " + Sci(drift));
}

void EloRecovery(Check& check) {
  const std::vector<std::string> models = {"m1200", "m1100", "m1000", "m900"};
  const double truth[] = {1200, 1100, 1000, 900};
  int recovered = 0, recovered_sequential = 0;
  auto ordered = [&](auto rating) {
    for (std::size_t i = 0; i + 1 < models.size(); ++i) {
      if (!(rating(models[i]) > rating(models[i + 1]))) return false;
    }
    return true;
  };
  for (int trial = 0; trial < 100; ++trial) {
    std::mt19937_64 rng(5000 + trial);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<arena::MatchRecord> log;
    for (int i = 0; i < 5000; ++i) {
      const int a = static_cast<int>(rng() % 4);
      const int b = (a + 1 + static_cast<int>(rng() % 3)) % 4;
      const double e = testing::OracleExpected(truth[a], truth[b]);
      log.push_back(Match(i, models[a], models[b],
                          u(rng) < e ? arena::Outcome::kAWins : arena::Outcome::kBWins));
    }
    auto avg = arena::ReplayShuffledAverage(log, 20, trial);
    auto seq = arena::Replay(log);
    if (!avg.ok() || !seq.ok()) {
      check.Expect(false, "replay failed");
      return;
    }
    if (ordered([&](const std::string& m) { return avg->at(m); })) ++recovered;
    if (ordered([&](const std::string& m) { return seq->rating(m); })) ++recovered_sequential;
  }
  check.Expect(recovered >= 95, "order recovered in " + std::to_string(recovered) + "/100");
  check.Note("shuffled-average order recovered " + std::to_string(recovered) +
             "/100 (single sequential pass " + std::to_string(recovered_sequential) + "/100)");
}

// ---------------------------------------------------------------------------
// Auto outcomes.

arena::EvalEntry Entry(std::string model, bool compiles) {
  arena::EvalEntry e;
  e.model_id = std::move(model);
  e.description_id = "d1";
  e.description = "a login screen";
  e.source_ref = store::MakeBlobRef(e.model_id, store::MediaKind::kProgramSource);
  e.outcome.success = compiles;
  e.outcome.total_lines = 3;
  if (compiles) {
    e.render_ref = store::MakeBlobRef("r" + e.model_id, store::MediaKind::kRenderArtifact);
    e.combined_score = 0.3;
  } else {
    e.outcome.diagnostics.push_back({1, std::nullopt, "E_ROOT", "x", adapters::Severity::kError});
  }
  return e;
}

void AutoOutcomes(Check& check) {
  struct Row {
    bool a, b;
    std::optional<arena::Outcome> expected;  // none: needs a human
  };
  const Row table[] = {{true, true, std::nullopt},
                       {true, false, arena::Outcome::kAWins},
                       {false, true, arena::Outcome::kBWins},
                       {false, false, arena::Outcome::kTie}};
  for (const auto& row : table) {
    const std::string label = std::string(row.a ? "compile" : "fail") + "/" +
                              (row.b ? "compile" : "fail");
    auto got = arena::AutoOutcome(Entry("ma", row.a), Entry("mb", row.b));
    if (!got.ok()) {
      check.Expect(false, label + ": " + std::string(got.status().message()));
      continue;
    }
    check.Expect(got->has_value() == row.expected.has_value(), label + ": human/auto mismatch");
    if (got->has_value() && row.expected) {
      check.Expect((*got)->outcome == *row.expected, label + ": wrong outcome");
      check.Expect((*got)->source == arena::MatchSource::kAutoCompile, label + ": wrong source");
      check.Expect(!(*got)->rater_id.has_value(), label + ": auto match carries a rater");
    }
  }
}

// ---------------------------------------------------------------------------
// DBSCAN and score filter.

void DbscanOracle(Check& check) {
  std::mt19937_64 rng(303);
  int compared = 0;
  for (int instance = 0; instance < 50; ++instance) {
    const std::size_t n = 1 + rng() % 200;
    const std::size_t dim = 4 + rng() % 13;
    const int centres = 1 + static_cast<int>(rng() % 8);
    const auto raw = testing::ClusteredUnitVectors(n, dim, centres, 0.05 + 0.05 * (rng() % 8), rng);
    std::vector<adapters::EmbeddingVector> vecs;
    for (const auto& v : raw) vecs.push_back({v, 1.0});
    for (double eps : {0.1, 0.25, 0.5}) {
      for (int min_pts : {2, 3}) {
        const auto expected = testing::OracleDbscan(raw, eps, min_pts);
        for (bool parallel : {false, true}) {
          auto got = refine::Dbscan(vecs, {eps, min_pts, parallel});
          check.Expect(got.ok() && *got == expected,
                       "instance " + std::to_string(instance) + " eps " + std::to_string(eps) +
                           " min_pts " + std::to_string(min_pts));
          ++compared;
        }
      }
    }
  }
  check.Note(std::to_string(compared) + " labelings compared");
}

void ScoreFilterOracle(Check& check) {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(0, 1);
  const double percentiles[] = {0.5, 1, 10, 25, 33.3, 50, 66.7, 99.9, 100};
  for (int batch = 0; batch < 100; ++batch) {
    // First batches pin the edge cases: single item, all tied, all below
    // the minimum.
    const int n = batch < 10 ? 1 : 1 + static_cast<int>(rng() % 80);
    const bool all_tied = batch >= 10 && batch < 20;
    refine::FilterConfig cfg;
    cfg.min_text_sim = batch >= 20 && batch < 25 ? 2.0 : std::round(u(rng) * 6) / 10;
    cfg.min_visual_sim = std::round(u(rng) * 10) / 10;
    cfg.keep_top_percentile = percentiles[rng() % std::size(percentiles)];
    std::vector<refine::Candidate> cs;
    std::vector<testing::OracleScored> os;
    for (int i = 0; i < n; ++i) {
      const double t = all_tied ? 0.5 : std::round(u(rng) * 10) / 10;
      const bool has_v = all_tied || rng() % 2;
      const double v = all_tied ? 0.8 : std::round(u(rng) * 10) / 10;
      refine::Candidate c;
      c.candidate_id = CandidateId(static_cast<int>(rng() % 10000) * 100 + i);
      c.description_id = "d";
      c.outcome.success = true;
      c.outcome.total_lines = 1;
      c.score = scoring::Combine(t, has_v ? std::optional(v) : std::nullopt);
      os.push_back({c.candidate_id, t, has_v, v, c.score->combined});
      cs.push_back(std::move(c));
    }
    auto got = refine::ScoreFilter(cs, cfg);
    if (!got.ok()) {
      check.Expect(false, "batch " + std::to_string(batch) + ": " + got.status().ToString());
      continue;
    }
    std::vector<std::string> ids;
    for (const auto& c : got->kept) ids.push_back(c.candidate_id);
    check.Expect(ids == testing::OracleScoreFilter(os, cfg.min_text_sim, cfg.min_visual_sim,
                                                   cfg.keep_top_percentile),
                 "batch " + std::to_string(batch));
  }
}

// ---------------------------------------------------------------------------
// Ranking law.

double OracleErrorFraction(const adapters::CompileOutcome& o) {
  if (o.total_lines <= 0) return 0.0;
  std::set<int> lines;
  for (const auto& d : o.diagnostics) {
    if (d.is_error()) lines.insert(d.line);
  }
  return 1.0 - static_cast<double>(lines.size()) / o.total_lines;
}

void RankingLaw(Check& check) {
  std::mt19937_64 rng(505);
  for (int set = 0; set < 1000; ++set) {
    const int n = 1 + static_cast<int>(rng() % 10);
    std::map<std::string, refine::Candidate> by_id;
    std::vector<refine::Candidate> cs;
    for (int i = 0; i < n; ++i) {
      refine::Candidate c;
      c.candidate_id = CandidateId(i);
      c.description_id = "d";
      c.outcome.total_lines = static_cast<int>(rng() % 8);
      if (c.outcome.total_lines > 0 && rng() % 2) {
        c.outcome.success = true;
        c.score = scoring::Combine(static_cast<double>(rng() % 5) / 4, std::nullopt);
      } else {
        const int errors = static_cast<int>(rng() % 4);
        for (int e = 0; e < errors; ++e) {
          c.outcome.diagnostics.push_back({1 + static_cast<int>(rng() % 8), std::nullopt, "E", "e",
                                           adapters::Severity::kError});
        }
        if (rng() % 3 == 0) {
          c.outcome.diagnostics.push_back({1, std::nullopt, "W", "w", adapters::Severity::kWarning});
        }
      }
      by_id[c.candidate_id] = c;
      cs.push_back(std::move(c));
    }
    std::shuffle(cs.begin(), cs.end(), rng);
    auto ranked = prefs::RankCandidates(cs);
    if (!ranked.ok() || static_cast<int>(ranked->ordered.size()) != n) {
      check.Expect(false, "set " + std::to_string(set) + ": ranking failed");
      continue;
    }
    std::set<std::string> seen(ranked->ordered.begin(), ranked->ordered.end());
    check.Expect(static_cast<int>(seen.size()) == n, "set " + std::to_string(set) + ": not a permutation");
    for (int i = 0; i + 1 < n; ++i) {
      const auto& a = by_id.at(ranked->ordered[i]);
      const auto& b = by_id.at(ranked->ordered[i + 1]);
      const std::string where = "set " + std::to_string(set) + " pos " + std::to_string(i);
      check.Expect(a.compiles() || !b.compiles(), where + ": compile dominance");
      if (a.compiles() && b.compiles()) {
        check.Expect(a.score->combined >= b.score->combined, where + ": score order");
      }
      if (!a.compiles() && !b.compiles()) {
        check.Expect(OracleErrorFraction(a.outcome) >= OracleErrorFraction(b.outcome),
                     where + ": error-fraction order");
      }
    }
    if (n >= 2) {
      const auto size = [&](prefs::PairMode m) {
        return static_cast<int>(prefs::ToPreferencePairs(*ranked, m).size());
      };
      check.Expect(size(prefs::PairMode::kAdjacent) == n - 1, "adjacent count");
      check.Expect(size(prefs::PairMode::kTopVsRest) == n - 1, "top_vs_rest count");
      check.Expect(size(prefs::PairMode::kAllOrdered) == n * (n - 1) / 2, "all_ordered count");
    }
  }
  // Pair counts for every set size, independent of the random draw.
  for (int n = 2; n <= 10; ++n) {
    std::vector<refine::Candidate> cs;
    for (int i = 0; i < n; ++i) {
      refine::Candidate c;
      c.candidate_id = CandidateId(i);
      c.outcome.success = true;
      c.outcome.total_lines = 1;
      c.score = scoring::Combine(0.1 * i, std::nullopt);
      cs.push_back(std::move(c));
    }
    const auto ranked = *prefs::RankCandidates(cs);
    const auto top = prefs::ToPreferencePairs(ranked, prefs::PairMode::kTopVsRest);
    check.Expect(static_cast<int>(top.size()) == n - 1, "top_vs_rest n=" + std::to_string(n));
    for (const auto& p : top) check.Expect(p.chosen == ranked.ordered[0], "top_vs_rest chosen");
    check.Expect(static_cast<int>(prefs::ToPreferencePairs(ranked, prefs::PairMode::kAdjacent)
                                      .size()) == n - 1,
                 "adjacent n=" + std::to_string(n));
    check.Expect(static_cast<int>(prefs::ToPreferencePairs(ranked, prefs::PairMode::kAllOrdered)
                                      .size()) == n * (n - 1) / 2,
                 "all_ordered n=" + std::to_string(n));
  }
}

// ---------------------------------------------------------------------------
// Error-free fraction on a crafted corpus.

void ErrorFreeFractionCorpus(Check& check) {
  struct Program {
    const char* source;
    int total_lines;
    int error_lines;  // distinct lines carrying an error diagnostic
  };
  const Program corpus[] = {
      // Clean.
      {"Screen {\n  Text \"a\"\n}\n", 3, 0},
      // Unknown component on line 2.
      {"Screen {\n  Foo\n}\n", 3, 1},
      // Missing '}': reported at the opening line.
      {"Screen {\n  Text \"a\"\n  Button \"b\"\n", 3, 1},
      // Missing root on line 1.
      {"VStack {\n  Text \"a\"\n}\n", 3, 1},
      // Bare word after a leaf.
      {"Screen {\n  Text hello\n  Button \"x\"\n  Image \"y\"\n}\n", 5, 1},
      // Stray character on line 2, unknown component on line 3.
      {"Screen {\n  Text \"a\" $\n  Foo\n  Text \"b\"\n}\n", 5, 2},
      // Two unknown components on one line count once.
      {"Screen {\n  Foo Bar\n}\n", 3, 1},
      // Warnings only.
      {"Screen {\n  VStack {\n  }\n  Text \"\"\n}\n", 5, 0},
      // Unterminated string.
      {"Screen {\n  Text \"open\n}\n", 3, 1},
      // Extra '}' on line 4.
      {"Screen {\n  Text \"a\"\n}\n}\n", 4, 1},
      // Stray string literal.
      {"Screen {\n  \"stray\"\n  Spacer\n  Spacer\n}\n", 5, 1},
      // Blank lines count towards the total.
      {"Screen {\n\n  Foo\n\n}\n", 5, 1},
      // No trailing newline.
      {"Screen {\n  Foo\n}", 3, 1},
      // Comment line, three bad lines inside a stack.
      {"// header\nScreen {\n  VStack {\n    Text \"a\"\n    Foo\n    Bar\n    Baz\n  }\n"
       "  Spacer\n}\n",
       10, 3},
      // Nested root.
      {"Screen {\n  Screen {\n    Text \"a\"\n  }\n}\n", 5, 1},
      // Container without its brace.
      {"Screen {\n  VStack\n  Text \"a\"\n  Image \"i\"\n  Spacer\n  Spacer\n}\n", 7, 1},
      // Root without its brace: reported at the next token.
      {"Screen\n  Text \"a\"\n", 2, 1},
      // Leaf followed by a component name.
      {"Screen {\n  Button\n  Text \"a\"\n}\n", 4, 1},
      // Missing root plus an unclosed stack.
      {"Text \"a\"\nVStack {\n  Spacer\n", 3, 2},
      // Every line is wrong.
      {"Foo\n", 1, 1},
  };
  adapters::miniui::MiniUiCompiler compiler;
  int index = 0;
  for (const auto& p : corpus) {
    const std::string where = "program " + std::to_string(index++);
    auto outcome = compiler.Compile(p.source);
    if (!outcome.ok()) {
      check.Expect(false, where + ": compile call failed");
      continue;
    }
    check.Expect(outcome->total_lines == p.total_lines, where + ": line count");
    check.Expect(outcome->success == (p.error_lines == 0), where + ": success flag");
    auto fraction = scoring::ErrorFreeFraction(*outcome);
    const double expected = 1.0 - static_cast<double>(p.error_lines) / p.total_lines;
    check.Expect(fraction.ok() && *fraction == expected,
                 where + ": fraction " + (fraction.ok() ? std::to_string(*fraction) : "error") +
                     ", expected " + std::to_string(expected));
  }
}

// ---------------------------------------------------------------------------
// Repair soundness.

// Deletes the second character of the first component name on `line`.
std::string Misspell(const std::string& line) {
  const auto start = line.find_first_not_of(' ');
  std::string out = line;
  out.erase(start + 1, 1);
  return out;
}

void RepairSoundness(Check& check) {
  adapters::miniui::MiniUiCompiler compiler;
  const auto rules = repair::DefaultMiniUiRules();
  std::mt19937_64 rng(606);
  int faulty = 0, repaired = 0, regressions = 0, clean = 0;

  auto run = [&](const std::string& source, bool expect_clean) {
    auto before = compiler.Compile(source);
    auto result = repair::ApplyRepairs(source, rules, compiler);
    if (!before.ok() || !result.ok()) {
      check.Expect(false, "repair call failed");
      return;
    }
    auto after = compiler.Compile(result->source);
    if (expect_clean) {
      ++clean;
      if (result->source != source || !after->success) ++regressions;
      return;
    }
    ++faulty;
    if (after->success) ++repaired;
    std::set<int> referenced;
    for (const auto& d : before->diagnostics) referenced.insert(d.line);
    const auto in = adapters::SplitLines(source);
    const auto out = adapters::SplitLines(result->source);
    check.Expect(out.size() >= in.size(), "repair removed lines");
    for (std::size_t i = 0; i < std::min(in.size(), out.size()); ++i) {
      if (in[i] != out[i]) {
        check.Expect(referenced.contains(static_cast<int>(i) + 1),
                     "unreferenced line " + std::to_string(i + 1) + " modified:\n" + source);
      }
    }
  };

  for (int program = 0; program < 200; ++program) {
    const std::string source = testing::RandomMiniUi(rng, 3);
    run(source, true);
    const auto lines = adapters::SplitLines(source);

    std::vector<std::size_t> braces, components;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto first = lines[i].find_first_not_of(' ');
      if (lines[i].substr(first) == "}") {
        braces.push_back(i);
      } else if (i > 0) {
        components.push_back(i);
      }
    }
    auto brace_fault = lines;
    brace_fault.erase(brace_fault.begin() + static_cast<long>(braces[rng() % braces.size()]));
    run(adapters::JoinLines(brace_fault, true), false);

    auto name_fault = lines;
    const std::size_t target = components[rng() % components.size()];
    name_fault[target] = Misspell(name_fault[target]);
    run(adapters::JoinLines(name_fault, true), false);
  }
  const double rate = static_cast<double>(repaired) / faulty;
  check.Expect(rate >= 0.9, "repair rate " + std::to_string(rate));
  check.Expect(regressions == 0, std::to_string(regressions) + " regressions");
  check.Note(std::to_string(repaired) + "/" + std::to_string(faulty) + " faulty repaired, " +
             std::to_string(regressions) + "/" + std::to_string(clean) + " clean regressed");
}

// ---------------------------------------------------------------------------
// End-to-end iteration.

std::set<std::string> RecordIds(const orchestrator::RunConfig& cfg) {
  std::set<std::string> ids;
  auto shard = store::ReadJsonLines(orchestrator::IterationDir(cfg.work_dir, 0) / "refined.jsonl");
  if (!shard.ok()) return ids;
  for (const auto& r : *shard) ids.insert(r.dump());
  return ids;
}

void EndToEnd(Check& check) {
  TempDir clean_dir, rerun_dir, crash_dir, cluster_dir;
  const auto fx = testing::BuildE2eFixture(clean_dir.path(), false);
  auto cfg = orchestrator::LoadRunConfig(fx.config_path);
  if (!cfg.ok()) {
    check.Expect(false, cfg.status().ToString());
    return;
  }
  auto clean = orchestrator::RunIteration(*cfg, 0);
  if (!clean.ok()) {
    check.Expect(false, clean.status().ToString());
    return;
  }
  const auto& c = clean->counts;
  check.Expect(c.generated == testing::kE2eGenerations, "generated " + std::to_string(c.generated));
  check.Expect(c.compiled == testing::kE2eCompiling, "compiled " + std::to_string(c.compiled));
  check.Expect(c.passed_percentile == 19, "passed_percentile " + std::to_string(c.passed_percentile));
  const int expected_dedup = testing::E2eExpectedAfterDedup(fx, 50, 1e-9, 2);
  check.Expect(c.after_dedup == expected_dedup, "after_dedup " + std::to_string(c.after_dedup));

  // Clustered fixture: dedup collapses the template copies.
  const auto cfx = testing::BuildE2eFixture(cluster_dir.path(), true);
  auto ccfg = orchestrator::LoadRunConfig(cfx.config_path);
  auto clustered = ccfg.ok() ? orchestrator::RunIteration(*ccfg, 0)
                             : absl::StatusOr<orchestrator::IterationManifest>(ccfg.status());
  const int expected_clustered = testing::E2eExpectedAfterDedup(cfx, 50, 0.25, 2);
  check.Expect(clustered.ok() && clustered->counts.after_dedup == expected_clustered,
               "clustered after_dedup");

  // Same seed in a fresh directory.
  testing::BuildE2eFixture(rerun_dir.path(), false);
  auto rerun_cfg = orchestrator::LoadRunConfig(rerun_dir / "refinery.toml");
  auto rerun = rerun_cfg.ok() ? orchestrator::RunIteration(*rerun_cfg, 0)
                              : absl::StatusOr<orchestrator::IterationManifest>(rerun_cfg.status());
  check.Expect(rerun.ok() && rerun->shard_refs.at(0).key == clean->shard_refs.at(0).key,
               "rerun shard digest differs");

  // Kill mid-iteration, then resume.
  testing::BuildE2eFixture(crash_dir.path(), false);
  auto crash_cfg = orchestrator::LoadRunConfig(crash_dir / "refinery.toml");
  if (!crash_cfg.ok()) {
    check.Expect(false, crash_cfg.status().ToString());
    return;
  }
  std::fflush(nullptr);
  const pid_t pid = fork();
  if (pid == 0) {
    orchestrator::IterationHooks hooks;
    hooks.exit_after_jobs = 60;
    (void)orchestrator::RunIteration(*crash_cfg, 0, hooks);
    _exit(0);
  }
  int status = 0;
  waitpid(pid, &status, 0);
  check.Expect(WIFEXITED(status) && WEXITSTATUS(status) == 86, "child was not killed mid-run");
  auto resumed = orchestrator::RunIteration(*crash_cfg, 0);
  check.Expect(resumed.ok() && resumed->shard_refs.at(0).key == clean->shard_refs.at(0).key,
               "resumed shard digest differs");
  check.Expect(RecordIds(*crash_cfg) == RecordIds(*cfg), "resumed record set differs");
  check.Note("compiled " + std::to_string(c.compiled) + ", passed_percentile " +
             std::to_string(c.passed_percentile) + ", after_dedup " +
             std::to_string(c.after_dedup) + " (clustered fixture " +
             std::to_string(clustered.ok() ? clustered->counts.after_dedup : -1) + " of " +
             std::to_string(expected_clustered) + " expected)");
}

// ---------------------------------------------------------------------------
// Queue.

void QueueRedelivery(Check& check) {
  std::atomic<std::int64_t> now_ms{1'000'000};
  store::Clock clock = [&] { return store::TimePoint(std::chrono::milliseconds(now_ms.load())); };
  auto q = store::JobQueue::Open(":memory:", clock);
  if (!q.ok()) {
    check.Expect(false, q.status().ToString());
    return;
  }
  const auto ref = store::MakeBlobRef("payload", store::MediaKind::kDatasetShard);
  (void)(*q)->Enqueue("j1", store::JobKind::kGenerate, ref);
  auto first = (*q)->Lease(store::JobKind::kGenerate, 50ms);
  check.Expect(first.ok() && first->has_value(), "first lease");
  now_ms += 30;
  auto early = (*q)->Lease(store::JobKind::kGenerate, 50ms);
  check.Expect(early.ok() && !early->has_value(), "leased before timeout");
  now_ms += 30;
  auto again = (*q)->Lease(store::JobKind::kGenerate, 50ms);
  check.Expect(again.ok() && again->has_value() && (**again).attempts == 2,
               "not redelivered after timeout");

  TempDir dir;
  constexpr int kJobs = 300;
  {
    auto shared = store::JobQueue::Open(dir / "q.db");
    for (int i = 0; i < kJobs; ++i) {
      (void)(*shared)->Enqueue("job" + std::to_string(i), store::JobKind::kScore,
                               store::MakeBlobRef(std::to_string(i), store::MediaKind::kDatasetShard));
    }
  }
  std::mutex mu;
  std::map<std::string, int> effects;
  std::atomic<int> abandoned{0}, errors{0};
  auto worker = [&](int seed) {
    auto wq = store::JobQueue::Open(dir / "q.db");
    if (!wq.ok()) {
      ++errors;
      return;
    }
    std::mt19937 rng(seed);
    while (true) {
      auto job = (*wq)->Lease(store::JobKind::kScore, 25ms);
      if (!job.ok()) {
        ++errors;
        return;
      }
      if (!job->has_value()) {
        auto counts = (*wq)->Counts(store::JobKind::kScore);
        if (!counts.ok() || counts->pending + counts->leased == 0) return;
        std::this_thread::sleep_for(2ms);
        continue;
      }
      if (rng() % 8 == 0) {
        ++abandoned;
        continue;
      }
      auto done = (*wq)->Complete((**job).job_id);
      if (!done.ok()) {
        ++errors;
        continue;
      }
      if (*done) {
        std::lock_guard<std::mutex> lock(mu);
        ++effects[(**job).job_id];
      }
    }
  };
  std::vector<std::thread> threads;
  for (int i = 0; i < 4; ++i) threads.emplace_back(worker, 70 + i);
  for (auto& t : threads) t.join();
  bool once = static_cast<int>(effects.size()) == kJobs;
  for (const auto& [id, n] : effects) once = once && n == 1;
  check.Expect(errors.load() == 0, std::to_string(errors.load()) + " queue errors");
  check.Expect(abandoned.load() > 0, "no lease was abandoned");
  check.Expect(once, "completion effects not exactly once");
  check.Note(std::to_string(kJobs) + " jobs, " + std::to_string(abandoned.load()) +
             " abandoned leases, 4 workers");
}

// ---------------------------------------------------------------------------
// Prompts.

void PromptTemplates(Check& check) {
  const std::string description = "a weather app with a five-day forecast";
  auto scoring_prompt = scoring::BuildScoringPrompt(description);
  auto generation_prompt = scoring::BuildGenerationPrompt(description);
  check.Expect(scoring_prompt.ok() &&
                   *scoring_prompt ==
                       "mobile user interface. well-designed. design awards winner. detailed "
                       "app. featured screenshot. a weather app with a five-day forecast.",
               "scoring prompt");
  check.Expect(generation_prompt.ok() &&
                   *generation_prompt ==
                       "Generate all required code that uses image assets and realistic "
                       "placeholder data for a SwiftUI view named ContentView with the following "
                       "description: \"a weather app with a five-day forecast.\"",
               "generation prompt");
}

int RunAll() {
  const std::vector<Criterion> criteria = {
      {"elo_algebra", 1.0, EloAlgebra},
      {"elo_recovery", 10.0, EloRecovery},
      {"auto_outcome_rules", 0, AutoOutcomes},
      {"dbscan_oracle_equivalence", 5.0, DbscanOracle},
      {"score_filter_oracle_equivalence", 0, ScoreFilterOracle},
      {"ranking_law", 0, RankingLaw},
      {"error_free_fraction_corpus", 0, ErrorFreeFractionCorpus},
      {"repair_soundness", 0, RepairSoundness},
      {"end_to_end_iteration", 30.0, EndToEnd},
      {"queue_redelivery", 0, QueueRedelivery},
      {"prompt_templates", 0, PromptTemplates},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    c.run(check);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0) {
      check.Expect(secs < c.budget_s, "runtime over " + std::to_string(c.budget_s) + " s");
    }
    if (!check.ok()) ++failed;
    std::printf("%s %-34s %8.3f s  %s\n", check.ok() ? "PASS" : "FAIL", c.name.c_str(), secs,
                check.Summary().c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed;
}

}  // namespace
}  // namespace refinery

int main() {
  spdlog::set_level(spdlog::level::err);
  return refinery::RunAll();
}
