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

#ifndef REFINERY_ORCHESTRATOR_CONFIG_H_
#define REFINERY_ORCHESTRATOR_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "refinery/adapters/types.h"
#include "refinery/refine/filters.h"
#include "refinery/scoring/prompts.h"

namespace refinery::orchestrator {

// Parses flat `key = value` text. Blank lines and lines starting with '#'
// are skipped. A value is read as JSON (numbers, true/false, quoted strings,
// arrays); anything else is taken as a bare string. Keys may contain dots.
// Duplicate keys are an error.
absl::StatusOr<std::map<std::string, nlohmann::json>> ParseFlatConfig(std::string_view text);

struct GeneratorSpec {
  std::string kind = "synthetic";  // synthetic | scripted | http
  std::filesystem::path script;    // scripted
  std::string url;                 // http
  int timeout_ms = 120000;         // http
  double fault_rate = 0.3;         // synthetic
  std::uint64_t seed = 0;          // synthetic
};

struct CompilerSpec {
  std::string kind = "miniui";  // miniui | external
  std::string command;
  std::string extension = ".swift";
};

struct DescriptionSource {
  std::filesystem::path path;
  double weight = 1.0;
};

struct ModelSpec {
  std::string model_id;
  std::string params;  // free text for the results table, e.g. "15B"
  GeneratorSpec generator;
  adapters::SamplingProfile profile;
};

struct RunConfig {
  std::vector<DescriptionSource> description_sources;
  int samples_per_iteration = 1000;
  std::uint64_t seed = 0;
  std::filesystem::path work_dir = "runs";

  GeneratorSpec generator;
  CompilerSpec compiler;
  adapters::SamplingProfile profile;
  refine::FilterConfig filter;
  std::size_t embedding_dim = 64;

  bool repair = true;
  bool repair_in_prefs = true;
  int repair_max_rounds = 3;
  std::filesystem::path repair_rules;  // empty: default MiniUI pack

  int workers = 4;
  int lease_ms = 30000;
  int max_attempts = 3;
  double wall_clock_cap_s = 0.0;  // 0: no cap
  std::string trainer_hook;

  std::string mode = "sft";  // sft | prefs
  std::string pair_mode = "adjacent";

  std::optional<std::string> generation_template;
  std::optional<std::string> scoring_template;
  std::optional<std::string> paraphrase_template;

  std::filesystem::path eval_set;
  std::filesystem::path eval_dir = "runs/eval";
  std::vector<ModelSpec> models;
  std::optional<int> snapshot_iteration;
  std::string snapshot_model;

  absl::StatusOr<scoring::PromptTemplates> Templates() const;
};

// Builds a RunConfig from parsed keys. Relative paths resolve against
// `base_dir`. Unknown keys are an error.
absl::StatusOr<RunConfig> RunConfigFromFlat(const std::map<std::string, nlohmann::json>& kv,
                                            const std::filesystem::path& base_dir);

absl::StatusOr<RunConfig> LoadRunConfig(const std::filesystem::path& path);

// Snapshot recorded in manifests.
nlohmann::json ToJson(const RunConfig& cfg);

struct Adapters {
  std::unique_ptr<adapters::Generator> generator;
  std::unique_ptr<adapters::Compiler> compiler;
  std::unique_ptr<adapters::Renderer> renderer;
  std::unique_ptr<adapters::Embedder> embedder;
};

absl::StatusOr<std::unique_ptr<adapters::Generator>> MakeGenerator(const GeneratorSpec& spec);

// Instantiates every adapter named by `cfg`; configuration errors surface
// here, before any job is queued.
absl::StatusOr<Adapters> MakeAdapters(const RunConfig& cfg);

}  // namespace refinery::orchestrator

#endif  // REFINERY_ORCHESTRATOR_CONFIG_H_
