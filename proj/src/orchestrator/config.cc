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

#include "refinery/orchestrator/config.h"

#include <fstream>
#include <set>
#include <sstream>

#include "refinery/adapters/external_compiler.h"
#include "refinery/adapters/generators.h"
#include "refinery/adapters/hash_embedder.h"
#include "refinery/adapters/miniui.h"
#include "refinery/common/status_macros.h"
#include "refinery/common/strings.h"
#include "refinery/prefs/prefs.h"

namespace refinery::orchestrator {
namespace {

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::filesystem::path Resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

// Typed accessors that remember which keys were consumed.
class Reader {
 public:
  explicit Reader(const std::map<std::string, nlohmann::json>& kv) : kv_(kv) {}

  template <typename T>
  absl::Status Get(const std::string& key, T& out) {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return absl::OkStatus();
    used_.insert(key);
    try {
      if constexpr (std::is_same_v<T, std::string>) {
        out = it->second.is_string() ? it->second.get<std::string>() : it->second.dump();
      } else {
        out = it->second.get<T>();
      }
    } catch (const nlohmann::json::exception&) {
      return absl::InvalidArgumentError(
          StrCat("config key ", key, " has the wrong type: ", it->second.dump()));
    }
    return absl::OkStatus();
  }

  absl::Status GetPath(const std::string& key, const std::filesystem::path& base,
                       std::filesystem::path& out) {
    std::string s;
    RF_RETURN_IF_ERROR(Get(key, s));
    if (!s.empty()) out = Resolve(base, s);
    return absl::OkStatus();
  }

  bool Has(const std::string& key) const { return kv_.contains(key); }

  absl::Status CheckAllUsed() const {
    for (const auto& [key, value] : kv_) {
      if (!used_.contains(key)) return absl::InvalidArgumentError(StrCat("unknown config key ", key));
    }
    return absl::OkStatus();
  }

 private:
  const std::map<std::string, nlohmann::json>& kv_;
  std::set<std::string> used_;
};

absl::Status ReadGenerator(Reader& r, const std::string& prefix,
                           const std::filesystem::path& base, GeneratorSpec& g) {
  RF_RETURN_IF_ERROR(r.Get(prefix + "generator", g.kind));
  RF_RETURN_IF_ERROR(r.GetPath(prefix + "generator_script", base, g.script));
  RF_RETURN_IF_ERROR(r.Get(prefix + "generator_url", g.url));
  RF_RETURN_IF_ERROR(r.Get(prefix + "generator_timeout_ms", g.timeout_ms));
  RF_RETURN_IF_ERROR(r.Get(prefix + "fault_rate", g.fault_rate));
  RF_RETURN_IF_ERROR(r.Get(prefix + "generator_seed", g.seed));
  return absl::OkStatus();
}

absl::Status ReadProfile(Reader& r, const std::string& prefix,
                         adapters::SamplingProfile& p) {
  RF_RETURN_IF_ERROR(r.Get(prefix + "top_k", p.top_k));
  RF_RETURN_IF_ERROR(r.Get(prefix + "top_p", p.top_p));
  RF_RETURN_IF_ERROR(r.Get(prefix + "temperature", p.temperature));
  RF_RETURN_IF_ERROR(r.Get(prefix + "stop_token", p.stop_token));
  RF_RETURN_IF_ERROR(r.Get(prefix + "max_tokens", p.max_tokens));
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<std::map<std::string, nlohmann::json>> ParseFlatConfig(std::string_view text) {
  std::map<std::string, nlohmann::json> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = Trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      return absl::InvalidArgumentError(StrCat("config line ", line_no, ": expected key = value"));
    }
    const std::string key = Trim(std::string_view(line).substr(0, eq));
    const std::string value = Trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) return absl::InvalidArgumentError(StrCat("config line ", line_no, ": empty key"));
    nlohmann::json parsed = nlohmann::json::parse(value, nullptr, false);
    if (parsed.is_discarded()) parsed = value;
    if (!out.emplace(key, std::move(parsed)).second) {
      return absl::InvalidArgumentError(StrCat("config line ", line_no, ": duplicate key ", key));
    }
  }
  return out;
}

absl::StatusOr<scoring::PromptTemplates> RunConfig::Templates() const {
  if (!generation_template && !scoring_template && !paraphrase_template) {
    return scoring::PromptTemplates::Defaults();
  }
  return scoring::PromptTemplates::Create(
      scoring_template.value_or(std::string(scoring::kDefaultScoringTemplate)),
      generation_template.value_or(std::string(scoring::kDefaultGenerationTemplate)),
      paraphrase_template.value_or(std::string(scoring::kDefaultParaphraseTemplate)));
}

absl::StatusOr<RunConfig> RunConfigFromFlat(const std::map<std::string, nlohmann::json>& kv,
                                            const std::filesystem::path& base_dir) {
  RunConfig cfg;
  Reader r(kv);

  std::vector<std::string> sources;
  std::vector<double> weights;
  RF_RETURN_IF_ERROR(r.Get("description_sources", sources));
  RF_RETURN_IF_ERROR(r.Get("source_weights", weights));
  if (!weights.empty() && weights.size() != sources.size()) {
    return absl::InvalidArgumentError("source_weights must match description_sources");
  }
  for (std::size_t i = 0; i < sources.size(); ++i) {
    cfg.description_sources.push_back(
        {Resolve(base_dir, sources[i]), weights.empty() ? 1.0 : weights[i]});
  }
  RF_RETURN_IF_ERROR(r.Get("samples_per_iteration", cfg.samples_per_iteration));
  RF_RETURN_IF_ERROR(r.Get("seed", cfg.seed));
  RF_RETURN_IF_ERROR(r.GetPath("work_dir", base_dir, cfg.work_dir));
  if (!r.Has("work_dir")) cfg.work_dir = Resolve(base_dir, "runs");

  RF_RETURN_IF_ERROR(ReadGenerator(r, "", base_dir, cfg.generator));
  RF_RETURN_IF_ERROR(r.Get("compiler", cfg.compiler.kind));
  RF_RETURN_IF_ERROR(r.Get("compiler_command", cfg.compiler.command));
  RF_RETURN_IF_ERROR(r.Get("compiler_extension", cfg.compiler.extension));
  RF_RETURN_IF_ERROR(ReadProfile(r, "", cfg.profile));
  cfg.profile.profile_id = "default";
  RF_RETURN_IF_ERROR(r.Get("profile_id", cfg.profile.profile_id));

  RF_RETURN_IF_ERROR(r.Get("min_text_sim", cfg.filter.min_text_sim));
  RF_RETURN_IF_ERROR(r.Get("min_visual_sim", cfg.filter.min_visual_sim));
  RF_RETURN_IF_ERROR(r.Get("percentile_thresh", cfg.filter.keep_top_percentile));
  RF_RETURN_IF_ERROR(r.Get("dbscan_eps", cfg.filter.dbscan_eps));
  RF_RETURN_IF_ERROR(r.Get("dbscan_min_pts", cfg.filter.dbscan_min_pts));
  std::string dedup_mode(refine::DedupModeName(cfg.filter.dedup_mode));
  RF_RETURN_IF_ERROR(r.Get("dedup_mode", dedup_mode));
  RF_ASSIGN_OR_RETURN(cfg.filter.dedup_mode, refine::ParseDedupMode(dedup_mode));
  RF_RETURN_IF_ERROR(r.Get("embedding_dim", cfg.embedding_dim));

  RF_RETURN_IF_ERROR(r.Get("repair", cfg.repair));
  RF_RETURN_IF_ERROR(r.Get("repair_in_prefs", cfg.repair_in_prefs));
  RF_RETURN_IF_ERROR(r.Get("repair_max_rounds", cfg.repair_max_rounds));
  RF_RETURN_IF_ERROR(r.GetPath("repair_rules", base_dir, cfg.repair_rules));

  RF_RETURN_IF_ERROR(r.Get("workers", cfg.workers));
  RF_RETURN_IF_ERROR(r.Get("lease_ms", cfg.lease_ms));
  RF_RETURN_IF_ERROR(r.Get("max_attempts", cfg.max_attempts));
  RF_RETURN_IF_ERROR(r.Get("wall_clock_cap_s", cfg.wall_clock_cap_s));
  RF_RETURN_IF_ERROR(r.Get("trainer_hook", cfg.trainer_hook));
  RF_RETURN_IF_ERROR(r.Get("mode", cfg.mode));
  RF_RETURN_IF_ERROR(r.Get("pair_mode", cfg.pair_mode));

  for (auto [key, slot] : {std::pair{"template.generation", &cfg.generation_template},
                           std::pair{"template.scoring", &cfg.scoring_template},
                           std::pair{"template.paraphrase", &cfg.paraphrase_template}}) {
    if (!r.Has(key)) continue;
    std::string t;
    RF_RETURN_IF_ERROR(r.Get(key, t));
    *slot = t;
  }

  RF_RETURN_IF_ERROR(r.GetPath("eval_set", base_dir, cfg.eval_set));
  RF_RETURN_IF_ERROR(r.GetPath("eval_dir", base_dir, cfg.eval_dir));
  if (!r.Has("eval_dir")) cfg.eval_dir = cfg.work_dir / "eval";
  if (r.Has("snapshot_iteration")) {
    int it = 0;
    RF_RETURN_IF_ERROR(r.Get("snapshot_iteration", it));
    cfg.snapshot_iteration = it;
  }
  RF_RETURN_IF_ERROR(r.Get("snapshot_model", cfg.snapshot_model));
  std::vector<std::string> models;
  RF_RETURN_IF_ERROR(r.Get("models", models));
  for (const auto& id : models) {
    ModelSpec m;
    m.model_id = id;
    m.profile.profile_id = id;
    const std::string prefix = StrCat("model.", id, ".");
    RF_RETURN_IF_ERROR(r.Get(prefix + "params", m.params));
    RF_RETURN_IF_ERROR(ReadGenerator(r, prefix, base_dir, m.generator));
    RF_RETURN_IF_ERROR(ReadProfile(r, prefix, m.profile));
    RF_RETURN_IF_ERROR(m.profile.Validate());
    cfg.models.push_back(std::move(m));
  }

  RF_RETURN_IF_ERROR(r.CheckAllUsed());
  RF_RETURN_IF_ERROR(cfg.profile.Validate());
  RF_RETURN_IF_ERROR(cfg.filter.Validate());
  if (cfg.mode != "sft" && cfg.mode != "prefs") {
    return absl::InvalidArgumentError(StrCat("unknown mode: ", cfg.mode));
  }
  RF_RETURN_IF_ERROR(prefs::ParsePairMode(cfg.pair_mode).status());
  if (cfg.workers < 1) return absl::InvalidArgumentError("workers must be >= 1");
  if (cfg.lease_ms < 1) return absl::InvalidArgumentError("lease_ms must be >= 1");
  if (cfg.max_attempts < 1) return absl::InvalidArgumentError("max_attempts must be >= 1");
  if (cfg.repair_max_rounds < 1) return absl::InvalidArgumentError("repair_max_rounds must be >= 1");
  if (cfg.embedding_dim < 1) return absl::InvalidArgumentError("embedding_dim must be >= 1");
  RF_RETURN_IF_ERROR(cfg.Templates().status());
  return cfg;
}

absl::StatusOr<RunConfig> LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(StrCat("cannot read config ", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  RF_ASSIGN_OR_RETURN(auto kv, ParseFlatConfig(ss.str()));
  return RunConfigFromFlat(kv, path.parent_path());
}

nlohmann::json ToJson(const RunConfig& cfg) {
  nlohmann::json sources = nlohmann::json::array();
  for (const auto& s : cfg.description_sources) {
    sources.push_back({{"path", s.path.filename().string()}, {"weight", s.weight}});
  }
  nlohmann::json j = {
      {"description_sources", sources},
      {"samples_per_iteration", cfg.samples_per_iteration},
      {"seed", cfg.seed},
      {"generator", cfg.generator.kind},
      {"compiler", cfg.compiler.kind},
      {"profile", adapters::ToJson(cfg.profile)},
      {"filter", refine::ToJson(cfg.filter)},
      {"embedding_dim", cfg.embedding_dim},
      {"repair", cfg.repair},
      {"repair_max_rounds", cfg.repair_max_rounds},
      {"mode", cfg.mode},
      {"pair_mode", cfg.pair_mode},
  };
  if (auto t = cfg.Templates(); t.ok()) j["template_digest"] = t->Digest();
  return j;
}

absl::StatusOr<std::unique_ptr<adapters::Generator>> MakeGenerator(const GeneratorSpec& spec) {
  if (spec.kind == "synthetic") {
    if (!(spec.fault_rate >= 0.0 && spec.fault_rate <= 1.0)) {
      return absl::InvalidArgumentError("fault_rate must lie in [0, 1]");
    }
    return std::make_unique<adapters::SyntheticGenerator>(spec.fault_rate, spec.seed);
  }
  if (spec.kind == "scripted") {
    if (spec.script.empty()) return absl::InvalidArgumentError("scripted generator needs a script");
    if (!std::filesystem::exists(spec.script)) {
      return absl::NotFoundError(StrCat("generator script not found: ", spec.script.string()));
    }
    RF_ASSIGN_OR_RETURN(auto g, adapters::ScriptedGenerator::FromFile(spec.script));
    return std::unique_ptr<adapters::Generator>(std::move(g));
  }
  if (spec.kind == "http") {
    RF_ASSIGN_OR_RETURN(auto g, adapters::HttpGenerator::Create(
                                    spec.url, std::chrono::milliseconds(spec.timeout_ms)));
    return std::unique_ptr<adapters::Generator>(std::move(g));
  }
  return absl::InvalidArgumentError(StrCat("unknown generator kind: ", spec.kind));
}

absl::StatusOr<Adapters> MakeAdapters(const RunConfig& cfg) {
  Adapters a;
  RF_ASSIGN_OR_RETURN(a.generator, MakeGenerator(cfg.generator));
  if (cfg.compiler.kind == "miniui") {
    a.compiler = std::make_unique<adapters::miniui::MiniUiCompiler>();
  } else if (cfg.compiler.kind == "external") {
    if (cfg.compiler.command.empty()) {
      return absl::InvalidArgumentError("external compiler needs compiler_command");
    }
    a.compiler =
        std::make_unique<adapters::ExternalCompiler>(cfg.compiler.command, cfg.compiler.extension);
  } else {
    return absl::InvalidArgumentError(StrCat("unknown compiler kind: ", cfg.compiler.kind));
  }
  a.renderer = std::make_unique<adapters::miniui::MiniUiRenderer>();
  a.embedder = std::make_unique<adapters::HashEmbedder>(cfg.embedding_dim);
  return a;
}

}  // namespace refinery::orchestrator
