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

#include "refinery/repair/repair.h"

#include <algorithm>
#include <cctype>
#include <map>

#include "refinery/common/strings.h"
#include "refinery/adapters/miniui.h"
#include "refinery/common/status_macros.h"
#include "refinery/store/dataset.h"

namespace refinery::repair {
namespace {

using adapters::Diagnostic;

std::string RegexEscape(std::string_view s) {
  static constexpr std::string_view kSpecial = R"(\^$.|?*+()[]{}/)";
  std::string out;
  for (char c : s) {
    if (kSpecial.find(c) != std::string_view::npos) out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string FormatEscape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '$') out.push_back('$');
    out.push_back(c);
  }
  return out;
}

int EditDistance(std::string_view a, std::string_view b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

enum class Context { kPattern, kReplacement, kText };

// Expands ${mN} and ${nearest:mN} against the message captures.
absl::StatusOr<std::string> Expand(std::string_view tmpl, const std::smatch& m,
                                   Context ctx) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl.compare(i, 2, "${") == 0) {
      const auto close = tmpl.find('}', i);
      if (close == std::string_view::npos) {
        return absl::InvalidArgumentError("unterminated ${ in action");
      }
      std::string_view ref = tmpl.substr(i + 2, close - i - 2);
      bool nearest = false;
      if (ref.starts_with("nearest:")) {
        nearest = true;
        ref.remove_prefix(8);
      }
      if (ref.size() != 2 || ref[0] != 'm' || ref[1] < '1' || ref[1] > '9') {
        return absl::InvalidArgumentError(StrCat("bad reference ${", ref, "}"));
      }
      const std::size_t group = static_cast<std::size_t>(ref[1] - '0');
      if (group >= m.size() || !m[group].matched) {
        return absl::FailedPreconditionError(
            StrCat("message has no capture group ", group));
      }
      std::string value = m[group].str();
      if (nearest) {
        value = NearestComponent(value);
        if (value.empty()) {
          return absl::FailedPreconditionError(
              StrCat("no component name close to '", m[group].str(), "'"));
        }
      }
      switch (ctx) {
        case Context::kPattern: out += RegexEscape(value); break;
        case Context::kReplacement: out += FormatEscape(value); break;
        case Context::kText: out += value; break;
      }
      i = close + 1;
      continue;
    }
    out.push_back(tmpl[i++]);
  }
  return out;
}

struct Edit {
  AppliedRepair record;
  std::vector<std::string> lines;
};

absl::StatusOr<Edit> ApplyAction(const RepairRule& rule, const Diagnostic& diag,
                                 const std::smatch& match,
                                 const std::vector<std::string>& lines) {
  const RepairAction& action = rule.action();
  const int total = static_cast<int>(lines.size());
  Edit edit{{rule.rule_id(), diag.line, "", ""}, lines};
  switch (action.kind) {
    case RepairAction::Kind::kAppendEof: {
      RF_ASSIGN_OR_RETURN(std::string text, Expand(action.text, match, Context::kText));
      edit.record.line = total + 1;
      edit.record.after = text;
      edit.lines.push_back(std::move(text));
      return edit;
    }
    case RepairAction::Kind::kInsertAfterLine:
    case RepairAction::Kind::kReplaceOnLine:
      break;
  }
  if (diag.line < 1 || diag.line > total) {
    return absl::OutOfRangeError(StrCat("rule ", rule.rule_id(), " targets line ",
                                              diag.line, " of ", total));
  }
  const auto idx = static_cast<std::size_t>(diag.line - 1);
  edit.record.before = lines[idx];
  if (action.kind == RepairAction::Kind::kInsertAfterLine) {
    RF_ASSIGN_OR_RETURN(std::string text, Expand(action.text, match, Context::kText));
    edit.record.after = text;
    edit.lines.insert(edit.lines.begin() + static_cast<std::ptrdiff_t>(idx) + 1,
                      std::move(text));
    return edit;
  }
  RF_ASSIGN_OR_RETURN(std::string pattern, Expand(action.pattern, match, Context::kPattern));
  RF_ASSIGN_OR_RETURN(std::string replacement,
                      Expand(action.replacement, match, Context::kReplacement));
  std::regex re;
  try {
    re = std::regex(pattern);
  } catch (const std::regex_error& e) {
    return absl::InvalidArgumentError(StrCat("bad line pattern: ", e.what()));
  }
  std::string after = std::regex_replace(lines[idx], re, replacement,
                                         std::regex_constants::format_first_only);
  if (after == lines[idx]) {
    return absl::FailedPreconditionError(
        StrCat("rule ", rule.rule_id(), " did not change line ", diag.line));
  }
  if (after.find(diag.message) != std::string::npos &&
      lines[idx].find(diag.message) == std::string::npos) {
    return absl::FailedPreconditionError(
        StrCat("rule ", rule.rule_id(), " would echo the diagnostic text"));
  }
  edit.record.after = after;
  edit.lines[idx] = std::move(after);
  return edit;
}

}  // namespace

std::string NearestComponent(std::string_view name) {
  const std::string needle = Lower(name);
  std::string best;
  int best_dist = 3;
  for (std::string_view candidate : adapters::miniui::ComponentNames()) {
    const int d = EditDistance(needle, Lower(candidate));
    if (d < best_dist) {
      best_dist = d;
      best = std::string(candidate);
    }
  }
  if (!best.empty() && best_dist >= static_cast<int>(needle.size())) return "";
  return best;
}

absl::StatusOr<RepairRule> RepairRule::Create(std::string rule_id,
                                              std::string message_pattern,
                                              RepairAction action,
                                              int max_applications) {
  if (rule_id.empty()) return absl::InvalidArgumentError("rule_id is empty");
  if (max_applications < 1) {
    return absl::InvalidArgumentError(
        StrCat(rule_id, ": max_applications must be positive"));
  }
  RepairRule rule;
  try {
    rule.message_regex_ = std::regex(message_pattern);
  } catch (const std::regex_error& e) {
    return absl::InvalidArgumentError(
        StrCat(rule_id, ": message_pattern does not compile: ", e.what()));
  }
  rule.rule_id_ = std::move(rule_id);
  rule.message_pattern_ = std::move(message_pattern);
  rule.action_ = std::move(action);
  rule.max_applications_ = max_applications;
  return rule;
}

nlohmann::json ToJson(const RepairReport& report) {
  nlohmann::json applied = nlohmann::json::array();
  for (const auto& a : report.applied) {
    applied.push_back(
        {{"rule_id", a.rule_id}, {"line", a.line}, {"before", a.before}, {"after", a.after}});
  }
  return {{"original_ref", store::ToJson(report.original_ref)},
          {"repaired_ref", store::ToJson(report.repaired_ref)},
          {"applied", std::move(applied)},
          {"rounds", report.rounds}};
}

absl::StatusOr<RepairResult> ApplyRepairs(std::string_view source,
                                          std::span<const RepairRule> rules,
                                          adapters::Compiler& compiler,
                                          int max_rounds) {
  if (rules.empty()) return absl::InvalidArgumentError("no repair rules");
  if (max_rounds < 1) return absl::InvalidArgumentError("max_rounds must be >= 1");

  RepairResult result;
  result.source = std::string(source);
  result.report.original_ref =
      store::MakeBlobRef(source, store::MediaKind::kProgramSource);
  const bool trailing_newline = !source.empty() && source.back() == '\n';
  std::map<std::string, int> uses;

  while (result.report.rounds < max_rounds) {
    ++result.report.rounds;
    RF_ASSIGN_OR_RETURN(adapters::CompileOutcome outcome, compiler.Compile(result.source));
    if (outcome.success) break;

    std::vector<Diagnostic> errors;
    for (const auto& d : outcome.diagnostics) {
      if (d.is_error()) errors.push_back(d);
    }
    std::stable_sort(errors.begin(), errors.end(), [](const auto& a, const auto& b) {
      return std::pair(a.line, a.column.value_or(0)) <
             std::pair(b.line, b.column.value_or(0));
    });
    const std::vector<std::string> lines = adapters::SplitLines(result.source);

    bool applied = false;
    for (const auto& diag : errors) {
      for (const auto& rule : rules) {
        if (uses[rule.rule_id()] >= rule.max_applications()) continue;
        std::smatch match;
        if (!std::regex_search(diag.message, match, rule.message_regex())) continue;
        auto edit = ApplyAction(rule, diag, match, lines);
        if (!edit.ok()) {
          result.report.skipped.push_back(std::string(edit.status().message()));
          continue;
        }
        result.source = adapters::JoinLines(edit->lines, trailing_newline || lines.empty());
        result.report.applied.push_back(std::move(edit->record));
        ++uses[rule.rule_id()];
        applied = true;
        break;
      }
      if (applied) break;
    }
    if (!applied) break;
  }
  result.report.repaired_ref =
      store::MakeBlobRef(result.source, store::MediaKind::kProgramSource);
  return result;
}

std::vector<RepairRule> DefaultMiniUiRules() {
  using K = RepairAction::Kind;
  std::vector<RepairRule> rules;
  auto add = [&](std::string id, std::string pattern, RepairAction action, int max) {
    rules.push_back(*RepairRule::Create(std::move(id), std::move(pattern),
                                        std::move(action), max));
  };
  add("close_missing_brace", R"(missing closing '\}')", {K::kAppendEof, "", "", "}"}, 3);
  add("drop_unexpected_brace", R"(unexpected '\}')",
      {K::kReplaceOnLine, R"(\}([^}]*)$)", "$1", ""}, 3);
  add("fix_component_name", R"(unknown component '(\w+)')",
      {K::kReplaceOnLine, R"(\b${m1}\b)", "${nearest:m1}", ""}, 3);
  add("close_string_literal", R"(unterminated string literal)",
      {K::kReplaceOnLine, R"(\s*$)", "\"", ""}, 3);
  add("quote_bare_literal", R"(expected string literal after '(\w+)', found '(\w+)')",
      {K::kReplaceOnLine, R"(\b${m1}\s+${m2}\b)", "${m1} \"${m2}\"", ""}, 3);
  return rules;
}

absl::StatusOr<RepairRule> RuleFromJson(const nlohmann::json& j) {
  try {
    const auto kind = j.at("action").get<std::string>();
    const auto& args = j.contains("args") ? j.at("args") : nlohmann::json::object();
    RepairAction action;
    if (kind == "replace_on_line") {
      action.kind = RepairAction::Kind::kReplaceOnLine;
      action.pattern = args.at("pattern").get<std::string>();
      action.replacement = args.at("replacement").get<std::string>();
    } else if (kind == "insert_after_line" || kind == "append_eof") {
      action.kind = kind == "append_eof" ? RepairAction::Kind::kAppendEof
                                         : RepairAction::Kind::kInsertAfterLine;
      action.text = args.at("text").get<std::string>();
    } else {
      return absl::InvalidArgumentError(StrCat("unknown repair action: ", kind));
    }
    return RepairRule::Create(j.at("rule_id").get<std::string>(),
                              j.at("message_pattern").get<std::string>(),
                              std::move(action), j.value("max_applications", 1));
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(StrCat("malformed repair rule: ", e.what()));
  }
}

absl::StatusOr<std::vector<RepairRule>> LoadRules(const std::filesystem::path& path) {
  RF_ASSIGN_OR_RETURN(auto records, store::ReadJsonLines(path));
  if (records.empty()) {
    return absl::InvalidArgumentError(StrCat("no rules in ", path.string()));
  }
  std::vector<RepairRule> rules;
  for (const auto& r : records) {
    RF_ASSIGN_OR_RETURN(RepairRule rule, RuleFromJson(r));
    rules.push_back(std::move(rule));
  }
  return rules;
}

}  // namespace refinery::repair
