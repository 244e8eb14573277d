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

#ifndef REFINERY_REPAIR_REPAIR_H_
#define REFINERY_REPAIR_REPAIR_H_

#include <filesystem>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "refinery/adapters/types.h"
#include "refinery/store/blob_store.h"

namespace refinery::repair {

inline constexpr int kDefaultMaxRounds = 3;

// Edit applied at the line of a matched diagnostic.
//
// Action strings may reference the diagnostic message's capture groups as
// ${m1}..${m9}. Inside `pattern` the captured text is regex-escaped. Inside
// `replacement`, ${nearest:mN} expands to the closest MiniUI component name
// (case-insensitive edit distance <= 2); when nothing is close enough the
// action fails and the rule is skipped.
struct RepairAction {
  enum class Kind { kReplaceOnLine, kInsertAfterLine, kAppendEof };

  Kind kind = Kind::kReplaceOnLine;
  std::string pattern;      // kReplaceOnLine: first match is replaced
  std::string replacement;  // kReplaceOnLine: ECMAScript format string
  std::string text;         // kInsertAfterLine / kAppendEof
};

class RepairRule {
 public:
  static absl::StatusOr<RepairRule> Create(std::string rule_id,
                                           std::string message_pattern,
                                           RepairAction action,
                                           int max_applications = 1);

  const std::string& rule_id() const { return rule_id_; }
  const std::string& message_pattern() const { return message_pattern_; }
  const std::regex& message_regex() const { return message_regex_; }
  const RepairAction& action() const { return action_; }
  int max_applications() const { return max_applications_; }

 private:
  RepairRule() = default;

  std::string rule_id_;
  std::string message_pattern_;
  std::regex message_regex_;
  RepairAction action_;
  int max_applications_ = 1;
};

struct AppliedRepair {
  std::string rule_id;
  int line = 0;  // 1-based; total_lines + 1 for an end-of-file append
  std::string before;
  std::string after;
};

struct RepairReport {
  store::BlobRef original_ref;
  store::BlobRef repaired_ref;
  std::vector<AppliedRepair> applied;
  int rounds = 0;
  std::vector<std::string> skipped;  // rule-application errors, for logs
};

nlohmann::json ToJson(const RepairReport& report);

struct RepairResult {
  std::string source;
  RepairReport report;
};

// Compile, pick a fix, recompile. Each round compiles the current source;
// if it fails, error diagnostics are visited in (line, column) order and the
// first listed rule whose message pattern matches and whose action applies
// is used. Stops on success, when no rule applies, or after `max_rounds`
// compiles. A source that already compiles is returned untouched.
absl::StatusOr<RepairResult> ApplyRepairs(std::string_view source,
                                          std::span<const RepairRule> rules,
                                          adapters::Compiler& compiler,
                                          int max_rounds = kDefaultMaxRounds);

// Rules for the MiniUI reference compiler: close a missing brace, drop an
// unexpected one, fix a misspelled component, close an unterminated string,
// and quote a bare word after a leaf component.
std::vector<RepairRule> DefaultMiniUiRules();

// JSON Lines records {rule_id, message_pattern, action, args, max_applications}
// where action is replace_on_line (args {pattern, replacement}),
// insert_after_line or append_eof (args {text}).
absl::StatusOr<std::vector<RepairRule>> LoadRules(const std::filesystem::path& path);
absl::StatusOr<RepairRule> RuleFromJson(const nlohmann::json& j);

// Case-insensitive Levenshtein nearest component name, or empty.
std::string NearestComponent(std::string_view name);

}  // namespace refinery::repair

#endif  // REFINERY_REPAIR_REPAIR_H_
