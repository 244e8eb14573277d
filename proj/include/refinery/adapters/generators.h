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

#ifndef REFINERY_ADAPTERS_GENERATORS_H_
#define REFINERY_ADAPTERS_GENERATORS_H_

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <utility>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "refinery/adapters/types.h"

namespace refinery::adapters {

// Deterministic generator answering from a fixture table keyed by
// (SHA-256 of prompt, profile_id). Entries may carry a completion (truncated
// at the stop token on the way out) or an injected fault.
class ScriptedGenerator final : public Generator {
 public:
  enum class Fault { kNone, kTimeout, kEmpty };

  struct Entry {
    std::string completion;
    Fault fault = Fault::kNone;
  };

  // Profile id "*" matches any profile when no exact entry exists.
  void Add(std::string_view prompt, std::string profile_id, std::string completion);
  void AddFault(std::string_view prompt, std::string profile_id, Fault fault);

  // Loads JSON Lines records {prompt, profile_id, completion} or
  // {prompt, profile_id, fault: "timeout"|"empty"}.
  static absl::StatusOr<std::unique_ptr<ScriptedGenerator>> FromFile(
      const std::filesystem::path& path);

  absl::StatusOr<std::string> Generate(std::string_view prompt,
                                       const SamplingProfile& profile) override;

  std::size_t size() const { return table_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, Entry> table_;
};

// Procedural MiniUI generator for desk-scale runs. The program is a pure
// function of (prompt, profile_id, seed): labels are drawn from the quoted
// description in the prompt, and with probability
// min(1, fault_rate * (1 + temperature)) one syntax fault is injected. The
// completion always ends with the stop token followed by trailing chatter.
class SyntheticGenerator final : public Generator {
 public:
  explicit SyntheticGenerator(double fault_rate = 0.3, std::uint64_t seed = 0)
      : fault_rate_(fault_rate), seed_(seed) {}

  absl::StatusOr<std::string> Generate(std::string_view prompt,
                                       const SamplingProfile& profile) override;

  // Extracts the description from a generation prompt: the text inside the
  // last pair of double quotes, minus a trailing period. Falls back to the
  // whole prompt.
  static std::string ExtractDescription(std::string_view prompt);

 private:
  double fault_rate_;
  std::uint64_t seed_;
};

// Remote generator. POSTs {prompt, temperature, top_k, top_p, max_tokens,
// stop} as JSON and expects {text}. Connection failures and timeouts are
// kUnavailable; an empty text is kNotFound.
class HttpGenerator final : public Generator {
 public:
  // `url` like "http://host:port/path".
  static absl::StatusOr<std::unique_ptr<HttpGenerator>> Create(
      std::string url, std::chrono::milliseconds timeout = std::chrono::seconds(120));

  absl::StatusOr<std::string> Generate(std::string_view prompt,
                                       const SamplingProfile& profile) override;

 private:
  HttpGenerator(std::string origin, std::string path, std::chrono::milliseconds timeout)
      : origin_(std::move(origin)), path_(std::move(path)), timeout_(timeout) {}

  std::string origin_;
  std::string path_;
  std::chrono::milliseconds timeout_;
};

absl::Status EmptyCompletionError();
bool IsEmptyCompletion(const absl::Status& status);

}  // namespace refinery::adapters

#endif  // REFINERY_ADAPTERS_GENERATORS_H_
