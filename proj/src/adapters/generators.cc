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

#include "refinery/adapters/generators.h"

#include <cctype>
#include <random>
#include <vector>

#include "refinery/common/strings.h"
#include "httplib.h"
#include <fmt/ranges.h>

#include "json.hpp"
#include "refinery/adapters/hash_embedder.h"
#include "refinery/store/blob_store.h"
#include "refinery/store/dataset.h"

namespace refinery::adapters {

namespace {
constexpr std::string_view kEmptyCompletion = "empty completion";
}  // namespace

absl::Status EmptyCompletionError() {
  return absl::NotFoundError(std::string(kEmptyCompletion));
}

bool IsEmptyCompletion(const absl::Status& status) {
  return absl::IsNotFound(status) && std::string(status.message()) == kEmptyCompletion;
}

// ---------------------------------------------------------------------------

void ScriptedGenerator::Add(std::string_view prompt, std::string profile_id,
                            std::string completion) {
  table_[{store::Sha256Hex(prompt), std::move(profile_id)}] =
      Entry{std::move(completion), Fault::kNone};
}

void ScriptedGenerator::AddFault(std::string_view prompt, std::string profile_id,
                                 Fault fault) {
  table_[{store::Sha256Hex(prompt), std::move(profile_id)}] = Entry{"", fault};
}

absl::StatusOr<std::unique_ptr<ScriptedGenerator>> ScriptedGenerator::FromFile(
    const std::filesystem::path& path) {
  auto records = store::ReadJsonLines(path);
  if (!records.ok()) return records.status();
  if (records->empty()) {
    return absl::FailedPreconditionError(
        StrCat("scripted generator fixture is empty or missing: ", path.string()));
  }
  auto gen = std::make_unique<ScriptedGenerator>();
  for (const auto& r : *records) {
    if (!r.contains("prompt") || !r.contains("profile_id")) {
      return absl::InvalidArgumentError("fixture record lacks prompt/profile_id");
    }
    const auto prompt = r.at("prompt").get<std::string>();
    auto profile = r.at("profile_id").get<std::string>();
    if (r.contains("fault")) {
      const auto f = r.at("fault").get<std::string>();
      if (f != "timeout" && f != "empty") {
        return absl::InvalidArgumentError(StrCat("unknown fault: ", f));
      }
      gen->AddFault(prompt, std::move(profile),
                    f == "timeout" ? Fault::kTimeout : Fault::kEmpty);
    } else {
      gen->Add(prompt, std::move(profile), r.at("completion").get<std::string>());
    }
  }
  return gen;
}

absl::StatusOr<std::string> ScriptedGenerator::Generate(
    std::string_view prompt, const SamplingProfile& profile) {
  if (prompt.empty()) return absl::InvalidArgumentError("prompt is empty");
  const std::string digest = store::Sha256Hex(prompt);
  auto it = table_.find({digest, profile.profile_id});
  if (it == table_.end()) it = table_.find({digest, "*"});
  if (it == table_.end()) {
    return absl::InvalidArgumentError(StrCat(
        "no scripted completion for prompt ", digest.substr(0, 12), " / profile ",
        profile.profile_id));
  }
  switch (it->second.fault) {
    case Fault::kTimeout:
      return absl::DeadlineExceededError("scripted generator timeout");
    case Fault::kEmpty:
      return EmptyCompletionError();
    case Fault::kNone:
      break;
  }
  std::string text = TruncateAtStop(it->second.completion, profile.stop_token);
  if (text.empty()) return EmptyCompletionError();
  return text;
}

// ---------------------------------------------------------------------------

std::string SyntheticGenerator::ExtractDescription(std::string_view prompt) {
  const auto close = prompt.rfind('"');
  if (close != std::string_view::npos && close > 0) {
    const auto open = prompt.rfind('"', close - 1);
    if (open != std::string_view::npos) {
      std::string desc(prompt.substr(open + 1, close - open - 1));
      while (!desc.empty() && desc.back() == '.') desc.pop_back();
      if (!desc.empty()) return desc;
    }
  }
  return std::string(prompt);
}

namespace {

std::string Quote(std::string_view label) {
  std::string out = "\"";
  for (char c : label) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string Capitalize(std::string word) {
  if (!word.empty()) word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
  return word;
}

}  // namespace

absl::StatusOr<std::string> SyntheticGenerator::Generate(
    std::string_view prompt, const SamplingProfile& profile) {
  if (prompt.empty()) return absl::InvalidArgumentError("prompt is empty");
  const std::string description = ExtractDescription(prompt);
  std::vector<std::string> words;
  for (auto& w : WordTokens(description)) {
    if (!HashEmbedder::DefaultStopwords().contains(w)) words.push_back(std::move(w));
  }
  if (words.empty()) words.push_back("screen");

  std::seed_seq seq{static_cast<std::uint32_t>(Fnv1a64(prompt)),
                    static_cast<std::uint32_t>(Fnv1a64(prompt) >> 32),
                    static_cast<std::uint32_t>(Fnv1a64(profile.profile_id)),
                    static_cast<std::uint32_t>(seed_)};
  std::mt19937_64 rng(seq);
  auto pick = [&](std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  };
  auto word = [&] { return words[pick(words.size())]; };

  std::vector<std::string> lines;
  lines.push_back("Screen {");
  lines.push_back("  VStack {");
  {
    std::vector<std::string> title(words.begin(),
                                   words.begin() + std::min<std::size_t>(3, words.size()));
    for (auto& t : title) t = Capitalize(t);
    lines.push_back("    Text " + Quote(fmt::format("{}", fmt::join(title, " "))));
  }
  if (pick(2) == 0) lines.push_back("    Image " + Quote(word()));
  const std::size_t sections = 1 + pick(3);
  for (std::size_t s = 0; s < sections; ++s) {
    switch (pick(3)) {
      case 0: {
        lines.push_back("    HStack {");
        const std::size_t n = 2 + pick(2);
        for (std::size_t i = 0; i < n; ++i) {
          lines.push_back("      Button " + Quote(Capitalize(word())));
        }
        lines.push_back("    }");
        break;
      }
      case 1: {
        lines.push_back("    List {");
        const std::size_t n = 2 + pick(3);
        for (std::size_t i = 0; i < n; ++i) {
          lines.push_back("      Text " + Quote(Capitalize(word()) + " " + word()));
        }
        lines.push_back("    }");
        break;
      }
      default:
        lines.push_back("    Text " + Quote(Capitalize(word())));
        lines.push_back("    Spacer");
        break;
    }
  }
  lines.push_back("    Button " + Quote(Capitalize(word())));
  lines.push_back("  }");
  lines.push_back("}");

  const double p_fault = std::min(1.0, fault_rate_ * (1.0 + profile.temperature));
  if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p_fault) {
    switch (pick(5)) {
      case 0:  // drop the final closing brace
        lines.pop_back();
        break;
      case 1: {  // lowercase a container keyword
        for (auto& l : lines) {
          if (auto pos = l.find("VStack"); pos != std::string::npos) {
            l.replace(pos, 6, "Vstack");
            break;
          }
        }
        break;
      }
      case 2: {  // lose a closing quote
        for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
          if (it->ends_with("\"")) {
            it->pop_back();
            break;
          }
        }
        break;
      }
      case 3:  // missing root
        lines.front() = "Group {";
        break;
      default:  // component the language does not have
        lines.insert(lines.begin() + 2, "    NavigationLink \"more\"");
        break;
    }
  }
  std::string completion = JoinLines(lines, true);
  completion += profile.stop_token;
  completion += "\nThis view shows the requested screen.";
  std::string text = TruncateAtStop(completion, profile.stop_token);
  // Token budget exhausted before the stop token: keep the prefix holding
  // the first max_tokens word tokens.
  int tokens = 0;
  bool in_token = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const bool word_char = std::isalnum(static_cast<unsigned char>(text[i])) != 0;
    if (word_char && !in_token && ++tokens > profile.max_tokens) {
      text.resize(i);
      break;
    }
    in_token = word_char;
  }
  if (text.empty()) return EmptyCompletionError();
  return text;
}

// ---------------------------------------------------------------------------

absl::StatusOr<std::unique_ptr<HttpGenerator>> HttpGenerator::Create(
    std::string url, std::chrono::milliseconds timeout) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos || url.substr(0, scheme_end) != "http") {
    return absl::InvalidArgumentError(
        StrCat("generator url must be http://host[:port]/path: ", url));
  }
  const auto path_start = url.find('/', scheme_end + 3);
  std::string origin = url.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
  return std::unique_ptr<HttpGenerator>(
      new HttpGenerator(std::move(origin), std::move(path), timeout));
}

absl::StatusOr<std::string> HttpGenerator::Generate(std::string_view prompt,
                                                    const SamplingProfile& profile) {
  if (prompt.empty()) return absl::InvalidArgumentError("prompt is empty");
  httplib::Client client(origin_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  nlohmann::json body{{"prompt", prompt},
                      {"temperature", profile.temperature},
                      {"top_k", profile.top_k},
                      {"top_p", profile.top_p},
                      {"max_tokens", profile.max_tokens},
                      {"stop", profile.stop_token}};
  auto res = client.Post(path_, body.dump(), "application/json");
  if (!res) {
    return absl::UnavailableError(StrCat(
        "generator endpoint unreachable: ", httplib::to_string(res.error())));
  }
  if (res->status >= 500 || res->status == 429) {
    return absl::UnavailableError(StrCat("generator returned HTTP ", res->status));
  }
  if (res->status != 200) {
    return absl::InvalidArgumentError(StrCat("generator returned HTTP ", res->status));
  }
  auto parsed = nlohmann::json::parse(res->body, nullptr, false);
  if (parsed.is_discarded() || !parsed.contains("text") || !parsed["text"].is_string()) {
    return absl::InvalidArgumentError("generator response lacks a text field");
  }
  std::string text = TruncateAtStop(parsed["text"].get<std::string>(), profile.stop_token);
  if (text.empty()) return EmptyCompletionError();
  return text;
}

}  // namespace refinery::adapters
