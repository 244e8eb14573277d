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

#include "refinery/adapters/external_compiler.h"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>

#include "refinery/common/strings.h"
#include "refinery/adapters/hash_embedder.h"

namespace refinery::adapters {
namespace {

std::string MessageCode(std::string_view message, bool error) {
  static const std::regex kQuoted(R"('[^']*'|"[^"]*"|\d+)");
  const std::string masked = std::regex_replace(std::string(message), kQuoted, "_");
  return fmt::format("{}_{:08x}", error ? "E" : "W",
                     static_cast<std::uint32_t>(Fnv1a64(masked)));
}

std::string ShellQuote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out.push_back(c);
    }
  }
  out.push_back('\'');
  return out;
}

}  // namespace

std::vector<Diagnostic> ParseCompilerOutput(std::string_view output, int total_lines) {
  static const std::regex kLine(R"(^(.*?):(\d+):(\d+): (error|warning): (.*)$)");
  std::vector<Diagnostic> diags;
  for (const auto& line : SplitLines(output)) {
    std::smatch m;
    if (!std::regex_match(line, m, kLine)) continue;
    Diagnostic d;
    d.line = std::clamp(std::stoi(m[2].str()), 1, std::max(1, total_lines));
    d.column = std::stoi(m[3].str());
    d.severity = m[4].str() == "error" ? Severity::kError : Severity::kWarning;
    d.message = m[5].str();
    d.code = MessageCode(d.message, d.is_error());
    diags.push_back(std::move(d));
  }
  return diags;
}

absl::StatusOr<CompileOutcome> ExternalCompiler::Compile(std::string_view source) {
  std::string tmpl =
      (std::filesystem::temp_directory_path() / "refinery-XXXXXX").string() + extension_;
  std::vector<char> name(tmpl.begin(), tmpl.end());
  name.push_back('\0');
  const int fd = ::mkstemps(name.data(), static_cast<int>(extension_.size()));
  if (fd < 0) return absl::UnavailableError("cannot create temporary source file");
  ::close(fd);
  const std::string path(name.data());
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(source.data(), static_cast<std::streamsize>(source.size()));
  }

  std::string cmd = command_;
  if (cmd.find("{file}") != std::string::npos) {
    const std::string quoted = ShellQuote(path);
    for (auto pos = cmd.find("{file}"); pos != std::string::npos;
         pos = cmd.find("{file}", pos + quoted.size())) {
      cmd.replace(pos, 6, quoted);
    }
  } else {
    cmd = StrCat(cmd, " ", ShellQuote(path));
  }
  cmd += " 2>&1";

  std::string output;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) {
    std::filesystem::remove(path);
    return absl::UnavailableError("cannot spawn compiler process");
  }
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) output.append(buf, n);
  const int status = ::pclose(pipe);
  std::filesystem::remove(path);

  const int exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  if (exit_code == 127) {
    return absl::FailedPreconditionError(
        StrCat("compiler command not found: ", command_));
  }
  CompileOutcome outcome;
  outcome.total_lines = CountLines(source);
  outcome.diagnostics = ParseCompilerOutput(output, outcome.total_lines);
  if (exit_code != 0 && outcome.error_count() == 0) {
    outcome.diagnostics.push_back(
        {1, std::nullopt, std::string(kToolchainError),
         StrCat("compiler exited with status ", exit_code,
                      " without reporting an error"),
         Severity::kError});
  }
  outcome.success = outcome.error_count() == 0;
  return outcome;
}

}  // namespace refinery::adapters
