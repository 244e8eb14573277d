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

#ifndef REFINERY_ADAPTERS_EXTERNAL_COMPILER_H_
#define REFINERY_ADAPTERS_EXTERNAL_COMPILER_H_

#include <string>
#include <string_view>
#include <vector>

#include "refinery/adapters/types.h"

namespace refinery::adapters {

inline constexpr std::string_view kToolchainError = "E_TOOLCHAIN";

// Parses `<file>:<line>:<col>: error|warning: <message>` lines. Codes are
// derived from the message with quoted names and numbers masked, so the same
// kind of error always gets the same code. Lines are clamped into
// [1, total_lines].
std::vector<Diagnostic> ParseCompilerOutput(std::string_view output, int total_lines);

// Runs an external compiler on a temporary copy of the source. `command` is
// a shell command; "{file}" in it is replaced by the temp file path, or the
// path is appended when absent. A nonzero exit with no parsed errors yields a
// single E_TOOLCHAIN diagnostic. An exit status of 127 (command not found)
// is a configuration error, not a compile failure.
class ExternalCompiler final : public Compiler {
 public:
  explicit ExternalCompiler(std::string command, std::string extension = ".swift")
      : command_(std::move(command)), extension_(std::move(extension)) {}

  absl::StatusOr<CompileOutcome> Compile(std::string_view source) override;

 private:
  std::string command_;
  std::string extension_;
};

}  // namespace refinery::adapters

#endif  // REFINERY_ADAPTERS_EXTERNAL_COMPILER_H_
