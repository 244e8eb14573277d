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

#ifndef REFINERY_ADAPTERS_TYPES_H_
#define REFINERY_ADAPTERS_TYPES_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "refinery/store/blob_store.h"

namespace refinery::adapters {

struct SamplingProfile {
  std::string profile_id;
  double temperature = 0.2;
  int top_k = 70;
  double top_p = 0.85;
  std::string stop_token = "<|end|>";
  int max_tokens = 2048;

  absl::Status Validate() const;
};

nlohmann::json ToJson(const SamplingProfile& profile);

enum class Severity { kError, kWarning };

struct Diagnostic {
  int line = 1;                 // 1-based
  std::optional<int> column;    // 1-based
  std::string code;
  std::string message;
  Severity severity = Severity::kError;

  bool is_error() const { return severity == Severity::kError; }
  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

struct CompileOutcome {
  bool success = false;
  std::vector<Diagnostic> diagnostics;
  int total_lines = 0;

  int error_count() const;
  friend bool operator==(const CompileOutcome&, const CompileOutcome&) = default;
};

// Counts lines the way every module does: newline-separated, blank lines
// included, and a trailing newline does not open a new line. "" has 0 lines.
int CountLines(std::string_view source);

// Splits on '\n'. Each element excludes its terminator; a trailing newline
// does not produce an empty final element.
std::vector<std::string> SplitLines(std::string_view source);
std::string JoinLines(const std::vector<std::string>& lines,
                      bool trailing_newline);

nlohmann::json ToJson(const Diagnostic& d);
nlohmann::json ToJson(const CompileOutcome& outcome);
absl::StatusOr<CompileOutcome> CompileOutcomeFromJson(const nlohmann::json& j);

struct Box {
  double x = 0, y = 0, width = 0, height = 0;
  friend bool operator==(const Box&, const Box&) = default;
};

// One node of a rendered widget tree.
struct WidgetNode {
  std::string kind;   // lowercase component name: screen, vstack, text, ...
  std::string text;   // text/button label; empty otherwise
  std::string asset;  // image asset after placeholder substitution
  Box box;
  std::vector<WidgetNode> children;

  friend bool operator==(const WidgetNode&, const WidgetNode&) = default;
};

nlohmann::json ToJson(const WidgetNode& node);

inline constexpr std::string_view kPlaceholderAsset = "PLACEHOLDER";

struct RenderArtifact {
  store::BlobRef blob;  // reference of Serialize(descriptor)
  WidgetNode descriptor;
  int width_px = 0;
  int height_px = 0;

  // Canonical bytes of the descriptor; `blob` is their content address.
  std::string Serialize() const;
};

struct EmbeddingVector {
  std::vector<double> values;
  double norm = 0.0;

  std::size_t dimension() const { return values.size(); }
};

// L2-normalizes `values`; kFailedPrecondition for a zero vector.
absl::StatusOr<EmbeddingVector> Normalize(std::vector<double> values);

// Cosine similarity clamped to [-1, 1]; kInvalidArgument on dimension
// mismatch or zero norm.
absl::StatusOr<double> Cosine(const EmbeddingVector& a, const EmbeddingVector& b);

nlohmann::json ToJson(const EmbeddingVector& v);
absl::StatusOr<EmbeddingVector> EmbeddingFromJson(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Capability contracts. Implementations must be safe to call concurrently.

class Generator {
 public:
  virtual ~Generator() = default;
  // Returns the completion truncated at the profile's stop token.
  // kUnavailable / kDeadlineExceeded are transient; kNotFound marks an empty
  // completion.
  virtual absl::StatusOr<std::string> Generate(
      std::string_view prompt, const SamplingProfile& profile) = 0;
};

class Compiler {
 public:
  virtual ~Compiler() = default;
  // A failed compile is a successful call with success=false. A non-OK status
  // means the compiler itself could not run (configuration error).
  virtual absl::StatusOr<CompileOutcome> Compile(std::string_view source) = 0;
};

class Renderer {
 public:
  virtual ~Renderer() = default;
  // kFailedPrecondition when `source` does not compile.
  virtual absl::StatusOr<RenderArtifact> Render(std::string_view source) = 0;
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::size_t dimension() const = 0;
  virtual absl::StatusOr<EmbeddingVector> EmbedText(std::string_view text) = 0;
  virtual absl::StatusOr<EmbeddingVector> EmbedRender(
      const RenderArtifact& artifact) = 0;
};

// Truncates at the first occurrence of `stop_token` (exclusive). An empty
// stop token leaves `text` unchanged.
std::string TruncateAtStop(std::string_view text, std::string_view stop_token);

bool IsTransient(const absl::Status& status);

}  // namespace refinery::adapters

#endif  // REFINERY_ADAPTERS_TYPES_H_
