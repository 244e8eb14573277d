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

#include "refinery/adapters/types.h"

#include <algorithm>
#include <cmath>

#include "refinery/common/strings.h"

namespace refinery::adapters {

absl::Status SamplingProfile::Validate() const {
  if (profile_id.empty()) return absl::InvalidArgumentError("profile_id is empty");
  if (!(temperature >= 0.0)) {
    return absl::InvalidArgumentError(
        StrCat(profile_id, ": temperature must be >= 0"));
  }
  if (top_k <= 0) {
    return absl::InvalidArgumentError(StrCat(profile_id, ": top_k must be > 0"));
  }
  if (!(top_p > 0.0 && top_p <= 1.0)) {
    return absl::InvalidArgumentError(
        StrCat(profile_id, ": top_p must be in (0, 1]"));
  }
  if (max_tokens <= 0) {
    return absl::InvalidArgumentError(
        StrCat(profile_id, ": max_tokens must be > 0"));
  }
  return absl::OkStatus();
}

nlohmann::json ToJson(const SamplingProfile& p) {
  return {{"profile_id", p.profile_id}, {"temperature", p.temperature},
          {"top_k", p.top_k},           {"top_p", p.top_p},
          {"stop_token", p.stop_token}, {"max_tokens", p.max_tokens}};
}

int CompileOutcome::error_count() const {
  return static_cast<int>(std::count_if(diagnostics.begin(), diagnostics.end(),
                                        [](const Diagnostic& d) { return d.is_error(); }));
}

int CountLines(std::string_view source) {
  if (source.empty()) return 0;
  int n = static_cast<int>(std::count(source.begin(), source.end(), '\n'));
  if (source.back() != '\n') ++n;
  return n;
}

std::vector<std::string> SplitLines(std::string_view source) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < source.size()) {
    std::size_t nl = source.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.emplace_back(source.substr(start));
      break;
    }
    lines.emplace_back(source.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::string JoinLines(const std::vector<std::string>& lines,
                      bool trailing_newline) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out += lines[i];
    if (i + 1 < lines.size() || trailing_newline) out += '\n';
  }
  return out;
}

nlohmann::json ToJson(const Diagnostic& d) {
  nlohmann::json j{{"line", d.line},
                   {"code", d.code},
                   {"message", d.message},
                   {"severity", d.is_error() ? "error" : "warning"}};
  j["column"] = d.column ? nlohmann::json(*d.column) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json ToJson(const CompileOutcome& outcome) {
  nlohmann::json diags = nlohmann::json::array();
  for (const auto& d : outcome.diagnostics) diags.push_back(ToJson(d));
  return {{"success", outcome.success},
          {"diagnostics", std::move(diags)},
          {"total_lines", outcome.total_lines}};
}

absl::StatusOr<CompileOutcome> CompileOutcomeFromJson(const nlohmann::json& j) {
  try {
    CompileOutcome out;
    out.success = j.at("success").get<bool>();
    out.total_lines = j.at("total_lines").get<int>();
    for (const auto& d : j.at("diagnostics")) {
      Diagnostic diag;
      diag.line = d.at("line").get<int>();
      if (d.contains("column") && !d.at("column").is_null()) {
        diag.column = d.at("column").get<int>();
      }
      diag.code = d.at("code").get<std::string>();
      diag.message = d.at("message").get<std::string>();
      diag.severity = d.at("severity").get<std::string>() == "warning"
                          ? Severity::kWarning
                          : Severity::kError;
      out.diagnostics.push_back(std::move(diag));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        StrCat("malformed compile outcome: ", e.what()));
  }
}

nlohmann::json ToJson(const WidgetNode& node) {
  nlohmann::json j{{"kind", node.kind},
                   {"box",
                    {node.box.x, node.box.y, node.box.width, node.box.height}}};
  if (!node.text.empty()) j["text"] = node.text;
  if (!node.asset.empty()) j["asset"] = node.asset;
  if (!node.children.empty()) {
    nlohmann::json kids = nlohmann::json::array();
    for (const auto& c : node.children) kids.push_back(ToJson(c));
    j["children"] = std::move(kids);
  }
  return j;
}

std::string RenderArtifact::Serialize() const {
  nlohmann::json j{{"width_px", width_px},
                   {"height_px", height_px},
                   {"tree", ToJson(descriptor)}};
  return j.dump();
}

absl::StatusOr<EmbeddingVector> Normalize(std::vector<double> values) {
  double sq = 0.0;
  for (double v : values) sq += v * v;
  if (!(sq > 0.0) || !std::isfinite(sq)) {
    return absl::FailedPreconditionError("cannot normalize a zero vector");
  }
  const double inv = 1.0 / std::sqrt(sq);
  double sq2 = 0.0;
  for (double& v : values) {
    v *= inv;
    sq2 += v * v;
  }
  return EmbeddingVector{std::move(values), std::sqrt(sq2)};
}

absl::StatusOr<double> Cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dimension() != b.dimension()) {
    return absl::InvalidArgumentError(StrCat(
        "embedding dimension mismatch: ", a.dimension(), " vs ", b.dimension()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (!(na > 0.0) || !(nb > 0.0)) {
    return absl::InvalidArgumentError("cosine of a zero vector");
  }
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

nlohmann::json ToJson(const EmbeddingVector& v) {
  return {{"values", v.values}, {"norm", v.norm}};
}

absl::StatusOr<EmbeddingVector> EmbeddingFromJson(const nlohmann::json& j) {
  try {
    return EmbeddingVector{j.at("values").get<std::vector<double>>(),
                           j.at("norm").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(StrCat("malformed embedding: ", e.what()));
  }
}

std::string TruncateAtStop(std::string_view text, std::string_view stop_token) {
  if (stop_token.empty()) return std::string(text);
  const auto pos = text.find(stop_token);
  return std::string(pos == std::string_view::npos ? text : text.substr(0, pos));
}

bool IsTransient(const absl::Status& status) {
  return absl::IsUnavailable(status) || absl::IsDeadlineExceeded(status) ||
         absl::IsResourceExhausted(status);
}

}  // namespace refinery::adapters
