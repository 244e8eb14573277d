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

#include "refinery/scoring/relevance.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "refinery/common/strings.h"
#include "refinery/kernels/cosine.h"

namespace refinery::scoring {

RelevanceScore Combine(double text_sim, std::optional<double> visual_sim) {
  RelevanceScore s;
  s.text_sim = text_sim;
  s.visual_sim = visual_sim;
  s.combined = visual_sim ? (text_sim + *visual_sim) / 2.0 : text_sim;
  return s;
}

absl::StatusOr<RelevanceScore> ComputeRelevance(
    const adapters::EmbeddingVector& description,
    const adapters::EmbeddingVector& render,
    const adapters::EmbeddingVector* ground_truth) {
  auto text = adapters::Cosine(description, render);
  if (!text.ok()) return text.status();
  std::optional<double> visual;
  if (ground_truth != nullptr) {
    auto v = adapters::Cosine(render, *ground_truth);
    if (!v.ok()) return v.status();
    visual = *v;
  }
  return Combine(*text, visual);
}

absl::StatusOr<std::vector<RelevanceScore>> ComputeRelevanceBatch(
    std::span<const RelevanceInput> inputs, bool parallel) {
  std::vector<RelevanceScore> out;
  if (inputs.empty()) return out;
  const std::size_t dim = inputs.front().description->dimension();
  std::vector<adapters::EmbeddingVector> desc, render, gt_render, gt;
  std::vector<std::size_t> gt_index;
  desc.reserve(inputs.size());
  render.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& in = inputs[i];
    if (in.description == nullptr || in.render == nullptr) {
      return absl::InvalidArgumentError("relevance input lacks a vector");
    }
    for (const auto* v : {in.description, in.render, in.ground_truth}) {
      if (v != nullptr && v->dimension() != dim) {
        return absl::InvalidArgumentError(StrCat(
            "embedding dimension mismatch: ", v->dimension(), " vs ", dim));
      }
    }
    desc.push_back(*in.description);
    render.push_back(*in.render);
    if (in.ground_truth != nullptr) {
      gt_render.push_back(*in.render);
      gt.push_back(*in.ground_truth);
      gt_index.push_back(i);
    }
  }
  const auto dot = parallel ? kernels::RowwiseDotParallel : kernels::RowwiseDotSerial;
  const std::vector<double> text = dot(kernels::Pack(desc), kernels::Pack(render));
  const std::vector<double> visual =
      gt.empty() ? std::vector<double>{} : dot(kernels::Pack(gt_render), kernels::Pack(gt));
  std::vector<std::optional<double>> visual_at(inputs.size());
  for (std::size_t k = 0; k < gt_index.size(); ++k) {
    visual_at[gt_index[k]] = std::clamp(visual[k], -1.0, 1.0);
  }
  out.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    out.push_back(Combine(std::clamp(text[i], -1.0, 1.0), visual_at[i]));
  }
  return out;
}

nlohmann::json ToJson(const RelevanceScore& s) {
  return {{"text_sim", s.text_sim},
          {"visual_sim", s.visual_sim ? nlohmann::json(*s.visual_sim) : nlohmann::json(nullptr)},
          {"combined", s.combined}};
}

absl::StatusOr<RelevanceScore> RelevanceFromJson(const nlohmann::json& j) {
  try {
    RelevanceScore s;
    s.text_sim = j.at("text_sim").get<double>();
    if (j.contains("visual_sim") && !j.at("visual_sim").is_null()) {
      s.visual_sim = j.at("visual_sim").get<double>();
    }
    s.combined = j.at("combined").get<double>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(StrCat("malformed relevance score: ", e.what()));
  }
}

absl::StatusOr<double> ErrorFreeFraction(const adapters::CompileOutcome& outcome) {
  if (outcome.total_lines <= 0) {
    return absl::InvalidArgumentError("error-free fraction of a zero-line program");
  }
  std::set<int> error_lines;
  for (const auto& d : outcome.diagnostics) {
    if (d.is_error()) error_lines.insert(d.line);
  }
  return 1.0 - static_cast<double>(error_lines.size()) /
                   static_cast<double>(outcome.total_lines);
}

}  // namespace refinery::scoring
