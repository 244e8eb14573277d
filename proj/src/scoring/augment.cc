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

#include "refinery/scoring/augment.h"

#include "refinery/adapters/generators.h"
#include "refinery/common/status_macros.h"

namespace refinery::scoring {

absl::StatusOr<AugmentResult> AugmentDescription(
    std::string_view description, adapters::Generator& generator,
    const adapters::SamplingProfile& profile, adapters::Embedder& embedder,
    const adapters::EmbeddingVector& ground_truth, double min_sim,
    const PromptTemplates& templates) {
  if (!(min_sim >= -1.0 && min_sim <= 1.0)) {
    return absl::InvalidArgumentError("min_sim must lie in [-1, 1]");
  }
  RF_ASSIGN_OR_RETURN(std::string prompt, templates.ParaphrasePrompt(description));
  auto paraphrase = generator.Generate(prompt, profile);
  AugmentResult result;
  if (!paraphrase.ok()) {
    if (adapters::IsEmptyCompletion(paraphrase.status())) return result;
    return paraphrase.status();
  }
  result.text = std::move(*paraphrase);
  auto vec = embedder.EmbedText(result.text);
  if (!vec.ok()) {
    // Nothing embeddable in the paraphrase.
    if (absl::IsFailedPrecondition(vec.status())) return result;
    return vec.status();
  }
  RF_ASSIGN_OR_RETURN(result.similarity, adapters::Cosine(*vec, ground_truth));
  result.accepted = result.similarity >= min_sim;
  return result;
}

}  // namespace refinery::scoring
