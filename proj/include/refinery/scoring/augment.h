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

#ifndef REFINERY_SCORING_AUGMENT_H_
#define REFINERY_SCORING_AUGMENT_H_

#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "refinery/adapters/types.h"
#include "refinery/scoring/prompts.h"
#include "refinery/scoring/relevance.h"

namespace refinery::scoring {

struct AugmentResult {
  bool accepted = false;
  std::string text;         // the paraphrase, empty when none was produced
  double similarity = 0.0;  // cosine(paraphrase, ground truth)
};

// Asks the generator to paraphrase `description` and keeps the paraphrase
// only if its embedding is at least `min_sim` similar to the ground-truth
// screenshot embedding. Generator failures propagate (transient ones are
// retryable); an empty paraphrase is a rejection, not an error.
absl::StatusOr<AugmentResult> AugmentDescription(
    std::string_view description, adapters::Generator& generator,
    const adapters::SamplingProfile& profile, adapters::Embedder& embedder,
    const adapters::EmbeddingVector& ground_truth,
    double min_sim = kDefaultMinTextSim,
    const PromptTemplates& templates = PromptTemplates::Defaults());

}  // namespace refinery::scoring

#endif  // REFINERY_SCORING_AUGMENT_H_
