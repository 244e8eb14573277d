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

#ifndef REFINERY_SCORING_PROMPTS_H_
#define REFINERY_SCORING_PROMPTS_H_

#include <string>
#include <string_view>

#include "absl/status/statusor.h"

namespace refinery::scoring {

inline constexpr std::string_view kDescriptionSlot = "{description}";

inline constexpr std::string_view kDefaultScoringTemplate =
    "mobile user interface. well-designed. design awards winner. detailed app. "
    "featured screenshot. {description}.";
inline constexpr std::string_view kDefaultGenerationTemplate =
    "Generate all required code that uses image assets and realistic "
    "placeholder data for a SwiftUI view named ContentView with the following "
    "description: \"{description}.\"";
inline constexpr std::string_view kDefaultParaphraseTemplate =
    "rewrite the following description of a user interface for clarity "
    "\"{description}\". do not add any additional details.";

// Substitution rules shared by all templates:
//  * the description is trimmed of surrounding whitespace and trailing
//    periods, so a template that supplies its own "." never doubles it;
//  * when the slot sits directly after a double quote, '"' and '\' in the
//    description are backslash-escaped.
class PromptTemplates {
 public:
  // kInvalidArgument unless each template has exactly one slot.
  static absl::StatusOr<PromptTemplates> Create(std::string scoring,
                                                std::string generation,
                                                std::string paraphrase);
  static PromptTemplates Defaults();

  absl::StatusOr<std::string> ScoringPrompt(std::string_view description) const;
  absl::StatusOr<std::string> GenerationPrompt(std::string_view description) const;
  absl::StatusOr<std::string> ParaphrasePrompt(std::string_view description) const;

  const std::string& scoring_template() const { return scoring_; }
  const std::string& generation_template() const { return generation_; }
  const std::string& paraphrase_template() const { return paraphrase_; }

  // Hex digest over the three templates, recorded in manifests.
  std::string Digest() const;

 private:
  PromptTemplates(std::string scoring, std::string generation, std::string paraphrase)
      : scoring_(std::move(scoring)),
        generation_(std::move(generation)),
        paraphrase_(std::move(paraphrase)) {}

  std::string scoring_;
  std::string generation_;
  std::string paraphrase_;
};

absl::StatusOr<std::string> FillTemplate(std::string_view tmpl,
                                         std::string_view description);

// Convenience wrappers over the default templates.
absl::StatusOr<std::string> BuildScoringPrompt(std::string_view description);
absl::StatusOr<std::string> BuildGenerationPrompt(std::string_view description);

}  // namespace refinery::scoring

#endif  // REFINERY_SCORING_PROMPTS_H_
