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

#include "refinery/scoring/prompts.h"

#include "refinery/common/strings.h"
#include "refinery/store/blob_store.h"

namespace refinery::scoring {
namespace {

std::size_t CountSlots(std::string_view tmpl) {
  std::size_t count = 0;
  for (auto pos = tmpl.find(kDescriptionSlot); pos != std::string_view::npos;
       pos = tmpl.find(kDescriptionSlot, pos + kDescriptionSlot.size())) {
    ++count;
  }
  return count;
}

std::string_view Normalize(std::string_view d) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  while (!d.empty() && is_space(d.front())) d.remove_prefix(1);
  while (!d.empty() && (is_space(d.back()) || d.back() == '.')) d.remove_suffix(1);
  return d;
}

}  // namespace

absl::StatusOr<std::string> FillTemplate(std::string_view tmpl,
                                         std::string_view description) {
  const auto slot = tmpl.find(kDescriptionSlot);
  if (slot == std::string_view::npos) {
    return absl::InvalidArgumentError("template has no {description} slot");
  }
  const std::string_view desc = Normalize(description);
  if (desc.empty()) return absl::InvalidArgumentError("description is empty");
  std::string body;
  if (slot > 0 && tmpl[slot - 1] == '"') {
    for (char c : desc) {
      if (c == '"' || c == '\\') body.push_back('\\');
      body.push_back(c);
    }
  } else {
    body.assign(desc);
  }
  return StrCat(tmpl.substr(0, slot), body,
                      tmpl.substr(slot + kDescriptionSlot.size()));
}

absl::StatusOr<PromptTemplates> PromptTemplates::Create(std::string scoring,
                                                        std::string generation,
                                                        std::string paraphrase) {
  for (const auto* t : {&scoring, &generation, &paraphrase}) {
    if (CountSlots(*t) != 1) {
      return absl::InvalidArgumentError(StrCat(
          "template must contain exactly one {description} slot: \"", *t, "\""));
    }
  }
  return PromptTemplates(std::move(scoring), std::move(generation),
                         std::move(paraphrase));
}

PromptTemplates PromptTemplates::Defaults() {
  return PromptTemplates(std::string(kDefaultScoringTemplate),
                         std::string(kDefaultGenerationTemplate),
                         std::string(kDefaultParaphraseTemplate));
}

absl::StatusOr<std::string> PromptTemplates::ScoringPrompt(std::string_view d) const {
  return FillTemplate(scoring_, d);
}
absl::StatusOr<std::string> PromptTemplates::GenerationPrompt(std::string_view d) const {
  return FillTemplate(generation_, d);
}
absl::StatusOr<std::string> PromptTemplates::ParaphrasePrompt(std::string_view d) const {
  return FillTemplate(paraphrase_, d);
}

std::string PromptTemplates::Digest() const {
  return store::Sha256Hex(StrCat(scoring_, "\x1f", generation_, "\x1f", paraphrase_));
}

absl::StatusOr<std::string> BuildScoringPrompt(std::string_view description) {
  return FillTemplate(kDefaultScoringTemplate, description);
}

absl::StatusOr<std::string> BuildGenerationPrompt(std::string_view description) {
  return FillTemplate(kDefaultGenerationTemplate, description);
}

}  // namespace refinery::scoring
