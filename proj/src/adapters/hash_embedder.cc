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

#include "refinery/adapters/hash_embedder.h"

#include <cctype>

namespace refinery::adapters {

std::vector<std::string> WordTokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isalnum(c) && c < 0x80) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

namespace {

void CollectTokens(const WidgetNode& node, std::vector<std::string>& out) {
  out.push_back(node.kind);
  for (auto& t : WordTokens(node.text)) out.push_back(std::move(t));
  for (auto& t : WordTokens(node.asset)) out.push_back(std::move(t));
  for (const auto& child : node.children) CollectTokens(child, out);
}

}  // namespace

std::vector<std::string> DescriptorTokens(const WidgetNode& root) {
  std::vector<std::string> tokens;
  CollectTokens(root, tokens);
  return tokens;
}

std::uint64_t Fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

const std::unordered_set<std::string>& HashEmbedder::DefaultStopwords() {
  static const auto* words = new std::unordered_set<std::string>{
      "a",    "an",   "the",  "and", "or",   "of",   "to",   "in",  "on",
      "at",   "for",  "with", "by",  "from", "is",   "are",  "be",  "it",
      "its",  "this", "that", "as",  "has",  "have", "which"};
  return *words;
}

HashEmbedder::HashEmbedder(std::size_t dimension)
    : HashEmbedder(dimension, DefaultStopwords()) {}

HashEmbedder::HashEmbedder(std::size_t dimension,
                           std::unordered_set<std::string> stopwords)
    : dimension_(dimension), stopwords_(std::move(stopwords)) {}

absl::StatusOr<EmbeddingVector> HashEmbedder::EmbedTokens(
    const std::vector<std::string>& tokens) const {
  if (dimension_ == 0) return absl::InvalidArgumentError("embedding dimension is 0");
  std::vector<double> values(dimension_, 0.0);
  bool any = false;
  for (const auto& token : tokens) {
    if (stopwords_.contains(token)) continue;
    const std::uint64_t h = Fnv1a64(token);
    values[h % dimension_] += (h >> 63) ? -1.0 : 1.0;
    any = true;
  }
  if (!any) {
    return absl::FailedPreconditionError("no embeddable tokens (zero vector)");
  }
  return Normalize(std::move(values));
}

absl::StatusOr<EmbeddingVector> HashEmbedder::EmbedText(std::string_view text) {
  return EmbedTokens(WordTokens(text));
}

absl::StatusOr<EmbeddingVector> HashEmbedder::EmbedRender(
    const RenderArtifact& artifact) {
  return EmbedTokens(DescriptorTokens(artifact.descriptor));
}

}  // namespace refinery::adapters
