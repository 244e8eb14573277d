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

#ifndef REFINERY_ADAPTERS_HASH_EMBEDDER_H_
#define REFINERY_ADAPTERS_HASH_EMBEDDER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "refinery/adapters/types.h"

namespace refinery::adapters {

inline constexpr std::size_t kDefaultEmbeddingDim = 64;

// Lowercase ASCII word tokens: maximal runs of [a-z0-9] after lowercasing.
std::vector<std::string> WordTokens(std::string_view text);

// Pre-order token stream of a widget tree: each node's kind followed by the
// word tokens of its text and asset.
std::vector<std::string> DescriptorTokens(const WidgetNode& root);

// 64-bit FNV-1a.
std::uint64_t Fnv1a64(std::string_view bytes);

// Reference embedder. Each non-stopword token adds +1 or -1 to bucket
// hash % D, the sign taken from the top hash bit; the sum is L2-normalized.
// Descriptor tokens of a render are hashed the same way, so text and
// renders share one space.
class HashEmbedder final : public Embedder {
 public:
  explicit HashEmbedder(std::size_t dimension = kDefaultEmbeddingDim);
  HashEmbedder(std::size_t dimension, std::unordered_set<std::string> stopwords);

  std::size_t dimension() const override { return dimension_; }
  absl::StatusOr<EmbeddingVector> EmbedText(std::string_view text) override;
  absl::StatusOr<EmbeddingVector> EmbedRender(const RenderArtifact& artifact) override;

  absl::StatusOr<EmbeddingVector> EmbedTokens(const std::vector<std::string>& tokens) const;

  static const std::unordered_set<std::string>& DefaultStopwords();

 private:
  std::size_t dimension_;
  std::unordered_set<std::string> stopwords_;
};

}  // namespace refinery::adapters

#endif  // REFINERY_ADAPTERS_HASH_EMBEDDER_H_
