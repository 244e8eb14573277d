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

#ifndef REFINERY_STORE_BLOB_STORE_H_
#define REFINERY_STORE_BLOB_STORE_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"

namespace refinery::store {

enum class MediaKind { kProgramSource, kRenderArtifact, kEmbedding, kDatasetShard };

std::string_view MediaKindName(MediaKind kind);
absl::StatusOr<MediaKind> ParseMediaKind(std::string_view name);

// Digest algorithm used for every blob key. Recorded in run manifests.
inline constexpr std::string_view kDigestAlgorithm = "sha256";

// Lowercase hex SHA-256 of `bytes`.
std::string Sha256Hex(std::string_view bytes);

struct BlobRef {
  std::string key;
  std::uint64_t size_bytes = 0;
  MediaKind media_kind = MediaKind::kProgramSource;

  friend bool operator==(const BlobRef&, const BlobRef&) = default;
};

// Computes the reference `bytes` would be stored under, without storing.
BlobRef MakeBlobRef(std::string_view bytes, MediaKind kind);

nlohmann::json ToJson(const BlobRef& ref);
absl::StatusOr<BlobRef> BlobRefFromJson(const nlohmann::json& j);

// Content-addressed blob storage on the local filesystem. Layout is
// `<root>/blobs/<first two hex chars>/<key>`. Writes go through a temporary
// file and an atomic rename, so concurrent puts of the same bytes from any
// number of threads or processes are race-free.
class BlobStore {
 public:
  explicit BlobStore(std::filesystem::path root);

  // Empty input is rejected. IO failures come back as kUnavailable, which
  // callers treat as retryable.
  absl::StatusOr<BlobRef> Put(std::string_view bytes, MediaKind kind);
  absl::StatusOr<std::string> Get(std::string_view key) const;
  bool Contains(std::string_view key) const;

  std::filesystem::path PathFor(std::string_view key) const;
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
};

}  // namespace refinery::store

#endif  // REFINERY_STORE_BLOB_STORE_H_
