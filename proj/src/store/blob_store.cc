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

#include "refinery/store/blob_store.h"

#include <openssl/evp.h>

#include <array>
#include <atomic>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "refinery/common/strings.h"

namespace refinery::store {
namespace {

constexpr std::array<std::pair<MediaKind, std::string_view>, 4> kMediaKindNames{{
    {MediaKind::kProgramSource, "program_source"},
    {MediaKind::kRenderArtifact, "render_artifact"},
    {MediaKind::kEmbedding, "embedding"},
    {MediaKind::kDatasetShard, "dataset_shard"},
}};

bool IsHexKey(std::string_view key) {
  if (key.size() != 64) return false;
  for (char c : key) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

}  // namespace

std::string_view MediaKindName(MediaKind kind) {
  for (const auto& [k, name] : kMediaKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

absl::StatusOr<MediaKind> ParseMediaKind(std::string_view name) {
  for (const auto& [k, n] : kMediaKindNames) {
    if (n == name) return k;
  }
  return absl::InvalidArgumentError(StrCat("unknown media kind: ", name));
}

std::string Sha256Hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(),
             nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

BlobRef MakeBlobRef(std::string_view bytes, MediaKind kind) {
  return BlobRef{Sha256Hex(bytes), bytes.size(), kind};
}

nlohmann::json ToJson(const BlobRef& ref) {
  return nlohmann::json{{"key", ref.key},
                        {"size_bytes", ref.size_bytes},
                        {"media_kind", std::string(MediaKindName(ref.media_kind))}};
}

absl::StatusOr<BlobRef> BlobRefFromJson(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("key") || !j.contains("size_bytes") ||
      !j.contains("media_kind")) {
    return absl::InvalidArgumentError("malformed blob ref");
  }
  auto kind = ParseMediaKind(j.at("media_kind").get<std::string>());
  if (!kind.ok()) return kind.status();
  return BlobRef{j.at("key").get<std::string>(),
                 j.at("size_bytes").get<std::uint64_t>(), *kind};
}

BlobStore::BlobStore(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path BlobStore::PathFor(std::string_view key) const {
  return root_ / "blobs" / std::string(key.substr(0, 2)) / std::string(key);
}

absl::StatusOr<BlobRef> BlobStore::Put(std::string_view bytes, MediaKind kind) {
  if (bytes.empty()) {
    return absl::InvalidArgumentError("cannot store an empty blob");
  }
  BlobRef ref = MakeBlobRef(bytes, kind);
  const auto final_path = PathFor(ref.key);
  std::error_code ec;
  if (std::filesystem::exists(final_path, ec)) return ref;

  std::filesystem::create_directories(final_path.parent_path(), ec);
  if (ec) {
    return absl::UnavailableError(
        StrCat("cannot create blob directory: ", ec.message()));
  }
  static std::atomic<std::uint64_t> counter{0};
  const auto tmp_path = final_path.parent_path() /
                        StrCat(".", ref.key, ".", ::getpid(), ".",
                                     counter.fetch_add(1), ".tmp");
  {
    std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp_path, ec);
      return absl::UnavailableError(
          StrCat("short write for blob ", ref.key));
    }
  }
  std::filesystem::rename(tmp_path, final_path, ec);
  if (ec) {
    std::filesystem::remove(tmp_path, ec);
    return absl::UnavailableError(
        StrCat("cannot publish blob ", ref.key, ": ", ec.message()));
  }
  return ref;
}

absl::StatusOr<std::string> BlobStore::Get(std::string_view key) const {
  if (!IsHexKey(key)) {
    return absl::InvalidArgumentError(StrCat("malformed blob key: ", key));
  }
  std::ifstream in(PathFor(key), std::ios::binary);
  if (!in) return absl::NotFoundError(StrCat("no blob ", key));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool BlobStore::Contains(std::string_view key) const {
  std::error_code ec;
  return IsHexKey(key) && std::filesystem::exists(PathFor(key), ec);
}

}  // namespace refinery::store
