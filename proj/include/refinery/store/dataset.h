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

#ifndef REFINERY_STORE_DATASET_H_
#define REFINERY_STORE_DATASET_H_

#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <unordered_set>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"

namespace refinery::store {

// Append-only JSON Lines dataset. Every record is a JSON object carrying a
// unique id under `id_field`; appending an id that is already present is a
// no-op that reports false, which is what makes pipeline stages resumable.
class Dataset {
 public:
  // Opens (creating if needed) the dataset at `path`. A torn final line left
  // by a crashed writer is truncated away.
  static absl::StatusOr<Dataset> Open(std::filesystem::path path,
                                      std::string id_field = "record_id");

  Dataset(Dataset&& other) noexcept;
  Dataset& operator=(Dataset&&) = delete;

  absl::StatusOr<bool> Append(const nlohmann::json& record);
  bool Contains(const std::string& id) const;
  std::size_t size() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  Dataset(std::filesystem::path path, std::string id_field);

  std::filesystem::path path_;
  std::string id_field_;
  mutable std::mutex mu_;
  std::unordered_set<std::string> ids_;
  std::ofstream out_;
};

// Reads every record of a JSON Lines file in order. A missing file reads as
// empty.
absl::StatusOr<std::vector<nlohmann::json>> ReadJsonLines(
    const std::filesystem::path& path);

// Serializes records one per line, in the given order.
std::string ToJsonLines(const std::vector<nlohmann::json>& records);

}  // namespace refinery::store

#endif  // REFINERY_STORE_DATASET_H_
