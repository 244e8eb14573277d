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

#include "refinery/store/dataset.h"

#include <sstream>
#include <system_error>

#include "refinery/common/strings.h"

namespace refinery::store {

absl::StatusOr<std::vector<nlohmann::json>> ReadJsonLines(
    const std::filesystem::path& path) {
  std::vector<nlohmann::json> records;
  std::ifstream in(path);
  if (!in) return records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto parsed = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded()) {
      return absl::DataLossError(
          StrCat(path.string(), ":", line_no, ": malformed record"));
    }
    records.push_back(std::move(parsed));
  }
  return records;
}

std::string ToJsonLines(const std::vector<nlohmann::json>& records) {
  std::string out;
  for (const auto& r : records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

Dataset::Dataset(std::filesystem::path path, std::string id_field)
    : path_(std::move(path)), id_field_(std::move(id_field)) {}

Dataset::Dataset(Dataset&& other) noexcept
    : path_(std::move(other.path_)),
      id_field_(std::move(other.id_field_)),
      ids_(std::move(other.ids_)),
      out_(std::move(other.out_)) {}

absl::StatusOr<Dataset> Dataset::Open(std::filesystem::path path,
                                      std::string id_field) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  Dataset ds(path, id_field);

  // Keep every complete line; drop a trailing partial one.
  std::string kept;
  {
    std::ifstream in(path, std::ios::binary);
    if (in) {
      std::stringstream buf;
      buf << in.rdbuf();
      const std::string content = buf.str();
      std::size_t start = 0;
      while (start < content.size()) {
        const std::size_t nl = content.find('\n', start);
        if (nl == std::string::npos) break;
        std::string_view line(content.data() + start, nl - start);
        start = nl + 1;
        if (line.empty()) continue;
        auto parsed = nlohmann::json::parse(line, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object() ||
            !parsed.contains(id_field)) {
          return absl::DataLossError(StrCat(
              path.string(), ": malformed record before end of file"));
        }
        ds.ids_.insert(parsed.at(id_field).get<std::string>());
        kept.append(line);
        kept.push_back('\n');
      }
      if (kept.size() != content.size()) {
        std::filesystem::resize_file(path, kept.size(), ec);
        if (ec) {
          return absl::UnavailableError(
              StrCat("cannot truncate torn record: ", ec.message()));
        }
      }
    }
  }
  ds.out_.open(path, std::ios::app | std::ios::binary);
  if (!ds.out_) {
    return absl::UnavailableError(
        StrCat("cannot open dataset ", path.string()));
  }
  return ds;
}

absl::StatusOr<bool> Dataset::Append(const nlohmann::json& record) {
  if (!record.is_object() || !record.contains(id_field_) ||
      !record.at(id_field_).is_string()) {
    return absl::InvalidArgumentError(
        StrCat("record lacks string field '", id_field_, "'"));
  }
  std::lock_guard lock(mu_);
  std::string id = record.at(id_field_).get<std::string>();
  if (ids_.contains(id)) return false;
  out_ << record.dump() << '\n';
  out_.flush();
  if (!out_) {
    return absl::UnavailableError(
        StrCat("write failed on ", path_.string()));
  }
  ids_.insert(std::move(id));
  return true;
}

bool Dataset::Contains(const std::string& id) const {
  std::lock_guard lock(mu_);
  return ids_.contains(id);
}

std::size_t Dataset::size() const {
  std::lock_guard lock(mu_);
  return ids_.size();
}

}  // namespace refinery::store
