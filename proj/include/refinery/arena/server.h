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

#ifndef REFINERY_ARENA_SERVER_H_
#define REFINERY_ARENA_SERVER_H_

#include <filesystem>
#include <memory>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "refinery/arena/pair_service.h"
#include "refinery/store/blob_store.h"

namespace refinery::arena {

// HTTP front end of a PairService:
//   GET  /api/pairs/next?rater=<id>  blinded pair, 204 when exhausted
//   POST /api/preferences            {pair_id, choice, rater_id}
//   GET  /api/leaderboard
//   GET  /api/renders/<ref>
//   GET  /api/instructions
class ArenaServer {
 public:
  ArenaServer(PairService& service, const store::BlobStore& blobs);
  ~ArenaServer();

  ArenaServer(const ArenaServer&) = delete;
  ArenaServer& operator=(const ArenaServer&) = delete;

  // Serves files under `dir` at "/".
  absl::Status MountStatic(const std::filesystem::path& dir);

  // Binds `host:port`; port 0 picks a free one. Returns the bound port.
  absl::StatusOr<int> Bind(const std::string& host, int port);

  // Blocks until Stop(). Requires a prior Bind.
  absl::Status Serve();

  void Stop();
  void WaitUntilReady() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace refinery::arena

#endif  // REFINERY_ARENA_SERVER_H_
