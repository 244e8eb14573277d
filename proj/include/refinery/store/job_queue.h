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

#ifndef REFINERY_STORE_JOB_QUEUE_H_
#define REFINERY_STORE_JOB_QUEUE_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "refinery/store/blob_store.h"

struct sqlite3;

namespace refinery::store {

enum class JobKind { kGenerate, kCompileRender, kScore };

std::string_view JobKindName(JobKind kind);
absl::StatusOr<JobKind> ParseJobKind(std::string_view name);

using TimePoint = std::chrono::system_clock::time_point;
using Clock = std::function<TimePoint()>;

struct Job {
  std::string job_id;
  JobKind kind = JobKind::kGenerate;
  BlobRef payload_ref;
  std::optional<TimePoint> lease_deadline;
  int attempts = 0;
};

struct QueueCounts {
  int pending = 0;  // never leased, or lease expired
  int leased = 0;   // lease still live
  int done = 0;
};

// At-least-once job queue with visibility timeouts, persisted in a SQLite
// database so several worker processes can share it. A job becomes invisible
// for `visibility_timeout` after each lease; if it is not completed by then
// it is handed out again with `attempts` incremented.
//
// Completion is keyed by job id, not by lease, and is recorded exactly once:
// the first Complete() returns true and every later one returns false.
class JobQueue {
 public:
  // `path` may be ":memory:" for a process-local queue.
  static absl::StatusOr<std::unique_ptr<JobQueue>> Open(
      const std::filesystem::path& path, Clock clock = {});

  ~JobQueue();
  JobQueue(const JobQueue&) = delete;
  JobQueue& operator=(const JobQueue&) = delete;

  // Returns false without modification when `job_id` already exists.
  absl::StatusOr<bool> Enqueue(std::string_view job_id, JobKind kind,
                               const BlobRef& payload_ref);

  absl::StatusOr<std::optional<Job>> Lease(
      JobKind kind, std::chrono::milliseconds visibility_timeout);

  // kNotFound for unknown ids, kFailedPrecondition for jobs never leased.
  absl::StatusOr<bool> Complete(std::string_view job_id);

  absl::StatusOr<QueueCounts> Counts(JobKind kind);

 private:
  JobQueue(sqlite3* db, Clock clock);

  absl::Status Exec(const char* sql);
  std::int64_t NowMillis() const;

  sqlite3* db_;
  Clock clock_;
  std::mutex mu_;
};

}  // namespace refinery::store

#endif  // REFINERY_STORE_JOB_QUEUE_H_
