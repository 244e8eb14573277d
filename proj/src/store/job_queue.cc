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

#include "refinery/store/job_queue.h"

#include <sqlite3.h>

#include <array>
#include <utility>

#include "refinery/common/strings.h"
#include "refinery/common/status_macros.h"

namespace refinery::store {
namespace {

constexpr std::array<std::pair<JobKind, std::string_view>, 3> kJobKindNames{{
    {JobKind::kGenerate, "generate"},
    {JobKind::kCompileRender, "compile_render"},
    {JobKind::kScore, "score"},
}};

// Thin RAII wrapper over a prepared statement.
class Statement {
 public:
  Statement(sqlite3* db, const char* sql) : db_(db) {
    rc_ = sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr);
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  absl::Status status() const {
    if (rc_ == SQLITE_OK) return absl::OkStatus();
    return absl::UnavailableError(
        StrCat("sqlite prepare: ", sqlite3_errmsg(db_)));
  }

  void Bind(int idx, std::string_view text) {
    sqlite3_bind_text(stmt_, idx, text.data(), static_cast<int>(text.size()),
                      SQLITE_TRANSIENT);
  }
  void Bind(int idx, std::int64_t value) { sqlite3_bind_int64(stmt_, idx, value); }

  // Returns true while rows are available.
  absl::StatusOr<bool> Step() {
    int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    return absl::UnavailableError(
        StrCat("sqlite step: ", sqlite3_errmsg(db_)));
  }

  std::string Text(int col) const {
    const auto* p = sqlite3_column_text(stmt_, col);
    return p == nullptr ? std::string()
                        : std::string(reinterpret_cast<const char*>(p));
  }
  std::int64_t Int(int col) const { return sqlite3_column_int64(stmt_, col); }
  bool IsNull(int col) const {
    return sqlite3_column_type(stmt_, col) == SQLITE_NULL;
  }

 private:
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
  int rc_;
};

// Rolls back unless Commit() succeeded.
class Transaction {
 public:
  explicit Transaction(sqlite3* db) : db_(db) {}
  ~Transaction() {
    if (open_) sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
  }
  absl::Status Begin() {
    if (sqlite3_exec(db_, "BEGIN IMMEDIATE", nullptr, nullptr, nullptr) !=
        SQLITE_OK) {
      return absl::UnavailableError(
          StrCat("sqlite begin: ", sqlite3_errmsg(db_)));
    }
    open_ = true;
    return absl::OkStatus();
  }
  absl::Status Commit() {
    if (sqlite3_exec(db_, "COMMIT", nullptr, nullptr, nullptr) != SQLITE_OK) {
      return absl::UnavailableError(
          StrCat("sqlite commit: ", sqlite3_errmsg(db_)));
    }
    open_ = false;
    return absl::OkStatus();
  }

 private:
  sqlite3* db_;
  bool open_ = false;
};

TimePoint FromMillis(std::int64_t ms) {
  return TimePoint(std::chrono::milliseconds(ms));
}

}  // namespace

std::string_view JobKindName(JobKind kind) {
  for (const auto& [k, name] : kJobKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

absl::StatusOr<JobKind> ParseJobKind(std::string_view name) {
  for (const auto& [k, n] : kJobKindNames) {
    if (n == name) return k;
  }
  return absl::InvalidArgumentError(StrCat("unknown job kind: ", name));
}

absl::StatusOr<std::unique_ptr<JobQueue>> JobQueue::Open(
    const std::filesystem::path& path, Clock clock) {
  sqlite3* db = nullptr;
  const int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE |
                    SQLITE_OPEN_FULLMUTEX;
  if (sqlite3_open_v2(path.c_str(), &db, flags, nullptr) != SQLITE_OK) {
    std::string msg = db ? sqlite3_errmsg(db) : "out of memory";
    sqlite3_close(db);
    return absl::UnavailableError(StrCat("cannot open queue ", path.string(),
                                               ": ", msg));
  }
  sqlite3_busy_timeout(db, 10000);
  if (!clock) clock = [] { return std::chrono::system_clock::now(); };
  std::unique_ptr<JobQueue> queue(new JobQueue(db, std::move(clock)));
  if (path != ":memory:") {
    RF_RETURN_IF_ERROR(queue->Exec("PRAGMA journal_mode=WAL"));
  }
  RF_RETURN_IF_ERROR(queue->Exec(
      "CREATE TABLE IF NOT EXISTS jobs ("
      "  seq INTEGER PRIMARY KEY AUTOINCREMENT,"
      "  job_id TEXT NOT NULL UNIQUE,"
      "  kind TEXT NOT NULL,"
      "  payload_key TEXT NOT NULL,"
      "  payload_size INTEGER NOT NULL,"
      "  payload_kind TEXT NOT NULL,"
      "  lease_deadline_ms INTEGER,"
      "  attempts INTEGER NOT NULL DEFAULT 0,"
      "  done INTEGER NOT NULL DEFAULT 0)"));
  RF_RETURN_IF_ERROR(queue->Exec(
      "CREATE INDEX IF NOT EXISTS jobs_ready ON jobs(kind, done, seq)"));
  return queue;
}

JobQueue::JobQueue(sqlite3* db, Clock clock)
    : db_(db), clock_(std::move(clock)) {}

JobQueue::~JobQueue() { sqlite3_close(db_); }

absl::Status JobQueue::Exec(const char* sql) {
  char* err = nullptr;
  if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown";
    sqlite3_free(err);
    return absl::UnavailableError(StrCat("sqlite: ", msg));
  }
  return absl::OkStatus();
}

std::int64_t JobQueue::NowMillis() const {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             clock_().time_since_epoch())
      .count();
}

absl::StatusOr<bool> JobQueue::Enqueue(std::string_view job_id, JobKind kind,
                                       const BlobRef& payload_ref) {
  std::lock_guard lock(mu_);
  Statement insert(db_,
                   "INSERT OR IGNORE INTO jobs (job_id, kind, payload_key, "
                   "payload_size, payload_kind) VALUES (?, ?, ?, ?, ?)");
  RF_RETURN_IF_ERROR(insert.status());
  insert.Bind(1, job_id);
  insert.Bind(2, JobKindName(kind));
  insert.Bind(3, payload_ref.key);
  insert.Bind(4, static_cast<std::int64_t>(payload_ref.size_bytes));
  insert.Bind(5, MediaKindName(payload_ref.media_kind));
  RF_RETURN_IF_ERROR(insert.Step().status());
  return sqlite3_changes(db_) == 1;
}

absl::StatusOr<std::optional<Job>> JobQueue::Lease(
    JobKind kind, std::chrono::milliseconds visibility_timeout) {
  if (visibility_timeout.count() <= 0) {
    return absl::InvalidArgumentError("visibility timeout must be positive");
  }
  std::lock_guard lock(mu_);
  Transaction txn(db_);
  RF_RETURN_IF_ERROR(txn.Begin());
  const std::int64_t now = NowMillis();

  Statement select(db_,
                   "SELECT job_id, payload_key, payload_size, payload_kind, "
                   "attempts FROM jobs WHERE kind = ? AND done = 0 AND "
                   "(lease_deadline_ms IS NULL OR lease_deadline_ms <= ?) "
                   "ORDER BY seq LIMIT 1");
  RF_RETURN_IF_ERROR(select.status());
  select.Bind(1, JobKindName(kind));
  select.Bind(2, now);
  RF_ASSIGN_OR_RETURN(bool found, select.Step());
  if (!found) return std::optional<Job>();

  Job job;
  job.job_id = select.Text(0);
  job.kind = kind;
  RF_ASSIGN_OR_RETURN(MediaKind media, ParseMediaKind(select.Text(3)));
  job.payload_ref = BlobRef{select.Text(1),
                            static_cast<std::uint64_t>(select.Int(2)), media};
  job.attempts = static_cast<int>(select.Int(4)) + 1;
  const std::int64_t deadline = now + visibility_timeout.count();
  job.lease_deadline = FromMillis(deadline);

  Statement update(db_,
                   "UPDATE jobs SET lease_deadline_ms = ?, attempts = ? "
                   "WHERE job_id = ?");
  RF_RETURN_IF_ERROR(update.status());
  update.Bind(1, deadline);
  update.Bind(2, static_cast<std::int64_t>(job.attempts));
  update.Bind(3, job.job_id);
  RF_RETURN_IF_ERROR(update.Step().status());
  RF_RETURN_IF_ERROR(txn.Commit());
  return std::optional<Job>(std::move(job));
}

absl::StatusOr<bool> JobQueue::Complete(std::string_view job_id) {
  std::lock_guard lock(mu_);
  Transaction txn(db_);
  RF_RETURN_IF_ERROR(txn.Begin());
  Statement select(db_, "SELECT attempts, done FROM jobs WHERE job_id = ?");
  RF_RETURN_IF_ERROR(select.status());
  select.Bind(1, job_id);
  RF_ASSIGN_OR_RETURN(bool found, select.Step());
  if (!found) {
    return absl::NotFoundError(StrCat("unknown job ", job_id));
  }
  if (select.Int(1) != 0) return false;
  if (select.Int(0) == 0) {
    return absl::FailedPreconditionError(
        StrCat("job ", job_id, " was never leased"));
  }
  Statement update(db_,
                   "UPDATE jobs SET done = 1, lease_deadline_ms = NULL "
                   "WHERE job_id = ? AND done = 0");
  RF_RETURN_IF_ERROR(update.status());
  update.Bind(1, job_id);
  RF_RETURN_IF_ERROR(update.Step().status());
  const bool changed = sqlite3_changes(db_) == 1;
  RF_RETURN_IF_ERROR(txn.Commit());
  return changed;
}

absl::StatusOr<QueueCounts> JobQueue::Counts(JobKind kind) {
  std::lock_guard lock(mu_);
  Statement select(
      db_,
      "SELECT "
      "  SUM(CASE WHEN done = 0 AND (lease_deadline_ms IS NULL OR "
      "      lease_deadline_ms <= ?1) THEN 1 ELSE 0 END),"
      "  SUM(CASE WHEN done = 0 AND lease_deadline_ms > ?1 THEN 1 ELSE 0 END),"
      "  SUM(done) "
      "FROM jobs WHERE kind = ?2");
  RF_RETURN_IF_ERROR(select.status());
  select.Bind(1, NowMillis());
  select.Bind(2, JobKindName(kind));
  RF_ASSIGN_OR_RETURN(bool found, select.Step());
  QueueCounts counts;
  if (found && !select.IsNull(0)) {
    counts.pending = static_cast<int>(select.Int(0));
    counts.leased = static_cast<int>(select.Int(1));
    counts.done = static_cast<int>(select.Int(2));
  }
  return counts;
}

}  // namespace refinery::store
