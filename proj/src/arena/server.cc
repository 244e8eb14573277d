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

#include "refinery/arena/server.h"

#include "httplib.h"
#include "json.hpp"
#include "refinery/common/strings.h"

namespace refinery::arena {
namespace {

void SendError(httplib::Response& res, int code, const std::string& message) {
  res.status = code;
  res.set_content(nlohmann::json{{"error", message}}.dump(), "application/json");
}

void SendStatus(httplib::Response& res, const absl::Status& s) {
  int code = 500;
  switch (s.code()) {
    case absl::StatusCode::kInvalidArgument: code = 400; break;
    case absl::StatusCode::kNotFound: code = 404; break;
    case absl::StatusCode::kAlreadyExists: code = 409; break;
    default: break;
  }
  SendError(res, code, std::string(s.message()));
}

}  // namespace

struct ArenaServer::Impl {
  PairService& service;
  const store::BlobStore& blobs;
  httplib::Server http;
  bool bound = false;

  Impl(PairService& s, const store::BlobStore& b) : service(s), blobs(b) {}
};

ArenaServer::ArenaServer(PairService& service, const store::BlobStore& blobs)
    : impl_(std::make_unique<Impl>(service, blobs)) {
  Impl* impl = impl_.get();

  impl->http.Get("/api/pairs/next", [impl](const httplib::Request& req, httplib::Response& res) {
    const std::string rater = req.get_param_value("rater");
    if (rater.empty()) return SendError(res, 400, "missing rater");
    auto pair = impl->service.NextPair(rater);
    if (absl::IsResourceExhausted(pair.status())) {
      res.status = 204;
      return;
    }
    if (!pair.ok()) return SendStatus(res, pair.status());
    res.set_content(ToJson(*pair).dump(), "application/json");
  });

  impl->http.Post("/api/preferences", [impl](const httplib::Request& req,
                                             httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("pair_id") ||
        !body.contains("choice") || !body.contains("rater_id") ||
        !body["pair_id"].is_string() || !body["choice"].is_string() ||
        !body["rater_id"].is_string()) {
      return SendError(res, 400, "expected {pair_id, choice, rater_id}");
    }
    auto choice = ParseChoice(body["choice"].get<std::string>());
    if (!choice.ok()) return SendStatus(res, choice.status());
    auto board = impl->service.SubmitPreference(body["pair_id"].get<std::string>(), *choice,
                                                body["rater_id"].get<std::string>());
    if (!board.ok()) return SendStatus(res, board.status());
    res.set_content(ToJson(*board).dump(), "application/json");
  });

  impl->http.Get("/api/leaderboard", [impl](const httplib::Request&, httplib::Response& res) {
    res.set_content(ToJson(impl->service.GetLeaderboard()).dump(), "application/json");
  });

  impl->http.Get(R"(/api/renders/([0-9a-f]+))",
                 [impl](const httplib::Request& req, httplib::Response& res) {
                   const std::string key = req.matches[1];
                   if (!impl->service.IsServableRender(key)) {
                     return SendError(res, 404, "unknown render");
                   }
                   auto bytes = impl->blobs.Get(key);
                   if (!bytes.ok()) return SendStatus(res, bytes.status());
                   res.set_content(*bytes, "application/json");
                 });

  impl->http.Get("/api/instructions", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(nlohmann::json{{"instructions", std::string(kRaterInstructions)}}.dump(),
                    "application/json");
  });
}

ArenaServer::~ArenaServer() { Stop(); }

absl::Status ArenaServer::MountStatic(const std::filesystem::path& dir) {
  if (!impl_->http.set_mount_point("/", dir.string())) {
    return absl::NotFoundError(StrCat("cannot serve directory ", dir.string()));
  }
  return absl::OkStatus();
}

absl::StatusOr<int> ArenaServer::Bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->http.bind_to_any_port(host);
    if (bound < 0) return absl::UnavailableError(StrCat("cannot bind ", host));
  } else if (!impl_->http.bind_to_port(host, port)) {
    return absl::UnavailableError(StrCat("cannot bind ", host, ":", port));
  }
  impl_->bound = true;
  return bound;
}

absl::Status ArenaServer::Serve() {
  if (!impl_->bound) return absl::FailedPreconditionError("Serve before Bind");
  if (!impl_->http.listen_after_bind()) return absl::UnavailableError("listen failed");
  return absl::OkStatus();
}

void ArenaServer::Stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

void ArenaServer::WaitUntilReady() const { impl_->http.wait_until_ready(); }

}  // namespace refinery::arena
