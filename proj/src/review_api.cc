// Copyright 2026 The umlsqa Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "umlsqa/review_api.h"

#include <spdlog/spdlog.h>

#include "httplib.h"
#include "umlsqa/error.h"

namespace umlsqa {
namespace {

constexpr std::string_view kPairsPrefix = "/api/pairs/";

ApiResponse Fail(int status, std::string message,
                 std::vector<FieldError> fields = {}) {
  nlohmann::json errors = nlohmann::json::array();
  for (auto& f : fields) errors.push_back({{"field", f.field}, {"message", f.message}});
  return {status, {{"error", std::move(message)}, {"errors", std::move(errors)}}};
}

nlohmann::json ProgressJson(const Progress& p) {
  return {{"completed", p.completed}, {"total", p.total}};
}

nlohmann::json CriteriaJson() {
  nlohmann::json out = nlohmann::json::array();
  for (Dimension d : kAllDimensions) {
    out.push_back({{"key", ToString(d)},
                   {"name", DisplayName(d)},
                   {"description", CriterionDescription(d)}});
  }
  return out;
}

}  // namespace

ApiResponse ReviewApi::Handle(const ApiRequest& req) {
  const bool is_get = req.method == "GET";
  const bool is_post = req.method == "POST";
  const bool known_route = req.path == "/api/criteria" || req.path == "/api/pending" ||
                           req.path == "/api/progress" || req.path == "/api/summary" ||
                           req.path == "/api/judgments" ||
                           req.path.rfind(kPairsPrefix, 0) == 0;
  if (!known_route) return Fail(404, "no such route");

  if (req.token.empty()) return Fail(401, "missing review token");
  if (req.path == "/api/summary") {
    if (!is_get) return Fail(405, "method not allowed");
    if (!store_.IsAdminToken(req.token)) return Fail(403, "admin token required");
    const WinRateSummary s = store_.Summary();
    if (s.questions == 0) {
      return {200, {{"status", "insufficient_data"}, {"questions", 0}}};
    }
    nlohmann::json body = s.ToJson();
    body["status"] = "ok";
    return {200, std::move(body)};
  }

  const auto reviewer = store_.ReviewerForToken(req.token);
  if (!reviewer) {
    return store_.IsAdminToken(req.token) ? Fail(403, "reviewer token required")
                                          : Fail(401, "unknown review token");
  }

  try {
    if (req.path == "/api/criteria") {
      if (!is_get) return Fail(405, "method not allowed");
      return {200, {{"criteria", CriteriaJson()}}};
    }
    if (req.path == "/api/pending") {
      if (!is_get) return Fail(405, "method not allowed");
      return {200,
              {{"reviewer_id", *reviewer},
               {"pending", store_.PendingFor(*reviewer)},
               {"progress", ProgressJson(store_.ProgressFor(*reviewer))}}};
    }
    if (req.path == "/api/progress") {
      if (!is_get) return Fail(405, "method not allowed");
      return {200, ProgressJson(store_.ProgressFor(*reviewer))};
    }
    if (req.path.rfind(kPairsPrefix, 0) == 0) {
      if (!is_get) return Fail(405, "method not allowed");
      const std::string qid = req.path.substr(kPairsPrefix.size());
      const BlindedPair* pair = store_.Find(qid);
      if (pair == nullptr) return Fail(404, "unknown question");
      return {200, ReviewerPayload(*pair)};
    }
    // /api/judgments
    if (!is_post) return Fail(405, "method not allowed");
    const auto body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded()) return Fail(400, "body is not JSON");
    if (auto errors = ValidateSubmission(body); !errors.empty()) {
      return Fail(400, "invalid judgment", std::move(errors));
    }
    Judgment j = JudgmentFromJson(body);
    j.reviewer_id = *reviewer;
    j.submitted_at.clear();
    if (store_.Find(j.question_id) == nullptr) {
      return Fail(404, "unknown question", {{"question_id", "not in the review set"}});
    }
    const RecordResult r = store_.Record(std::move(j));
    return {201,
            {{"status", "recorded"},
             {"replaced", r.replaced},
             {"progress", ProgressJson(r.progress)}}};
  } catch (const NotFoundError& e) {
    return Fail(404, e.what());
  } catch (const ValidationError& e) {
    return Fail(400, e.what());
  } catch (const ParseError& e) {
    return Fail(400, e.what());
  } catch (const StorageError& e) {
    spdlog::error("review store: {}", e.what());
    return Fail(500, "storage failure");
  }
}

struct ReviewServer::Impl {
  ReviewApi api;
  httplib::Server server;
  std::thread thread;

  explicit Impl(ReviewStore& store) : api(store) {}
};

ReviewServer::ReviewServer(ReviewStore& store,
                           std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>(store)) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    ApiRequest r;
    r.method = req.method;
    r.path = req.path;
    r.body = req.body;
    r.token = req.get_header_value("X-Review-Token");
    if (r.token.empty()) {
      const std::string auth = req.get_header_value("Authorization");
      if (auth.rfind("Bearer ", 0) == 0) r.token = auth.substr(7);
    }
    const ApiResponse out = impl_->api.Handle(r);
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json");
  };
  auto& s = impl_->server;
  s.Get(R"(/api/.*)", handler);
  s.Post(R"(/api/.*)", handler);
  s.Put(R"(/api/.*)", handler);
  s.Delete(R"(/api/.*)", handler);
  if (static_dir && !s.set_mount_point("/", static_dir->string())) {
    throw StorageError("cannot serve static files from " + static_dir->string());
  }
}

ReviewServer::~ReviewServer() { Stop(); }

int ReviewServer::Start(const std::string& host, int port) {
  auto& s = impl_->server;
  const int bound = port == 0 ? s.bind_to_any_port(host) : (s.bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    throw StorageError("cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->thread = std::thread([&s] { s.listen_after_bind(); });
  s.wait_until_ready();
  return bound;
}

void ReviewServer::Run(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) {
    throw StorageError("cannot listen on " + host + ":" + std::to_string(port));
  }
}

void ReviewServer::Stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace umlsqa
