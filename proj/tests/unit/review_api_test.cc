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

#include <fstream>

#include "blinding_sessions.h"
#include "doctest.h"
#include "httplib.h"
#include "testing.h"
#include "umlsqa/util.h"

namespace umlsqa {
namespace {

using testing::TempDir;

struct Fixture {
  TempDir dir;
  std::unique_ptr<ReviewStore> store;
  std::string reviewer, reviewer2, admin;

  Fixture() {
    std::vector<PairInput> pairs;
    for (int i = 1; i <= 3; ++i) {
      const std::string id = "q" + std::to_string(i);
      pairs.push_back({id, "Question " + id, "plain " + id, "enriched " + id});
    }
    ReviewStore::Create(dir.path(), {"secret-model/none", "secret-model/direct+umls", 9,
                                     AssignBlinding(pairs, 9)});
    store = std::make_unique<ReviewStore>(dir.path());
    store->IssueReviewers(2);
    const auto t = nlohmann::json::parse(ReadFile(dir / "reviewers.json"));
    reviewer = t["reviewers"][0]["token"];
    reviewer2 = t["reviewers"][1]["token"];
    admin = t["admin_token"];
  }
};

nlohmann::json Verdicts(const std::string& qid, const std::string& v) {
  return {{"question_id", qid},
          {"verdicts",
           {{"factuality", v}, {"completeness", v}, {"readability", v}, {"relevance", v}}}};
}

TEST_CASE("Authentication and roles") {
  Fixture f;
  ReviewApi api(*f.store);
  CHECK(api.Handle({"GET", "/api/pending", "", ""}).status == 401);
  CHECK(api.Handle({"GET", "/api/pending", "bogus", ""}).status == 401);
  CHECK(api.Handle({"GET", "/api/pending", f.admin, ""}).status == 403);
  CHECK(api.Handle({"GET", "/api/summary", f.reviewer, ""}).status == 403);
  CHECK(api.Handle({"GET", "/api/nowhere", f.reviewer, ""}).status == 404);
  CHECK(api.Handle({"POST", "/api/pending", f.reviewer, ""}).status == 405);
  CHECK(api.Handle({"GET", "/api/judgments", f.reviewer, ""}).status == 405);
}

TEST_CASE("Reviewer flow: pending, pair, submit, progress") {
  Fixture f;
  ReviewApi api(*f.store);
  auto pending = api.Handle({"GET", "/api/pending", f.reviewer, ""});
  REQUIRE(pending.status == 200);
  CHECK(pending.body["reviewer_id"] == "reviewer-1");
  CHECK(pending.body["pending"] == nlohmann::json{"q1", "q2", "q3"});
  CHECK(pending.body["progress"]["total"] == 3);

  const auto pair = api.Handle({"GET", "/api/pairs/q2", f.reviewer, ""});
  REQUIRE(pair.status == 200);
  CHECK(pair.body.size() == 4);
  CHECK(pair.body["question_text"] == "Question q2");
  const std::set<std::string> slots{pair.body["slot_a"], pair.body["slot_b"]};
  CHECK(slots == std::set<std::string>{"plain q2", "enriched q2"});
  CHECK(api.Handle({"GET", "/api/pairs/q9", f.reviewer, ""}).status == 404);

  auto r = api.Handle({"POST", "/api/judgments", f.reviewer, Verdicts("q2", "A").dump()});
  CHECK(r.status == 201);
  CHECK(r.body["replaced"] == false);
  CHECK(r.body["progress"]["completed"] == 1);
  r = api.Handle({"POST", "/api/judgments", f.reviewer, Verdicts("q2", "B").dump()});
  CHECK(r.body["replaced"] == true);

  CHECK(api.Handle({"GET", "/api/progress", f.reviewer, ""}).body["completed"] == 1);
  CHECK(api.Handle({"GET", "/api/progress", f.reviewer2, ""}).body["completed"] == 0);
  CHECK(api.Handle({"GET", "/api/pending", f.reviewer, ""}).body["pending"] ==
        nlohmann::json{"q1", "q3"});
  CHECK(api.Handle({"GET", "/api/criteria", f.reviewer, ""}).body["criteria"].size() == 4);
}

TEST_CASE("Malformed submissions are rejected with field errors") {
  Fixture f;
  ReviewApi api(*f.store);
  CHECK(api.Handle({"POST", "/api/judgments", f.reviewer, "nope"}).status == 400);
  auto body = Verdicts("q1", "A");
  body["verdicts"].erase("completeness");
  const auto r = api.Handle({"POST", "/api/judgments", f.reviewer, body.dump()});
  CHECK(r.status == 400);
  REQUIRE(r.body["errors"].size() == 1);
  CHECK(r.body["errors"][0]["field"] == "verdicts.completeness");
  CHECK(api.Handle({"POST", "/api/judgments", f.reviewer, Verdicts("q7", "A").dump()}).status ==
        404);
  CHECK(f.store->Judgments().empty());
}

TEST_CASE("Summary is admin-only and reports insufficient data first") {
  Fixture f;
  ReviewApi api(*f.store);
  auto s = api.Handle({"GET", "/api/summary", f.admin, ""});
  CHECK(s.status == 200);
  CHECK(s.body["status"] == "insufficient_data");
  api.Handle({"POST", "/api/judgments", f.reviewer, Verdicts("q1", "tie").dump()});
  s = api.Handle({"GET", "/api/summary", f.admin, ""});
  CHECK(s.body["status"] == "ok");
  CHECK(s.body["questions"] == 1);
  CHECK(s.body["dimensions"]["factuality"]["tie"]["pct"] == 100);
}

TEST_CASE("Randomized reviewer sessions never see system identities") {
  const auto stats = testing::RunBlindingSessions(100, 2024);
  CHECK(stats.sessions == 100);
  CHECK(stats.payloads > 1000);
  CHECK(stats.judgments > 0);
  CHECK(stats.leaks.empty());
}

TEST_CASE("HTTP server over a real socket") {
  Fixture f;
  {
    std::ofstream(f.dir / "index.html") << "<html>review</html>";
  }
  ReviewServer server(*f.store, f.dir.path());
  const int port = server.Start("127.0.0.1", 0);
  REQUIRE(port > 0);
  httplib::Client c("127.0.0.1", port);

  auto res = c.Get("/api/pending", {{"X-Review-Token", f.reviewer}});
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(nlohmann::json::parse(res->body)["pending"].size() == 3);

  res = c.Post("/api/judgments", {{"Authorization", "Bearer " + f.reviewer}},
               Verdicts("q1", "A").dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 201);

  res = c.Get("/api/pairs/q1");
  REQUIRE(res);
  CHECK(res->status == 401);

  res = c.Get("/index.html");
  REQUIRE(res);
  CHECK(res->body.find("review") != std::string::npos);

  for (const auto& path : {"/api/pending", "/api/pairs/q1", "/api/pairs/q2", "/api/criteria"}) {
    res = c.Get(path, {{"X-Review-Token", f.reviewer}});
    REQUIRE(res);
    std::string everything = res->body;
    for (const auto& [k, v] : res->headers) everything += k + ": " + v + "\n";
    CHECK(everything.find("secret-model") == std::string::npos);
    CHECK(everything.find("assignment") == std::string::npos);
  }
  server.Stop();
  CHECK(f.store->Judgments().size() == 1);
}

}  // namespace
}  // namespace umlsqa
