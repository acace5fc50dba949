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

// Review service HTTP API. Every request carries the caller's token in an
// "X-Review-Token" header (or "Authorization: Bearer <token>").
//
//   GET  /api/criteria        dimensions with display names and descriptions
//   GET  /api/pending         {"reviewer_id", "pending": [question ids],
//                              "progress": {"completed", "total"}}
//   GET  /api/pairs/{qid}     {"question_id", "question_text", "slot_a", "slot_b"}
//   POST /api/judgments       body {"question_id", "verdicts": {dim: "A"|"tie"|"B"}}
//                             -> 201 {"status": "recorded", "replaced", "progress"}
//   GET  /api/progress        {"completed", "total"}
//   GET  /api/summary         admin token only; aggregate win rates, or
//                             {"status": "insufficient_data"} before any judgment
//
// Errors: {"error": "...", "errors": [{"field", "message"}]} with 400
// (malformed), 401 (no/unknown token), 403 (wrong role), 404 (unknown
// question or route), 405 (method).

#ifndef UMLSQA_REVIEW_API_H_
#define UMLSQA_REVIEW_API_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "json.hpp"
#include "umlsqa/review.h"

namespace umlsqa {

struct ApiRequest {
  std::string method;
  std::string path;
  std::string token;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

class ReviewApi {
 public:
  explicit ReviewApi(ReviewStore& store) : store_(store) {}
  ApiResponse Handle(const ApiRequest& request);

 private:
  ReviewStore& store_;
};

// Binds `host:port` (port 0 picks a free one) and serves on a background
// thread until Stop() or destruction. If `static_dir` is set, its files are
// served under "/".
class ReviewServer {
 public:
  ReviewServer(ReviewStore& store, std::optional<std::filesystem::path> static_dir = {});
  ~ReviewServer();

  // Returns the bound port. Throws StorageError if binding fails.
  int Start(const std::string& host, int port);
  // Blocks in the calling thread.
  void Run(const std::string& host, int port);
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace umlsqa

#endif  // UMLSQA_REVIEW_API_H_
