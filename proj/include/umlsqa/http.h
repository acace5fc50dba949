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

#ifndef UMLSQA_HTTP_H_
#define UMLSQA_HTTP_H_

#include <chrono>
#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace umlsqa {

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  // Upper bound on any single wait, including server-sent Retry-After.
  std::chrono::milliseconds max_backoff{30000};
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Thin blocking client over a base URL such as "https://uts-ws.nlm.nih.gov/rest"
// or "http://127.0.0.1:8080/v1". Paths passed to Get/Post are appended to the
// base path.
//
// Retries transport failures, 429 and 5xx with exponential backoff, honoring
// Retry-After. 401/403 throw CredentialError without retrying. Other statuses
// are returned to the caller. Exhausted retries throw ProviderError.
class HttpClient {
 public:
  HttpClient(std::string_view base_url, RetryPolicy retry = {},
             std::chrono::seconds timeout = std::chrono::seconds(60));
  ~HttpClient();
  HttpClient(const HttpClient&) = delete;
  HttpClient& operator=(const HttpClient&) = delete;

  void SetBearerToken(std::string token) { bearer_ = std::move(token); }

  // `query` values are URL-encoded here. Query strings never reach the logs,
  // since they may carry an API key.
  HttpResponse Get(std::string_view path,
                   const std::multimap<std::string, std::string>& query = {});
  HttpResponse Post(std::string_view path, std::string_view body,
                    std::string_view content_type = "application/json");

  const std::string& base_url() const { return base_url_; }

 private:
  struct Impl;
  std::string base_url_;
  std::string base_path_;
  std::string bearer_;
  RetryPolicy retry_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace umlsqa

#endif  // UMLSQA_HTTP_H_
