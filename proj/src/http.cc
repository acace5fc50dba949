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

#include "umlsqa/http.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <regex>
#include <thread>

#include "httplib.h"
#include "umlsqa/error.h"

namespace umlsqa {

struct HttpClient::Impl {
  std::string scheme_host_port;
  std::chrono::seconds timeout;

  httplib::Client Make() const {
    httplib::Client cli(scheme_host_port);
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);
    return cli;
  }
};

HttpClient::HttpClient(std::string_view base_url, RetryPolicy retry,
                       std::chrono::seconds timeout)
    : base_url_(base_url), retry_(retry), impl_(std::make_unique<Impl>()) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(base_url_, m, kUrl)) {
    throw ValidationError("invalid base URL: " + base_url_);
  }
  impl_->scheme_host_port = m[1].str();
  base_path_ = m[2].matched ? m[2].str() : "";
  while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
  impl_->timeout = timeout;
  if (retry_.attempts < 1) retry_.attempts = 1;
}

HttpClient::~HttpClient() = default;

namespace {

template <typename Send>
HttpResponse WithRetry(const RetryPolicy& retry, const std::string& what,
                       Send&& send) {
  auto backoff = retry.initial_backoff;
  std::string last_error;
  for (int attempt = 1; attempt <= retry.attempts; ++attempt) {
    httplib::Result res = send();
    std::chrono::milliseconds wait = backoff;
    if (!res) {
      last_error = httplib::to_string(res.error());
    } else if (res->status == 401 || res->status == 403) {
      throw CredentialError(what + ": HTTP " + std::to_string(res->status));
    } else if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      if (res->has_header("Retry-After")) {
        try {
          wait = std::chrono::seconds(std::stoi(res->get_header_value("Retry-After")));
        } catch (const std::exception&) {
          // HTTP-date form; keep the exponential wait.
        }
      }
    } else {
      return HttpResponse{res->status, res->body};
    }
    if (attempt == retry.attempts) break;
    wait = std::min(wait, retry.max_backoff);
    spdlog::debug("{} failed ({}), retry {}/{} in {} ms", what, last_error,
                  attempt, retry.attempts - 1, wait.count());
    std::this_thread::sleep_for(wait);
    backoff *= 2;
  }
  throw ProviderError(what + " failed after " + std::to_string(retry.attempts) +
                      " attempt(s): " + last_error);
}

}  // namespace

HttpResponse HttpClient::Get(
    std::string_view path, const std::multimap<std::string, std::string>& query) {
  const std::string full = base_path_ + std::string(path);
  httplib::Params params(query.begin(), query.end());
  httplib::Headers headers;
  if (!bearer_.empty()) headers.emplace("Authorization", "Bearer " + bearer_);
  return WithRetry(retry_, "GET " + full, [&] {
    auto cli = impl_->Make();
    return cli.Get(full, params, headers);
  });
}

HttpResponse HttpClient::Post(std::string_view path, std::string_view body,
                              std::string_view content_type) {
  const std::string full = base_path_ + std::string(path);
  httplib::Headers headers;
  if (!bearer_.empty()) headers.emplace("Authorization", "Bearer " + bearer_);
  return WithRetry(retry_, "POST " + full, [&] {
    auto cli = impl_->Make();
    return cli.Post(full, headers, body.data(), body.size(),
                    std::string(content_type));
  });
}

}  // namespace umlsqa
