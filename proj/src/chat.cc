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

#include "umlsqa/chat.h"

#include "umlsqa/error.h"
#include "umlsqa/util.h"

namespace umlsqa {

nlohmann::json ToWireJson(const ChatRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", m.role}, {"content", m.content}});
  }
  nlohmann::json j{{"model", request.model},
                   {"messages", std::move(messages)},
                   {"temperature", request.temperature}};
  if (request.max_tokens > 0) j["max_tokens"] = request.max_tokens;
  if (request.seed) j["seed"] = *request.seed;
  return j;
}

std::string ParseChatResponse(std::string_view body) {
  try {
    const auto j = nlohmann::json::parse(body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw ProviderError("assistant content is not text");
    return content.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("malformed chat response: ") + e.what());
  }
}

HttpChatProvider::HttpChatProvider(std::string base_url, std::string api_key,
                                   RetryPolicy retry)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)), retry_(retry) {}

std::string HttpChatProvider::Complete(const ChatRequest& request) {
  HttpClient client(base_url_, retry_);
  if (!api_key_.empty()) client.SetBearerToken(api_key_);
  const HttpResponse res =
      client.Post("/chat/completions", ToWireJson(request).dump());
  if (res.status != 200) {
    throw ProviderError("chat completion: HTTP " + std::to_string(res.status));
  }
  return ParseChatResponse(res.body);
}

std::unique_ptr<ScriptedChatProvider> ScriptedChatProvider::FromJson(
    const nlohmann::json& j) {
  auto p = std::make_unique<ScriptedChatProvider>();
  try {
    if (j.contains("rules")) {
      for (const auto& r : j.at("rules")) {
        p->AddRule(r.at("match").get<std::string>(),
                   r.at("response").get<std::string>());
      }
    }
    if (j.contains("default")) p->SetDefault(j.at("default").get<std::string>());
    p->SetEcho(j.value("echo", false));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("scripted provider config: ") + e.what());
  }
  return p;
}

void ScriptedChatProvider::Queue(std::string response) {
  std::lock_guard lock(mu_);
  queue_.push_back(std::move(response));
}

void ScriptedChatProvider::AddRule(std::string match, std::string response) {
  std::lock_guard lock(mu_);
  rules_.push_back({std::move(match), std::move(response)});
}

void ScriptedChatProvider::SetDefault(std::string response) {
  std::lock_guard lock(mu_);
  default_ = std::move(response);
}

std::string ScriptedChatProvider::Complete(const ChatRequest& request) {
  ++calls_;
  std::lock_guard lock(mu_);
  log_.push_back(request);
  if (fail_next_ > 0) {
    --fail_next_;
    throw ProviderError("scripted transport failure");
  }
  if (!queue_.empty()) {
    std::string r = std::move(queue_.front());
    queue_.pop_front();
    return r;
  }
  std::string_view prompt;
  for (const auto& m : request.messages) {
    if (m.role == "user") prompt = m.content;
  }
  for (const auto& rule : rules_) {
    if (prompt.find(rule.match) != std::string_view::npos) return rule.response;
  }
  if (default_) return *default_;
  if (echo_) return "Scripted answer " + Sha256Hex(prompt).substr(0, 16) + ".";
  throw ProviderError("scripted provider has no reply for this prompt");
}

std::vector<ChatRequest> ScriptedChatProvider::requests() const {
  std::lock_guard lock(mu_);
  return log_;
}

}  // namespace umlsqa
