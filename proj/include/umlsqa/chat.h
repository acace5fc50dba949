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

// Chat-completion providers. The wire schema is the minimal OpenAI-style
// chat shape:
//
//   POST {base_url}/chat/completions
//   {"model": "...", "messages": [{"role": "user", "content": "..."}],
//    "temperature": 0, "max_tokens": 512, "seed": 7}
//   -> {"choices": [{"message": {"role": "assistant", "content": "..."}}]}
//
// The bearer token is read by the caller from the environment and handed in;
// it is never logged.

#ifndef UMLSQA_CHAT_H_
#define UMLSQA_CHAT_H_

#include <atomic>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "umlsqa/http.h"

namespace umlsqa {

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 0;  // 0 leaves it to the server
  std::optional<std::int64_t> seed;
};

nlohmann::json ToWireJson(const ChatRequest& request);
// Throws ProviderError if the response does not carry assistant text.
std::string ParseChatResponse(std::string_view body);

// Implementations must tolerate concurrent Complete() calls.
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string Complete(const ChatRequest& request) = 0;
  // Safe to print: no credentials.
  virtual std::string Identifier() const = 0;
};

class HttpChatProvider : public ChatProvider {
 public:
  HttpChatProvider(std::string base_url, std::string api_key,
                   RetryPolicy retry = {});
  std::string Complete(const ChatRequest& request) override;
  std::string Identifier() const override { return "http:" + base_url_; }

 private:
  std::string base_url_;
  std::string api_key_;
  RetryPolicy retry_;
};

// Deterministic stand-in for tests and offline runs. Replies, in order of
// precedence: queued replies (FIFO), the first rule whose `match` is a
// substring of the last user message, the default reply, and finally (when
// echo is on) a reply derived from a digest of the prompt.
class ScriptedChatProvider : public ChatProvider {
 public:
  struct Rule {
    std::string match;
    std::string response;
  };

  ScriptedChatProvider() = default;

  // {"rules": [{"match": "...", "response": "..."}], "default": "...",
  //  "echo": true}
  static std::unique_ptr<ScriptedChatProvider> FromJson(const nlohmann::json& j);

  void Queue(std::string response);
  void AddRule(std::string match, std::string response);
  void SetDefault(std::string response);
  void SetEcho(bool echo) { echo_ = echo; }
  // The next `n` calls throw ProviderError as a transport failure would.
  void FailNext(int n) { fail_next_ = n; }

  std::string Complete(const ChatRequest& request) override;
  std::string Identifier() const override { return "scripted"; }

  int calls() const { return calls_.load(); }
  std::vector<ChatRequest> requests() const;

 private:
  mutable std::mutex mu_;
  std::deque<std::string> queue_;
  std::vector<Rule> rules_;
  std::optional<std::string> default_;
  bool echo_ = false;
  std::atomic<int> fail_next_{0};
  std::atomic<int> calls_{0};
  std::vector<ChatRequest> log_;
};

}  // namespace umlsqa

#endif  // UMLSQA_CHAT_H_
