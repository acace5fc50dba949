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

#include "doctest.h"
#include "umlsqa/error.h"

namespace umlsqa {
namespace {

ChatRequest Ask(const std::string& text) {
  ChatRequest r;
  r.model = "m";
  r.messages.push_back({"user", text});
  return r;
}

TEST_CASE("Wire request shape") {
  ChatRequest r = Ask("hello");
  r.temperature = 0.0;
  r.max_tokens = 64;
  r.seed = 7;
  const auto j = ToWireJson(r);
  CHECK(j["model"] == "m");
  CHECK(j["messages"][0]["role"] == "user");
  CHECK(j["messages"][0]["content"] == "hello");
  CHECK(j["temperature"] == 0.0);
  CHECK(j["max_tokens"] == 64);
  CHECK(j["seed"] == 7);
  CHECK_FALSE(ToWireJson(Ask("x")).contains("seed"));
  CHECK_FALSE(ToWireJson(Ask("x")).contains("max_tokens"));
}

TEST_CASE("Response parsing") {
  CHECK(ParseChatResponse(R"({"choices":[{"message":{"role":"assistant","content":"hi"}}]})") ==
        "hi");
  CHECK_THROWS_AS(ParseChatResponse("{}"), ProviderError);
  CHECK_THROWS_AS(ParseChatResponse("not json"), ProviderError);
  CHECK_THROWS_AS(ParseChatResponse(R"({"choices":[]})"), ProviderError);
  CHECK_THROWS_AS(ParseChatResponse(R"({"choices":[{"message":{"content":null}}]})"),
                  ProviderError);
}

TEST_CASE("Scripted provider precedence") {
  ScriptedChatProvider p;
  p.AddRule("flu", "rule reply");
  p.SetDefault("default reply");
  p.Queue("queued");
  CHECK(p.Complete(Ask("flu shot")) == "queued");
  CHECK(p.Complete(Ask("flu shot")) == "rule reply");
  CHECK(p.Complete(Ask("other")) == "default reply");
  CHECK(p.calls() == 3);
  CHECK(p.requests().size() == 3);
}

TEST_CASE("Scripted echo is deterministic per prompt") {
  ScriptedChatProvider p;
  p.SetEcho(true);
  const auto a = p.Complete(Ask("one"));
  CHECK(a == p.Complete(Ask("one")));
  CHECK(a != p.Complete(Ask("two")));
  ScriptedChatProvider silent;
  CHECK_THROWS_AS(silent.Complete(Ask("x")), ProviderError);
}

TEST_CASE("Scripted provider from JSON") {
  const auto p = ScriptedChatProvider::FromJson(
      {{"rules", {{{"match", "a"}, {"response", "A"}}}}, {"default", "D"}});
  CHECK(p->Complete(Ask("xa")) == "A");
  CHECK(p->Complete(Ask("zz")) == "D");
  p->FailNext(1);
  CHECK_THROWS_AS(p->Complete(Ask("xa")), ProviderError);
  CHECK(p->Complete(Ask("xa")) == "A");
}

TEST_CASE("HTTP provider identifier carries no credential") {
  HttpChatProvider p("http://127.0.0.1:9/v1", "sk-secret-value");
  CHECK(p.Identifier().find("sk-secret") == std::string::npos);
}

}  // namespace
}  // namespace umlsqa
