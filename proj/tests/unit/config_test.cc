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

#include "umlsqa/config.h"

#include <fstream>

#include "doctest.h"
#include "testing.h"
#include "umlsqa/error.h"

namespace umlsqa {
namespace {

using testing::TempDir;

EnvLookup FakeEnv(std::map<std::string, std::string> vars) {
  return [vars = std::move(vars)](const std::string& name) -> std::optional<std::string> {
    const auto it = vars.find(name);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

TEST_CASE("Environment variable names") {
  CHECK(Settings::EnvName("umls.base_url") == "UMLSQA_UMLS_BASE_URL");
  CHECK(Settings::EnvName("workers") == "UMLSQA_WORKERS");
}

TEST_CASE("Lookup precedence: flag, environment, file, default") {
  const nlohmann::json file{{"workers", 2}, {"umls", {{"base_url", "http://file"}}}};
  Settings none(file, "/cfg", FakeEnv({}));
  CHECK(none.Int("workers") == 2);
  CHECK(none.String("umls.base_url") == "http://file");
  CHECK_FALSE(none.Int("relation_cap"));
  CHECK(none.Int("relation_cap").value_or(25) == 25);

  Settings env(file, "/cfg",
               FakeEnv({{"UMLSQA_WORKERS", "5"}, {"UMLSQA_UMLS_BASE_URL", "http://env"}}));
  CHECK(env.Int("workers") == 5);
  CHECK(env.String("umls.base_url") == "http://env");

  env.SetFlag("workers", "9");
  CHECK(env.Int("workers") == 9);
  CHECK(env.Int("workers", 11) == 11);
  CHECK(env.String("umls.base_url", std::string("http://flag")) == "http://flag");

  env.SetFlag("workers", "many");
  CHECK_THROWS_AS(env.Int("workers"), ValidationError);
  Settings bad_env(file, "/cfg", FakeEnv({{"UMLSQA_WORKERS", "x"}}));
  CHECK_THROWS_AS(bad_env.Int("workers"), ValidationError);
  Settings bad_file({{"workers", "two"}}, "/cfg", FakeEnv({}));
  CHECK_THROWS_AS(bad_file.Int("workers"), ValidationError);
  CHECK_THROWS_AS(Settings(nlohmann::json::array(), "/cfg", FakeEnv({})), ValidationError);
}

TEST_CASE("Relative paths resolve against the config directory") {
  TempDir dir;
  std::ofstream(dir / "c.json") << R"({"cache_dir": "cache", "abs": "/x/y"})";
  const auto s = Settings::FromFile(dir / "c.json", FakeEnv({}));
  CHECK(s.Path("cache_dir") == dir / "cache");
  CHECK(s.Path("abs") == std::filesystem::path("/x/y"));
  CHECK(s.Path("cache_dir", std::string("rel")) == std::filesystem::path("rel"));

  std::ofstream(dir / "bad.json") << "{nope";
  CHECK_THROWS_AS(Settings::FromFile(dir / "bad.json", FakeEnv({})), ParseError);
  CHECK_THROWS_AS(Settings::FromFile(dir / "absent.json", FakeEnv({})), StorageError);
}

TEST_CASE("Provider construction") {
  const nlohmann::json file{
      {"llm", {{"type", "scripted"}, {"default", "hello"}}},
      {"remote", {{"type", "http"}, {"base_url", "http://127.0.0.1:9/v1"}}},
      {"weird", {{"type", "carrier-pigeon"}}},
      {"umls", {{"type", "fixtures"}, {"dir", "umls"}}},
      {"uts", {{"type", "http"}}},
      {"embedder", {{"type", "stub"}, {"dim", 8}}},
  };
  Settings s(file, "/cfg",
             FakeEnv({{"OPENAI_API_KEY", "sk-never-printed"}, {"UMLS_API_KEY", "uts-key"}}));

  auto llm = MakeChatProvider(s, "llm");
  CHECK(llm->Complete({}) == "hello");
  const auto remote = MakeChatProvider(s, "remote");
  CHECK(remote->Identifier() == "http:http://127.0.0.1:9/v1");
  CHECK(remote->Identifier().find("sk-") == std::string::npos);
  CHECK_THROWS_AS(MakeChatProvider(s, "weird"), ValidationError);
  CHECK_THROWS_AS(MakeChatProvider(s, "absent"), ValidationError);

  CHECK(MakeUmlsClient(s, "uts")->Identifier().rfind("uts:", 0) == 0);
  s.SetFlag("umls.fixtures", testing::Fixture("umls").string());
  const auto fixtures = MakeUmlsClient(s, "umls");
  CHECK(LinkConcept("Addison Disease", *fixtures)->cui == "C0001403");
  CHECK_THROWS_AS(MakeUmlsClient(s, "weird"), ValidationError);

  auto emb = MakeEmbedder(s, "embedder");
  const std::vector<std::string> tokens{"a", "b"};
  CHECK(emb->Embed(tokens).dim == 8);
  CHECK_THROWS_AS(MakeEmbedder(s, "weird"), ValidationError);
}

TEST_CASE("Systems from settings") {
  const nlohmann::json file{
      {"relation_cap", 10},
      {"systems",
       {{{"model_id", "m"}, {"augmentation", "none"}},
        {{"model_id", "m"}, {"augmentation", "direct+umls"}, {"relation_cap", 3}}}}};
  Settings s(file, "/cfg", FakeEnv({}));
  auto systems = SystemsFromSettings(s);
  REQUIRE(systems.size() == 2);
  CHECK(systems[0].relation_cap == 10);
  CHECK(systems[1].relation_cap == 3);
  CHECK(systems[1].Name() == "m/direct+umls");

  systems = SystemsFromSettings(s, 7);
  CHECK(systems[0].relation_cap == 7);
  CHECK(systems[1].relation_cap == 7);
  CHECK_THROWS_AS(SystemsFromSettings(s, 0), ValidationError);

  Settings empty(nlohmann::json::object(), "/cfg", FakeEnv({}));
  CHECK_THROWS_AS(SystemsFromSettings(empty), ValidationError);
  Settings no_model({{"systems", {{{"augmentation", "none"}}}}}, "/cfg", FakeEnv({}));
  CHECK_THROWS_AS(SystemsFromSettings(no_model), ValidationError);
  Settings bad_aug({{"systems", {{{"model_id", "m"}, {"augmentation", "sideways"}}}}}, "/cfg",
                   FakeEnv({}));
  CHECK_THROWS_AS(SystemsFromSettings(bad_aug), ValidationError);
}

}  // namespace
}  // namespace umlsqa
