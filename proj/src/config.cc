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

#include <cstdlib>

#include "umlsqa/error.h"
#include "umlsqa/util.h"

namespace umlsqa {
namespace {

const nlohmann::json& NullJson() {
  static const nlohmann::json kNull;
  return kNull;
}

std::string ApiKey(const Settings& s, const nlohmann::json& node,
                   std::string_view default_env) {
  const std::string env = node.value("api_key_env", std::string(default_env));
  return s.Env(env).value_or("");
}

}  // namespace

std::optional<std::string> ProcessEnv(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

Settings::Settings(nlohmann::json file, std::filesystem::path base_dir, EnvLookup env)
    : file_(std::move(file)), base_dir_(std::move(base_dir)), env_(std::move(env)) {
  if (!file_.is_object()) throw ValidationError("config must be a JSON object");
}

Settings Settings::FromFile(const std::filesystem::path& path, EnvLookup env) {
  auto j = nlohmann::json::parse(ReadFile(path), nullptr, false);
  if (j.is_discarded()) throw ParseError("config " + path.string() + " is not valid JSON");
  return Settings(std::move(j), path.parent_path(), std::move(env));
}

std::string Settings::EnvName(std::string_view key) {
  std::string out = "UMLSQA_";
  for (char c : key) {
    out.push_back(c == '.' ? '_' : (c >= 'a' && c <= 'z') ? static_cast<char>(c - 32) : c);
  }
  return out;
}

const nlohmann::json& Settings::Node(std::string_view key) const {
  const nlohmann::json* node = &file_;
  size_t start = 0;
  while (start <= key.size()) {
    const size_t dot = key.find('.', start);
    const std::string part(key.substr(start, dot == std::string_view::npos ? key.size() - start
                                                                           : dot - start));
    if (!node->is_object() || !node->contains(part)) return NullJson();
    node = &(*node)[part];
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return *node;
}

void Settings::SetFlag(std::string key, std::string value) {
  flags_[std::move(key)] = std::move(value);
}

std::optional<std::string> Settings::Flag(std::string_view key) const {
  const auto it = flags_.find(std::string(key));
  if (it == flags_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> Settings::String(std::string_view key,
                                            const std::optional<std::string>& flag) const {
  if (flag) return flag;
  if (auto f = Flag(key)) return f;
  if (auto e = env_(EnvName(key))) return e;
  const auto& n = Node(key);
  if (n.is_string()) return n.get<std::string>();
  if (n.is_number() || n.is_boolean()) return n.dump();
  return std::nullopt;
}

std::optional<long long> Settings::Int(std::string_view key,
                                       const std::optional<long long>& flag) const {
  if (flag) return flag;
  if (auto f = Flag(key)) {
    try {
      return std::stoll(*f);
    } catch (const std::exception&) {
      throw ValidationError("--" + std::string(key) + " is not an integer");
    }
  }
  if (auto e = env_(EnvName(key))) {
    try {
      return std::stoll(*e);
    } catch (const std::exception&) {
      throw ValidationError(EnvName(key) + " is not an integer");
    }
  }
  const auto& n = Node(key);
  if (n.is_number_integer()) return n.get<long long>();
  if (!n.is_null()) throw ValidationError("config key " + std::string(key) + " must be an integer");
  return std::nullopt;
}

std::optional<std::filesystem::path> Settings::Path(
    std::string_view key, const std::optional<std::string>& flag) const {
  if (flag) return std::filesystem::path(*flag);
  if (auto f = Flag(key)) return std::filesystem::path(*f);
  if (auto e = env_(EnvName(key))) return std::filesystem::path(*e);
  const auto& n = Node(key);
  if (!n.is_string()) return std::nullopt;
  std::filesystem::path p(n.get<std::string>());
  return p.is_relative() ? base_dir_ / p : p;
}

RetryPolicy RetryFromSettings(const Settings& s) {
  RetryPolicy r;
  if (auto a = s.Int("retry.http_attempts")) r.attempts = static_cast<int>(*a);
  if (auto b = s.Int("retry.initial_backoff_ms")) r.initial_backoff = std::chrono::milliseconds(*b);
  return r;
}

std::unique_ptr<ChatProvider> MakeChatProvider(const Settings& s, std::string_view key) {
  const auto& node = s.Node(key);
  if (!node.is_object()) {
    throw ValidationError("config has no chat provider block '" + std::string(key) + "'");
  }
  const std::string type = node.value("type", std::string("http"));
  if (type == "scripted") {
    if (node.contains("file")) {
      const auto path = s.Path(std::string(key) + ".file");
      auto script = nlohmann::json::parse(ReadFile(*path), nullptr, false);
      if (script.is_discarded()) throw ParseError("malformed script " + path->string());
      return ScriptedChatProvider::FromJson(script);
    }
    return ScriptedChatProvider::FromJson(node);
  }
  if (type == "http") {
    const auto url = s.String(std::string(key) + ".base_url");
    if (!url) throw ValidationError(std::string(key) + ".base_url is required");
    return std::make_unique<HttpChatProvider>(*url, ApiKey(s, node, "OPENAI_API_KEY"),
                                              RetryFromSettings(s));
  }
  throw ValidationError("unknown chat provider type '" + type + "'");
}

std::unique_ptr<UmlsClient> MakeUmlsClient(const Settings& s, std::string_view key) {
  const auto& node = s.Node(key);
  const std::string k(key);
  // "<key>.fixtures" (flag, environment or file) wins over the block's type.
  if (auto dir = s.Path(k + ".fixtures")) {
    return std::make_unique<FixtureUmlsClient>(
        *dir, node.is_object() && node.value("missing_is_empty", false));
  }
  const std::string type = node.is_object() ? node.value("type", std::string("http")) : "http";
  if (type == "fixtures") {
    const auto dir = s.Path(k + ".dir");
    if (!dir) throw ValidationError(k + ".dir is required for fixtures");
    return std::make_unique<FixtureUmlsClient>(*dir, node.value("missing_is_empty", false));
  }
  if (type == "http") {
    UmlsHttpOptions o;
    if (auto url = s.String(k + ".base_url")) o.base_url = *url;
    if (auto v = s.String(k + ".version")) o.version = *v;
    o.api_key = ApiKey(s, node.is_object() ? node : nlohmann::json::object(), "UMLS_API_KEY");
    o.retry = RetryFromSettings(s);
    return std::make_unique<HttpUmlsClient>(std::move(o));
  }
  throw ValidationError("unknown UMLS client type '" + type + "'");
}

std::unique_ptr<TokenEmbedder> MakeEmbedder(const Settings& s, std::string_view key) {
  const auto& node = s.Node(key);
  const std::string k(key);
  const std::string type =
      s.String(k + ".type").value_or(node.is_object() ? node.value("type", "stub") : "stub");
  if (type == "stub") {
    return std::make_unique<OrthogonalStubEmbedder>(
        static_cast<size_t>(s.Int(k + ".dim").value_or(4096)));
  }
  if (type == "http") {
    const auto url = s.String(k + ".base_url");
    if (!url) throw ValidationError(k + ".base_url is required");
    return std::make_unique<HttpTokenEmbedder>(
        *url, ApiKey(s, node.is_object() ? node : nlohmann::json::object(), "EMBEDDER_API_KEY"),
        RetryFromSettings(s));
  }
  throw ValidationError("unknown embedder type '" + type + "'");
}

std::vector<SystemConfig> SystemsFromSettings(const Settings& s,
                                              std::optional<long long> relation_cap_flag) {
  const auto& systems = s.Node("systems");
  if (!systems.is_array() || systems.empty()) {
    throw ValidationError("config needs a non-empty \"systems\" list");
  }
  const auto default_cap = s.Int("relation_cap", relation_cap_flag);
  std::vector<SystemConfig> out;
  for (const auto& node : systems) {
    SystemConfig c = SystemConfigFromJson(node);
    if (relation_cap_flag || (default_cap && !node.contains("relation_cap"))) {
      c.relation_cap = static_cast<int>(*default_cap);
    }
    c.Validate();
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace umlsqa
