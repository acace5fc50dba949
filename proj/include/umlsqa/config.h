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

// Run configuration and provider construction.
//
// Every tunable is looked up in one place, in this order: command-line flag,
// then the environment variable UMLSQA_<KEY> (dots become underscores,
// uppercased: "umls.base_url" -> UMLSQA_UMLS_BASE_URL), then the config file
// (dotted JSON path), then the built-in default. Relative paths from the
// config file resolve against the config file's directory.
//
// Credentials are only ever read from the environment variable named by a
// provider's "api_key_env" and are never written to logs or manifests.

#ifndef UMLSQA_CONFIG_H_
#define UMLSQA_CONFIG_H_

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "umlsqa/chat.h"
#include "umlsqa/metrics.h"
#include "umlsqa/pipeline.h"
#include "umlsqa/umls.h"

namespace umlsqa {

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

std::optional<std::string> ProcessEnv(const std::string& name);

class Settings {
 public:
  Settings() : Settings(nlohmann::json::object(), {}) {}
  Settings(nlohmann::json file, std::filesystem::path base_dir,
           EnvLookup env = ProcessEnv);

  // Reads and parses a JSON config file. Throws ParseError / StorageError.
  static Settings FromFile(const std::filesystem::path& path, EnvLookup env = ProcessEnv);

  static std::string EnvName(std::string_view key);

  // Command-line values, consulted before everything else.
  void SetFlag(std::string key, std::string value);

  std::optional<std::string> String(std::string_view key,
                                    const std::optional<std::string>& flag = {}) const;
  std::optional<long long> Int(std::string_view key,
                               const std::optional<long long>& flag = {}) const;
  std::optional<std::filesystem::path> Path(
      std::string_view key, const std::optional<std::string>& flag = {}) const;

  // Sub-object at a dotted path, or null.
  const nlohmann::json& Node(std::string_view key) const;
  const nlohmann::json& file() const { return file_; }
  const std::filesystem::path& base_dir() const { return base_dir_; }
  std::optional<std::string> Env(const std::string& name) const { return env_(name); }

 private:
  std::optional<std::string> Flag(std::string_view key) const;

  std::map<std::string, std::string> flags_;
  nlohmann::json file_;
  std::filesystem::path base_dir_;
  EnvLookup env_;
};

RetryPolicy RetryFromSettings(const Settings& s);

// Provider blocks:
//   {"type": "http", "base_url": "...", "api_key_env": "OPENAI_API_KEY"}
//   {"type": "scripted", "rules": [...], "default": "...", "echo": true}
//   {"type": "scripted", "file": "script.json"}
std::unique_ptr<ChatProvider> MakeChatProvider(const Settings& s, std::string_view key);

//   {"type": "http", "base_url": "...", "api_key_env": "UMLS_API_KEY",
//    "version": "current"}
//   {"type": "fixtures", "dir": "...", "missing_is_empty": false}
std::unique_ptr<UmlsClient> MakeUmlsClient(const Settings& s, std::string_view key);

//   {"type": "stub", "dim": 4096}
//   {"type": "http", "base_url": "...", "api_key_env": "..."}
std::unique_ptr<TokenEmbedder> MakeEmbedder(const Settings& s, std::string_view key);

// "systems": [{"model_id", "augmentation", "relation_cap", "temperature",
//              "max_output_tokens", "seed"}]; a top-level "relation_cap"
// applies to systems that do not set their own.
std::vector<SystemConfig> SystemsFromSettings(const Settings& s,
                                              std::optional<long long> relation_cap_flag = {});

}  // namespace umlsqa

#endif  // UMLSQA_CONFIG_H_
