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

#include "umlsqa/cache.h"

#include <spdlog/spdlog.h>

#include <mutex>

#include "json.hpp"
#include "umlsqa/error.h"
#include "umlsqa/util.h"

namespace umlsqa {

CacheStore::CacheStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw StorageError("cannot create cache dir " + dir_.string());
}

std::filesystem::path CacheStore::PathFor(const CacheKey& key) const {
  return dir_ / (Sha256Hex(key.kind + '\0' + key.subject) + ".json");
}

std::shared_mutex& CacheStore::StripeFor(const CacheKey& key) {
  return stripes_[std::hash<std::string>{}(key.kind + '\0' + key.subject) %
                  stripes_.size()];
}

std::mutex& CacheStore::FetchMutexFor(const CacheKey& key) {
  return fetch_stripes_[std::hash<std::string>{}(key.kind + '\0' + key.subject) %
                        fetch_stripes_.size()];
}

std::string CacheStore::Serialize(const CacheEntry& entry) {
  nlohmann::json j{
      {"key", {{"subject", entry.key.subject}, {"kind", entry.key.kind}}},
      {"fetched_at", entry.fetched_at},
      {"value", entry.value}};
  return j.dump(2) + "\n";
}

std::optional<CacheEntry> CacheStore::Deserialize(const std::string& text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  try {
    CacheEntry e;
    e.key.subject = j.at("key").at("subject").get<std::string>();
    e.key.kind = j.at("key").at("kind").get<std::string>();
    e.fetched_at = j.at("fetched_at").get<std::string>();
    e.value = j.at("value").get<std::string>();
    return e;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

std::optional<CacheEntry> CacheStore::Get(const CacheKey& key) {
  const auto path = PathFor(key);
  std::optional<CacheEntry> entry;
  {
    std::shared_lock lock(StripeFor(key));
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) {
      if (ec) throw StorageError("cannot stat " + path.string());
      return std::nullopt;
    }
    entry = Deserialize(ReadFile(path));
    if (entry && entry->key == key) return entry;
  }
  spdlog::warn("evicting corrupted cache entry {}", path.filename().string());
  Evict(key);
  return std::nullopt;
}

void CacheStore::Put(const CacheKey& key, const std::string& value) {
  std::unique_lock lock(StripeFor(key));
  WriteFileAtomic(PathFor(key), Serialize({key, value, NowIso8601()}));
}

void CacheStore::Evict(const CacheKey& key) {
  std::unique_lock lock(StripeFor(key));
  std::error_code ec;
  std::filesystem::remove(PathFor(key), ec);
  if (ec) throw StorageError("cannot evict " + PathFor(key).string());
}

std::string GetOrFetch(const CacheKey& key,
                       const std::function<std::string()>& fetch,
                       CacheStore& store) {
  if (auto hit = store.Get(key)) return std::move(hit->value);
  std::lock_guard lock(store.FetchMutexFor(key));
  if (auto hit = store.Get(key)) return std::move(hit->value);
  std::string value = fetch();
  store.Put(key, value);
  return value;
}

}  // namespace umlsqa
