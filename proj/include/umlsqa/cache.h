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

#ifndef UMLSQA_CACHE_H_
#define UMLSQA_CACHE_H_

#include <array>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

namespace umlsqa {

struct CacheKey {
  std::string subject;  // term or CUI (plus page, when paged)
  std::string kind;     // "search" | "definitions" | "relations" | ...

  bool operator==(const CacheKey&) const = default;
};

struct CacheEntry {
  CacheKey key;
  std::string value;
  std::string fetched_at;

  bool operator==(const CacheEntry&) const = default;
};

// One self-describing JSON file per key:
//
//   {"key": {"subject": "...", "kind": "..."}, "fetched_at": "...",
//    "value": "..."}
//
// named by a digest of the key. Reads of a key share a lock, writes are
// exclusive; locks are striped so distinct keys rarely contend.
class CacheStore {
 public:
  explicit CacheStore(std::filesystem::path dir);

  // nullopt on miss. A file that does not decode, or decodes to a different
  // key, counts as corrupted: it is removed and reported as a miss.
  std::optional<CacheEntry> Get(const CacheKey& key);
  void Put(const CacheKey& key, const std::string& value);
  void Evict(const CacheKey& key);

  std::filesystem::path PathFor(const CacheKey& key) const;
  // Held across a miss so concurrent misses on one key fetch once.
  std::mutex& FetchMutexFor(const CacheKey& key);
  const std::filesystem::path& dir() const { return dir_; }

  static std::string Serialize(const CacheEntry& entry);
  // nullopt if `text` is not a well-formed entry.
  static std::optional<CacheEntry> Deserialize(const std::string& text);

 private:
  std::shared_mutex& StripeFor(const CacheKey& key);

  std::filesystem::path dir_;
  std::array<std::shared_mutex, 64> stripes_;
  std::array<std::mutex, 64> fetch_stripes_;
};

// Hit: stored value, no call to `fetch`. Miss (or corrupted entry): calls
// `fetch`, persists, returns. Concurrent misses on one key call `fetch` once. If `fetch` throws, nothing is written and the
// exception propagates. Storage failures surface as StorageError.
std::string GetOrFetch(const CacheKey& key,
                       const std::function<std::string()>& fetch,
                       CacheStore& store);

}  // namespace umlsqa

#endif  // UMLSQA_CACHE_H_
