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

#include <atomic>
#include <thread>

#include "doctest.h"
#include "testing.h"
#include "umlsqa/error.h"
#include "umlsqa/util.h"

namespace umlsqa {
namespace {

using testing::TempDir;

TEST_CASE("Cache hit skips the fetch") {
  TempDir tmp;
  CacheStore store(tmp.path());
  int calls = 0;
  const auto fetch = [&] {
    ++calls;
    return std::string("value");
  };
  const CacheKey key{"C0001403", "definitions"};
  CHECK(GetOrFetch(key, fetch, store) == "value");
  CHECK(GetOrFetch(key, fetch, store) == "value");
  CHECK(calls == 1);
  CHECK(store.Get(key)->value == "value");
}

TEST_CASE("Failed fetch writes nothing") {
  TempDir tmp;
  CacheStore store(tmp.path());
  const CacheKey key{"x", "search"};
  CHECK_THROWS_AS(GetOrFetch(key, [] () -> std::string { throw ProviderError("down"); }, store),
                  ProviderError);
  CHECK_FALSE(store.Get(key));
}

TEST_CASE("Corrupted or mismatched entries are evicted and refetched") {
  TempDir tmp;
  CacheStore store(tmp.path());
  const CacheKey key{"stroke", "search"};
  store.Put(key, "v1");
  WriteFileAtomic(store.PathFor(key), "{not json");
  CHECK_FALSE(store.Get(key));
  CHECK_FALSE(std::filesystem::exists(store.PathFor(key)));

  const CacheKey other{"other", "search"};
  store.Put(other, "v2");
  std::filesystem::copy_file(store.PathFor(other), store.PathFor(key));
  CHECK_FALSE(store.Get(key));

  int calls = 0;
  CHECK(GetOrFetch(key, [&] { ++calls; return std::string("fresh"); }, store) == "fresh");
  CHECK(calls == 1);
}

TEST_CASE("Entries serialize and evict") {
  const CacheEntry e{{"a\nb", "relations"}, "{\"x\":1}", "2026-01-01T00:00:00Z"};
  CHECK(CacheStore::Deserialize(CacheStore::Serialize(e)) == e);
  CHECK_FALSE(CacheStore::Deserialize("[]"));
  CHECK_FALSE(CacheStore::Deserialize(""));

  TempDir tmp;
  CacheStore store(tmp.path());
  store.Put(e.key, "v");
  store.Evict(e.key);
  CHECK_FALSE(store.Get(e.key));
}

TEST_CASE("Concurrent misses on one key fetch once") {
  TempDir tmp;
  CacheStore store(tmp.path());
  std::atomic<int> calls{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 16; ++t) {
    threads.emplace_back([&, t] {
      for (int k = 0; k < 8; ++k) {
        const CacheKey key{"key" + std::to_string((k + t) % 8), "search"};
        GetOrFetch(key, [&] {
          ++calls;
          std::this_thread::sleep_for(std::chrono::milliseconds(1));
          return key.subject;
        }, store);
      }
    });
  }
  for (auto& t : threads) t.join();
  CHECK(calls.load() == 8);
}

}  // namespace
}  // namespace umlsqa
