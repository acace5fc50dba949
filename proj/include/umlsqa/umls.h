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

// UMLS concept linking, definition selection and relation retrieval.
//
// Clients return raw UTS REST response bodies; the functions in this header
// interpret them. That split lets recorded fixtures stand in for the live
// service byte for byte. The response shapes consumed are:
//
//   search       {"result": {"results": [{"ui": "C0001403", "name": "..."}]}}
//   definitions  {"result": [{"rootSource": "MSH", "value": "..."}]}
//   relations    {"pageCount": 4, "result": [{"relationLabel": "RO",
//                 "additionalRelationLabel": "...", "relatedIdName": "...",
//                 "relatedId": ".../CUI/C0000000", "rootSource": "..."}]}
//
// A definition entry may carry an explicit "language" (ISO 639-2, e.g.
// "ENG"); otherwise the language is inferred from its source abbreviation.

#ifndef UMLSQA_UMLS_H_
#define UMLSQA_UMLS_H_

#include <atomic>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "umlsqa/cache.h"
#include "umlsqa/http.h"

namespace umlsqa {

inline constexpr int kDefaultRelationCap = 25;

struct Definition {
  std::string text;
  std::string source_vocabulary;

  bool operator==(const Definition&) const = default;
};

struct Relation {
  std::string label;
  std::string related_name;
  std::optional<std::string> related_cui;
  std::string source_vocabulary;

  bool operator==(const Relation&) const = default;
};

struct ConceptRecord {
  std::string cui;
  std::string preferred_name;
  std::optional<Definition> definition;
  std::vector<Relation> relations;

  bool operator==(const ConceptRecord&) const = default;
};

struct ConceptLink {
  std::string cui;
  std::string preferred_name;

  bool operator==(const ConceptLink&) const = default;
};

nlohmann::json ToJson(const Relation& r);
nlohmann::json ToJson(const ConceptRecord& c);
ConceptRecord ConceptRecordFromJson(const nlohmann::json& j);

// "C" followed by exactly seven digits.
bool IsValidCui(std::string_view cui);

// False for source abbreviations of translated vocabularies (MSHGER, MDRJPN,
// SCTSPA, LNC-DE-DE, ...). Everything else is treated as English.
bool IsEnglishSource(std::string_view root_source);

enum class UmlsQueryKind { kSearch, kDefinitions, kRelations };

std::string_view ToString(UmlsQueryKind kind);

struct UmlsQuery {
  UmlsQueryKind kind = UmlsQueryKind::kSearch;
  std::string key;  // term for search, CUI otherwise
  int page = 1;     // relations only

  // Stable identity used for caching and fixtures.
  CacheKey ToCacheKey() const;
};

// Returns the raw response body. "No data" (UTS answers 404 for a CUI
// without definitions) is an empty result body, not an error.
// Implementations must tolerate concurrent Fetch() calls.
class UmlsClient {
 public:
  virtual ~UmlsClient() = default;
  virtual std::string Fetch(const UmlsQuery& query) = 0;
  virtual std::string Identifier() const = 0;
};

struct UmlsHttpOptions {
  std::string base_url = "https://uts-ws.nlm.nih.gov/rest";
  std::string api_key;
  std::string version = "current";
  int page_size = 25;
  RetryPolicy retry{};
};

class HttpUmlsClient : public UmlsClient {
 public:
  explicit HttpUmlsClient(UmlsHttpOptions options);
  std::string Fetch(const UmlsQuery& query) override;
  std::string Identifier() const override { return "uts:" + options_.base_url; }

 private:
  UmlsHttpOptions options_;
};

// Replays fixtures written by RecordingUmlsClient. Layout:
//
//   <dir>/search/<slug>.json
//   <dir>/definitions/<CUI>.json
//   <dir>/relations/<CUI>.p<page>.json
//
// where each file is {"query": {"kind", "key", "page"}, "body": <response>}.
// A missing fixture throws ProviderError unless `missing_is_empty` is set.
class FixtureUmlsClient : public UmlsClient {
 public:
  explicit FixtureUmlsClient(std::filesystem::path dir,
                             bool missing_is_empty = false);
  std::string Fetch(const UmlsQuery& query) override;
  std::string Identifier() const override { return "fixtures:" + dir_.string(); }

  static std::filesystem::path PathFor(const std::filesystem::path& dir,
                                       const UmlsQuery& query);
  // Writes one fixture file; `body` must be JSON.
  static void Write(const std::filesystem::path& dir, const UmlsQuery& query,
                    std::string_view body);

 private:
  std::filesystem::path dir_;
  bool missing_is_empty_;
};

// Passes through to `inner`, recording every response as a fixture.
class RecordingUmlsClient : public UmlsClient {
 public:
  RecordingUmlsClient(UmlsClient& inner, std::filesystem::path dir);
  std::string Fetch(const UmlsQuery& query) override;
  std::string Identifier() const override { return inner_.Identifier(); }

 private:
  UmlsClient& inner_;
  std::filesystem::path dir_;
};

// Memoizes `inner` through a CacheStore.
class CachingUmlsClient : public UmlsClient {
 public:
  CachingUmlsClient(UmlsClient& inner, CacheStore& store);
  std::string Fetch(const UmlsQuery& query) override;
  std::string Identifier() const override { return inner_.Identifier(); }

 private:
  UmlsClient& inner_;
  CacheStore& store_;
};

// Counts calls reaching `inner`.
class CountingUmlsClient : public UmlsClient {
 public:
  explicit CountingUmlsClient(UmlsClient& inner) : inner_(inner) {}
  std::string Fetch(const UmlsQuery& query) override {
    ++calls_;
    return inner_.Fetch(query);
  }
  std::string Identifier() const override { return inner_.Identifier(); }
  int calls() const { return calls_.load(); }

 private:
  UmlsClient& inner_;
  std::atomic<int> calls_{0};
};

struct DefinitionPolicy {
  // Earlier entries win; sources not listed fall back to response order.
  std::vector<std::string> source_priority{"MSH", "NCI", "ICF"};
};

// Top-ranked search hit, or nullopt when the search comes back empty.
std::optional<ConceptLink> LinkConcept(std::string_view term, UmlsClient& client);

std::optional<Definition> FetchDefinition(std::string_view cui, UmlsClient& client,
                                          const DefinitionPolicy& policy = {});

// Relations in provider order, deduplicated on (label, related_name), then
// truncated to `cap`. Pages are fetched only until `cap` unique relations are
// in hand.
std::vector<Relation> FetchRelations(std::string_view cui, UmlsClient& client,
                                     int cap = kDefaultRelationCap);

ConceptRecord FetchConcept(const ConceptLink& link, UmlsClient& client,
                           int relation_cap = kDefaultRelationCap,
                           const DefinitionPolicy& policy = {});

}  // namespace umlsqa

#endif  // UMLSQA_UMLS_H_
