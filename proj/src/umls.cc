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

#include "umlsqa/umls.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <regex>
#include <set>
#include <utility>

#include "umlsqa/error.h"
#include "umlsqa/util.h"

namespace umlsqa {
namespace {

// ISO 639-2 suffixes used by translated UMLS source abbreviations.
constexpr std::array<std::string_view, 30> kLanguageSuffixes = {
    "GER", "FRE", "SPA", "POR", "ITA", "JPN", "CZE", "DUT", "NOR", "SWE",
    "FIN", "POL", "RUS", "SCR", "LAV", "HUN", "KOR", "ARA", "GRE", "CHI",
    "DAN", "HEB", "TUR", "EST", "UKR", "BPO", "BAQ", "CAT", "HRV", "PER"};

constexpr std::array<std::string_view, 5> kNonEnglishSources = {
    "DMDICD10", "DMDUMD", "KCD5", "CPTSP", "MEDLINEPLUS_SPA"};

std::string EmptyBody(UmlsQueryKind kind) {
  return kind == UmlsQueryKind::kSearch ? R"({"result":{"results":[]}})"
                                        : R"({"result":[]})";
}

nlohmann::json ParseBody(const std::string& body, const UmlsQuery& q) {
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ProviderError("malformed UMLS " + std::string(ToString(q.kind)) +
                        " response for " + q.key);
  }
  return j;
}

std::string Slug(std::string_view key) {
  std::string out;
  bool pending_sep = false;
  for (char c : ToLowerAscii(key)) {
    const bool alnum = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
    if (!alnum) {
      pending_sep = !out.empty();
      continue;
    }
    if (pending_sep) out.push_back('_');
    pending_sep = false;
    out.push_back(c);
  }
  return out.empty() ? "_" : out;
}

void RequireCui(std::string_view cui) {
  if (!IsValidCui(cui)) {
    throw ValidationError("malformed CUI '" + std::string(cui) + "'");
  }
}

std::string StringField(const nlohmann::json& j, const char* key) {
  const auto it = j.find(key);
  return it != j.end() && it->is_string() ? it->get<std::string>() : std::string();
}

std::optional<std::string> CuiFromRelatedId(const std::string& related_id) {
  static const std::regex kCuiTail(R"((?:^|/)(C\d{7})$)");
  std::smatch m;
  if (std::regex_search(related_id, m, kCuiTail)) return m[1].str();
  return std::nullopt;
}

}  // namespace

nlohmann::json ToJson(const Relation& r) {
  nlohmann::json j{{"label", r.label},
                   {"related_name", r.related_name},
                   {"related_cui", nullptr},
                   {"source_vocabulary", r.source_vocabulary}};
  if (r.related_cui) j["related_cui"] = *r.related_cui;
  return j;
}

nlohmann::json ToJson(const ConceptRecord& c) {
  nlohmann::json rels = nlohmann::json::array();
  for (const auto& r : c.relations) rels.push_back(ToJson(r));
  nlohmann::json j{{"cui", c.cui},
                   {"preferred_name", c.preferred_name},
                   {"definition", nullptr},
                   {"relations", std::move(rels)}};
  if (c.definition) {
    j["definition"] = {{"text", c.definition->text},
                       {"source_vocabulary", c.definition->source_vocabulary}};
  }
  return j;
}

ConceptRecord ConceptRecordFromJson(const nlohmann::json& j) {
  ConceptRecord c;
  c.cui = j.at("cui").get<std::string>();
  c.preferred_name = j.at("preferred_name").get<std::string>();
  if (j.contains("definition") && !j["definition"].is_null()) {
    c.definition = Definition{j["definition"].at("text").get<std::string>(),
                              j["definition"].at("source_vocabulary").get<std::string>()};
  }
  for (const auto& r : j.at("relations")) {
    Relation rel{r.at("label").get<std::string>(),
                 r.at("related_name").get<std::string>(), std::nullopt,
                 r.value("source_vocabulary", std::string())};
    if (r.contains("related_cui") && !r["related_cui"].is_null()) {
      rel.related_cui = r["related_cui"].get<std::string>();
    }
    c.relations.push_back(std::move(rel));
  }
  return c;
}

bool IsValidCui(std::string_view cui) {
  if (cui.size() != 8 || cui[0] != 'C') return false;
  return std::all_of(cui.begin() + 1, cui.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

bool IsEnglishSource(std::string_view root_source) {
  const std::string src(root_source);
  for (auto s : kNonEnglishSources) {
    if (src == s) return false;
  }
  if (src.rfind("LNC-", 0) == 0) return src.rfind("LNC-EN-", 0) == 0;
  if (src.size() > 3) {
    const std::string_view tail = std::string_view(src).substr(src.size() - 3);
    for (auto lang : kLanguageSuffixes) {
      if (tail == lang) return false;
    }
  }
  return true;
}

std::string_view ToString(UmlsQueryKind kind) {
  switch (kind) {
    case UmlsQueryKind::kSearch: return "search";
    case UmlsQueryKind::kDefinitions: return "definitions";
    case UmlsQueryKind::kRelations: return "relations";
  }
  return "unknown";
}

CacheKey UmlsQuery::ToCacheKey() const {
  std::string subject = key;
  if (kind == UmlsQueryKind::kRelations) subject += "#p" + std::to_string(page);
  return {std::move(subject), "umls/" + std::string(ToString(kind))};
}

// --- HttpUmlsClient ---------------------------------------------------------

HttpUmlsClient::HttpUmlsClient(UmlsHttpOptions options)
    : options_(std::move(options)) {
  if (options_.api_key.empty()) {
    throw CredentialError("UMLS API key is not set");
  }
}

std::string HttpUmlsClient::Fetch(const UmlsQuery& query) {
  HttpClient http(options_.base_url, options_.retry);
  std::multimap<std::string, std::string> params{{"apiKey", options_.api_key}};
  std::string path;
  switch (query.kind) {
    case UmlsQueryKind::kSearch:
      path = "/search/" + options_.version;
      params.emplace("string", query.key);
      params.emplace("pageSize", std::to_string(options_.page_size));
      break;
    case UmlsQueryKind::kDefinitions:
      RequireCui(query.key);
      path = "/content/" + options_.version + "/CUI/" + query.key + "/definitions";
      params.emplace("pageSize", "100");
      break;
    case UmlsQueryKind::kRelations:
      RequireCui(query.key);
      path = "/content/" + options_.version + "/CUI/" + query.key + "/relations";
      params.emplace("pageSize", std::to_string(options_.page_size));
      params.emplace("pageNumber", std::to_string(query.page));
      break;
  }
  const HttpResponse res = http.Get(path, params);
  if (res.status == 404) return EmptyBody(query.kind);
  if (res.status != 200) {
    throw ProviderError("UMLS " + std::string(ToString(query.kind)) + " for " +
                        query.key + ": HTTP " + std::to_string(res.status));
  }
  return res.body;
}

// --- fixtures ---------------------------------------------------------------

FixtureUmlsClient::FixtureUmlsClient(std::filesystem::path dir,
                                     bool missing_is_empty)
    : dir_(std::move(dir)), missing_is_empty_(missing_is_empty) {}

std::filesystem::path FixtureUmlsClient::PathFor(const std::filesystem::path& dir,
                                                 const UmlsQuery& query) {
  const auto sub = dir / std::string(ToString(query.kind));
  switch (query.kind) {
    case UmlsQueryKind::kSearch:
      return sub / (Slug(query.key) + ".json");
    case UmlsQueryKind::kDefinitions:
      return sub / (query.key + ".json");
    case UmlsQueryKind::kRelations:
      return sub / (query.key + ".p" + std::to_string(query.page) + ".json");
  }
  return sub;
}

void FixtureUmlsClient::Write(const std::filesystem::path& dir,
                              const UmlsQuery& query, std::string_view body) {
  const auto path = PathFor(dir, query);
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw StorageError("cannot create " + path.parent_path().string());
  nlohmann::json j{
      {"query",
       {{"kind", ToString(query.kind)}, {"key", query.key}, {"page", query.page}}},
      {"body", nlohmann::json::parse(body)}};
  WriteFileAtomic(path, j.dump(2) + "\n");
}

std::string FixtureUmlsClient::Fetch(const UmlsQuery& query) {
  if (query.kind != UmlsQueryKind::kSearch) RequireCui(query.key);
  const auto path = PathFor(dir_, query);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    if (missing_is_empty_) return EmptyBody(query.kind);
    throw ProviderError("no UMLS fixture for " + std::string(ToString(query.kind)) +
                        " '" + query.key + "' (" + path.string() + ")");
  }
  const auto j = nlohmann::json::parse(ReadFile(path), nullptr, false);
  if (j.is_discarded() || !j.contains("query") || !j.contains("body")) {
    throw ProviderError("malformed fixture " + path.string());
  }
  const std::string recorded_key = j["query"].value("key", std::string());
  const bool same = query.kind == UmlsQueryKind::kSearch
                        ? ToLowerAscii(recorded_key) == ToLowerAscii(query.key)
                        : recorded_key == query.key;
  if (!same) {
    throw ProviderError("fixture " + path.string() + " was recorded for '" +
                        recorded_key + "', not '" + query.key + "'");
  }
  return j["body"].dump();
}

RecordingUmlsClient::RecordingUmlsClient(UmlsClient& inner,
                                         std::filesystem::path dir)
    : inner_(inner), dir_(std::move(dir)) {}

std::string RecordingUmlsClient::Fetch(const UmlsQuery& query) {
  std::string body = inner_.Fetch(query);
  FixtureUmlsClient::Write(dir_, query, body);
  return body;
}

CachingUmlsClient::CachingUmlsClient(UmlsClient& inner, CacheStore& store)
    : inner_(inner), store_(store) {}

std::string CachingUmlsClient::Fetch(const UmlsQuery& query) {
  return GetOrFetch(query.ToCacheKey(), [&] { return inner_.Fetch(query); },
                    store_);
}

// --- operations -------------------------------------------------------------

std::optional<ConceptLink> LinkConcept(std::string_view term, UmlsClient& client) {
  const std::string t = Trim(term);
  if (t.empty()) throw ValidationError("cannot link an empty term");
  const UmlsQuery q{UmlsQueryKind::kSearch, t, 1};
  const auto j = ParseBody(client.Fetch(q), q);
  const auto result = j.find("result");
  if (result == j.end() || !result->is_object()) return std::nullopt;
  const auto results = result->find("results");
  if (results == result->end() || !results->is_array()) return std::nullopt;
  for (const auto& hit : *results) {
    const std::string ui = StringField(hit, "ui");
    // UTS signals "no match" with a single ui == "NONE" row.
    if (ui == "NONE") return std::nullopt;
    if (IsValidCui(ui)) return ConceptLink{ui, StringField(hit, "name")};
  }
  return std::nullopt;
}

std::optional<Definition> FetchDefinition(std::string_view cui, UmlsClient& client,
                                          const DefinitionPolicy& policy) {
  RequireCui(cui);
  const UmlsQuery q{UmlsQueryKind::kDefinitions, std::string(cui), 1};
  const auto j = ParseBody(client.Fetch(q), q);
  const auto result = j.find("result");
  if (result == j.end() || !result->is_array()) return std::nullopt;

  std::vector<Definition> english;
  for (const auto& d : *result) {
    Definition def{StringField(d, "value"), StringField(d, "rootSource")};
    if (Trim(def.text).empty()) continue;
    const std::string lang = ToLowerAscii(StringField(d, "language"));
    const bool is_english =
        lang.empty() ? IsEnglishSource(def.source_vocabulary) : (lang == "eng" || lang == "en");
    if (is_english) english.push_back(std::move(def));
  }
  if (english.empty()) return std::nullopt;
  for (const auto& preferred : policy.source_priority) {
    for (const auto& def : english) {
      if (def.source_vocabulary == preferred) return def;
    }
  }
  return english.front();
}

std::vector<Relation> FetchRelations(std::string_view cui, UmlsClient& client,
                                     int cap) {
  RequireCui(cui);
  if (cap < 1) throw ValidationError("relation cap must be >= 1");
  std::vector<Relation> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (int page = 1;; ++page) {
    const UmlsQuery q{UmlsQueryKind::kRelations, std::string(cui), page};
    const auto j = ParseBody(client.Fetch(q), q);
    const auto result = j.find("result");
    if (result == j.end() || !result->is_array() || result->empty()) break;
    for (const auto& r : *result) {
      Relation rel;
      rel.label = StringField(r, "additionalRelationLabel");
      if (rel.label.empty()) rel.label = StringField(r, "relationLabel");
      rel.related_name = StringField(r, "relatedIdName");
      rel.related_cui = CuiFromRelatedId(StringField(r, "relatedId"));
      rel.source_vocabulary = StringField(r, "rootSource");
      if (rel.label.empty() || rel.related_name.empty()) continue;
      if (!seen.emplace(rel.label, rel.related_name).second) continue;
      out.push_back(std::move(rel));
      if (static_cast<int>(out.size()) == cap) return out;
    }
    const int page_count =
        j.contains("pageCount") && j["pageCount"].is_number_integer()
            ? j["pageCount"].get<int>()
            : 1;
    if (page >= page_count) break;
  }
  return out;
}

ConceptRecord FetchConcept(const ConceptLink& link, UmlsClient& client,
                           int relation_cap, const DefinitionPolicy& policy) {
  ConceptRecord c;
  c.cui = link.cui;
  c.preferred_name = link.preferred_name;
  c.definition = FetchDefinition(link.cui, client, policy);
  c.relations = FetchRelations(link.cui, client, relation_cap);
  return c;
}

}  // namespace umlsqa
