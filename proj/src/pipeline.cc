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

#include "umlsqa/pipeline.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "umlsqa/util.h"

namespace umlsqa {
namespace {

constexpr std::string_view kBaselineInstruction =
    "You are a medical assistant. Answer the medical question below.\n";
constexpr std::string_view kAugmentedInstruction =
    "You are a medical assistant. Answer the medical question below. Use the "
    "medical knowledge provided where it is relevant, and say which of the "
    "provided facts you used.\n";
constexpr std::string_view kKnowledgeHeader = "Medical knowledge:\n";

std::string OneLine(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) out.push_back(c == '\n' || c == '\r' ? ' ' : c);
  return Trim(out);
}

double MsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

std::string_view ToString(Augmentation a) {
  switch (a) {
    case Augmentation::kNone: return "none";
    case Augmentation::kDirectUmls: return "direct+umls";
    case Augmentation::kIndirectUmls: return "indirect+umls";
  }
  return "none";
}

Augmentation ParseAugmentation(std::string_view name) {
  const std::string n = ToLowerAscii(name);
  if (n == "none" || n == "baseline") return Augmentation::kNone;
  if (n == "direct+umls" || n == "direct") return Augmentation::kDirectUmls;
  if (n == "indirect+umls" || n == "indirect") return Augmentation::kIndirectUmls;
  throw ValidationError("unknown augmentation '" + std::string(name) + "'");
}

std::string SystemConfig::Name() const {
  return model_id + "/" + std::string(ToString(augmentation));
}

void SystemConfig::Validate() const {
  if (model_id.empty()) throw ValidationError("system config needs a model_id");
  if (relation_cap < 1) throw ValidationError("relation_cap must be >= 1");
}

nlohmann::json ToJson(const SystemConfig& c) {
  nlohmann::json j{{"model_id", c.model_id},
                   {"augmentation", ToString(c.augmentation)},
                   {"relation_cap", c.relation_cap},
                   {"temperature", c.generation.temperature},
                   {"max_output_tokens", c.generation.max_output_tokens},
                   {"seed", nullptr}};
  if (c.generation.seed) j["seed"] = *c.generation.seed;
  return j;
}

SystemConfig SystemConfigFromJson(const nlohmann::json& j) {
  SystemConfig c;
  try {
    c.model_id = j.at("model_id").get<std::string>();
    c.augmentation = ParseAugmentation(j.value("augmentation", std::string("none")));
    c.relation_cap = j.value("relation_cap", kDefaultRelationCap);
    c.generation.temperature = j.value("temperature", 0.0);
    c.generation.max_output_tokens = j.value("max_output_tokens", 1024);
    if (j.contains("seed") && !j["seed"].is_null()) {
      c.generation.seed = j["seed"].get<std::int64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("system config: ") + e.what());
  }
  c.Validate();
  return c;
}

nlohmann::json ToJson(const AugmentedAnswer& a) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : a.extracted_terms) {
    terms.push_back(
        {{"surface", t.surface}, {"mode", ToString(t.mode)}, {"ordinal", t.ordinal}});
  }
  nlohmann::json links = nlohmann::json::array();
  for (const auto& l : a.term_links) {
    links.push_back({{"term", l.term}, {"cui", l.cui ? nlohmann::json(*l.cui) : nullptr}});
  }
  nlohmann::json concepts = nlohmann::json::array();
  for (const auto& c : a.concepts) concepts.push_back(ToJson(c));
  nlohmann::json j{{"question_id", a.question_id},
                   {"config", ToJson(a.config)},
                   {"answer_text", a.answer_text},
                   {"extracted_terms", std::move(terms)},
                   {"term_links", std::move(links)},
                   {"concepts", std::move(concepts)},
                   {"extraction_prompt", a.extraction_prompt},
                   {"final_prompt", a.final_prompt},
                   {"degraded", a.degraded},
                   {"warnings", a.warnings}};
  if (!a.run_id.empty()) j["run_id"] = a.run_id;
  return j;
}

AugmentedAnswer AugmentedAnswerFromJson(const nlohmann::json& j) {
  AugmentedAnswer a;
  try {
    a.question_id = j.at("question_id").get<std::string>();
    a.config = SystemConfigFromJson(j.at("config"));
    a.answer_text = j.at("answer_text").get<std::string>();
    for (const auto& t : j.value("extracted_terms", nlohmann::json::array())) {
      a.extracted_terms.push_back({t.at("surface").get<std::string>(),
                                   ParseExtractionMode(t.at("mode").get<std::string>()),
                                   t.at("ordinal").get<int>()});
    }
    for (const auto& l : j.value("term_links", nlohmann::json::array())) {
      TermLink link{l.at("term").get<std::string>(), std::nullopt};
      if (!l.at("cui").is_null()) link.cui = l["cui"].get<std::string>();
      a.term_links.push_back(std::move(link));
    }
    for (const auto& c : j.value("concepts", nlohmann::json::array())) {
      a.concepts.push_back(ConceptRecordFromJson(c));
    }
    a.extraction_prompt = j.value("extraction_prompt", std::string());
    a.final_prompt = j.at("final_prompt").get<std::string>();
    a.degraded = j.value("degraded", false);
    a.warnings = j.value("warnings", std::vector<std::string>{});
    a.run_id = j.value("run_id", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("answer record: ") + e.what(), j.dump());
  }
  return a;
}

std::string RenderConceptSection(const ConceptRecord& c) {
  std::string out = "## " + OneLine(c.preferred_name) + " (" + c.cui + ")\n";
  if (c.definition) out += "Definition: " + OneLine(c.definition->text) + "\n";
  if (!c.relations.empty()) {
    out += "Relations:\n";
    for (const auto& r : c.relations) {
      out += "- " + OneLine(r.label) + " → " + OneLine(r.related_name) + "\n";
    }
  }
  return out;
}

ConceptRecord FitToBudget(ConceptRecord c, size_t char_budget) {
  while (!c.relations.empty() && RenderConceptSection(c).size() > char_budget) {
    c.relations.pop_back();
  }
  return c;
}

std::string BuildAugmentedPrompt(std::string_view question,
                                 std::span<const ConceptRecord> concepts) {
  std::string out;
  if (concepts.empty()) {
    out += kBaselineInstruction;
  } else {
    out += kAugmentedInstruction;
    out += "\n";
    out += kKnowledgeHeader;
    for (const auto& c : concepts) {
      out += "\n";
      out += RenderConceptSection(c);
    }
  }
  out += "\nQuestion: ";
  out += Trim(question);
  out += "\nAnswer:";
  return out;
}

AugmentedAnswer AnswerQuestion(const QARecord& record, const SystemConfig& config,
                               const Providers& providers,
                               const PipelineOptions& options) {
  config.Validate();
  AugmentedAnswer a;
  a.question_id = record.id;
  a.config = config;
  a.run_id = options.run_id;

  if (config.augmentation != Augmentation::kNone) {
    const ExtractionMode mode = config.augmentation == Augmentation::kDirectUmls
                                    ? ExtractionMode::kDirect
                                    : ExtractionMode::kIndirect;
    ExtractionOptions eopts = options.extraction;
    if (eopts.model.empty()) eopts.model = config.model_id;

    auto start = std::chrono::steady_clock::now();
    ExtractionResult extraction =
        ExtractTerms(record.question_text, mode, providers.extractor, eopts);
    a.timings.extraction_ms = MsSince(start);
    a.extraction_prompt = std::move(extraction.prompt);
    a.extracted_terms = std::move(extraction.terms);
    a.warnings = std::move(extraction.warnings);

    start = std::chrono::steady_clock::now();
    std::set<std::string> seen_cuis;
    for (const auto& term : a.extracted_terms) {
      auto link = LinkConcept(term.surface, providers.umls);
      a.term_links.push_back({term.surface, link ? std::optional(link->cui) : std::nullopt});
      if (!link) {
        spdlog::info("{}: no UMLS concept for '{}'", record.id, term.surface);
        continue;
      }
      if (!seen_cuis.insert(link->cui).second) continue;
      a.concepts.push_back(FitToBudget(
          FetchConcept(*link, providers.umls, config.relation_cap, options.definitions),
          options.concept_char_budget));
    }
    a.timings.umls_ms = MsSince(start);

    if (a.concepts.empty()) {
      a.degraded = true;
      a.warnings.push_back(a.extracted_terms.empty()
                               ? "no terms extracted; using baseline prompt"
                               : "no extracted term linked to UMLS; using baseline prompt");
    }
  }

  a.final_prompt = BuildAugmentedPrompt(record.question_text, a.concepts);

  ChatRequest request;
  request.model = config.model_id;
  request.messages.push_back({"user", a.final_prompt});
  request.temperature = config.generation.temperature;
  request.max_tokens = config.generation.max_output_tokens;
  request.seed = config.generation.seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    a.answer_text = providers.generator.Complete(request);
  } catch (const ProviderError& e) {
    a.timings.generation_ms = MsSince(start);
    throw AnswerError(record.id + " [" + config.Name() + "]: generation failed: " +
                          e.what(),
                      std::move(a));
  }
  a.timings.generation_ms = MsSince(start);
  return a;
}

std::vector<AugmentedAnswer> LoadAnswerSet(const std::filesystem::path& path) {
  std::vector<std::string> lines;
  {
    std::istringstream in(ReadFile(path));
    std::string line;
    while (std::getline(in, line)) {
      if (!Trim(line).empty()) lines.push_back(std::move(line));
    }
  }
  std::vector<AugmentedAnswer> out;
  for (size_t i = 0; i < lines.size(); ++i) {
    const auto j = nlohmann::json::parse(lines[i], nullptr, false);
    if (j.is_discarded()) {
      if (i + 1 == lines.size()) {
        spdlog::warn("{}: dropping truncated final record", path.string());
        break;
      }
      throw ParseError(path.string() + ":" + std::to_string(i + 1) +
                           ": malformed answer record",
                       lines[i]);
    }
    out.push_back(AugmentedAnswerFromJson(j));
  }
  return out;
}

ExperimentResult RunExperiment(const Corpus& corpus,
                               std::span<const SystemConfig> configs,
                               const Providers& providers,
                               const PipelineOptions& options,
                               const std::filesystem::path& answers_path) {
  if (corpus.records.empty()) throw ValidationError("corpus is empty");
  if (configs.empty()) throw ValidationError("no system configs");
  std::map<std::string, size_t> config_index;
  for (size_t i = 0; i < configs.size(); ++i) {
    configs[i].Validate();
    if (!config_index.emplace(configs[i].Name(), i).second) {
      throw ValidationError("duplicate system config " + configs[i].Name());
    }
  }
  std::unordered_map<std::string, size_t> record_index;
  for (size_t i = 0; i < corpus.records.size(); ++i) {
    record_index.emplace(corpus.records[i].id, i);
  }

  // (record, config) -> answer
  std::map<std::pair<size_t, size_t>, AugmentedAnswer> done;
  ExperimentResult result;
  std::error_code ec;
  if (std::filesystem::exists(answers_path, ec)) {
    for (auto& a : LoadAnswerSet(answers_path)) {
      const auto r = record_index.find(a.question_id);
      const auto c = config_index.find(a.config.Name());
      if (r == record_index.end() || c == config_index.end() ||
          !(a.config == configs[c->second])) {
        spdlog::warn("dropping answer {} [{}]: not part of this experiment",
                     a.question_id, a.config.Name());
        continue;
      }
      done.insert_or_assign({r->second, c->second}, std::move(a));
    }
    result.resumed = done.size();
  }

  std::vector<std::pair<size_t, size_t>> todo;
  for (size_t r = 0; r < corpus.records.size(); ++r) {
    for (size_t c = 0; c < configs.size(); ++c) {
      if (!done.count({r, c})) todo.emplace_back(r, c);
    }
  }
  if (result.resumed > 0) {
    spdlog::info("resuming: {} answers present, {} to go", result.resumed, todo.size());
  }

  if (!todo.empty()) {
    // Rewrite what survived validation so appends extend a clean file.
    {
      std::string existing;
      for (const auto& [k, a] : done) existing += ToJson(a).dump() + "\n";
      WriteFileAtomic(answers_path, existing);
    }
    std::ofstream append(answers_path, std::ios::app | std::ios::binary);
    std::ofstream timings(answers_path.string() + ".timings.jsonl",
                          std::ios::app | std::ios::binary);
    if (!append) throw StorageError("cannot append to " + answers_path.string());

    std::mutex mu;
    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (size_t i = next++; i < todo.size(); i = next++) {
        const auto [r, c] = todo[i];
        const QARecord& record = corpus.records[r];
        try {
          AugmentedAnswer a = AnswerQuestion(record, configs[c], providers, options);
          const nlohmann::json t{{"question_id", a.question_id},
                                 {"config", configs[c].Name()},
                                 {"extraction_ms", a.timings.extraction_ms},
                                 {"umls_ms", a.timings.umls_ms},
                                 {"generation_ms", a.timings.generation_ms}};
          std::lock_guard lock(mu);
          append << ToJson(a).dump() << '\n' << std::flush;
          if (timings) timings << t.dump() << '\n' << std::flush;
          done.insert_or_assign({r, c}, std::move(a));
          ++result.generated;
        } catch (const std::exception& e) {
          spdlog::error("{} [{}]: {}", record.id, configs[c].Name(), e.what());
          std::lock_guard lock(mu);
          result.failures.push_back(
              {record.id, configs[c].Name(), e.what(), std::current_exception()});
        }
      }
    };
    const int n = std::clamp<int>(options.workers, 1,
                                  static_cast<int>(std::min<size_t>(todo.size(), 64)));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    append.close();
    if (!append) throw StorageError("write failed: " + answers_path.string());
  }

  std::string canonical;
  for (auto& [k, a] : done) {
    canonical += ToJson(a).dump() + "\n";
    result.answers.push_back(std::move(a));
  }
  WriteFileAtomic(answers_path, canonical);

  std::sort(result.failures.begin(), result.failures.end(),
            [&](const ItemFailure& x, const ItemFailure& y) {
              return std::pair(record_index[x.question_id], config_index[x.config_name]) <
                     std::pair(record_index[y.question_id], config_index[y.config_name]);
            });
  if (!todo.empty() && result.failures.size() == todo.size()) {
    std::rethrow_exception(result.failures.front().error);
  }
  return result;
}

}  // namespace umlsqa
