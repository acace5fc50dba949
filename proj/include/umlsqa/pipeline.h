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

// End-to-end answering: extract terms, link them to UMLS concepts, pull
// definitions and relations, inline that knowledge into the prompt, generate.

#ifndef UMLSQA_PIPELINE_H_
#define UMLSQA_PIPELINE_H_

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "umlsqa/chat.h"
#include "umlsqa/dataset.h"
#include "umlsqa/error.h"
#include "umlsqa/extraction.h"
#include "umlsqa/umls.h"

namespace umlsqa {

enum class Augmentation { kNone, kDirectUmls, kIndirectUmls };

std::string_view ToString(Augmentation a);  // "none" | "direct+umls" | "indirect+umls"
Augmentation ParseAugmentation(std::string_view name);

struct GenerationParams {
  double temperature = 0.0;
  int max_output_tokens = 1024;
  std::optional<std::int64_t> seed;

  bool operator==(const GenerationParams&) const = default;
};

struct SystemConfig {
  std::string model_id;
  Augmentation augmentation = Augmentation::kNone;
  int relation_cap = kDefaultRelationCap;
  GenerationParams generation;

  // "<model_id>/<augmentation>", unique within one experiment.
  std::string Name() const;
  void Validate() const;

  bool operator==(const SystemConfig&) const = default;
};

nlohmann::json ToJson(const SystemConfig& c);
SystemConfig SystemConfigFromJson(const nlohmann::json& j);

struct TermLink {
  std::string term;
  std::optional<std::string> cui;

  bool operator==(const TermLink&) const = default;
};

struct StageTimings {
  double extraction_ms = 0;
  double umls_ms = 0;
  double generation_ms = 0;
};

struct AugmentedAnswer {
  std::string question_id;
  SystemConfig config;
  std::string answer_text;
  std::vector<ExtractedTerm> extracted_terms;
  std::vector<TermLink> term_links;
  std::vector<ConceptRecord> concepts;
  std::string extraction_prompt;
  std::string final_prompt;
  // Augmentation was requested but no concept could be used.
  bool degraded = false;
  std::vector<std::string> warnings;
  std::string run_id;
  // Wall-clock; kept out of the answer-set record so reruns stay
  // byte-identical (see RunExperiment).
  StageTimings timings;
};

// The answer-set record. Timings are excluded.
nlohmann::json ToJson(const AugmentedAnswer& a);
AugmentedAnswer AugmentedAnswerFromJson(const nlohmann::json& j);

// Question, instruction and, when `concepts` is non-empty, a knowledge block
// with one section per concept:
//
//   ## <preferred name> (<CUI>)
//   Definition: <text>            (only if the concept has one)
//   Relations:                    (only if it has relations)
//   - <label> → <related name>
//
// Concepts render in the given order. Field values have line breaks folded to
// spaces so each fact stays on one line. An empty list gives the baseline
// prompt, which has no knowledge block.
std::string BuildAugmentedPrompt(std::string_view question,
                                 std::span<const ConceptRecord> concepts);

std::string RenderConceptSection(const ConceptRecord& c);

// Drops relations from the back until the rendered section fits in
// `char_budget` bytes. Preferred name and definition are never cut.
ConceptRecord FitToBudget(ConceptRecord c, size_t char_budget);

struct Providers {
  ChatProvider& extractor;
  ChatProvider& generator;
  UmlsClient& umls;
};

struct PipelineOptions {
  ExtractionOptions extraction;
  DefinitionPolicy definitions;
  size_t concept_char_budget = 4000;
  int workers = 4;
  std::string run_id;
};

// Generation failed; `partial` holds everything gathered before it.
class AnswerError : public ProviderError {
 public:
  AnswerError(const std::string& what, AugmentedAnswer partial)
      : ProviderError(what), partial_(std::move(partial)) {}
  const AugmentedAnswer& partial() const { return partial_; }

 private:
  AugmentedAnswer partial_;
};

AugmentedAnswer AnswerQuestion(const QARecord& record, const SystemConfig& config,
                               const Providers& providers,
                               const PipelineOptions& options = {});

struct ItemFailure {
  std::string question_id;
  std::string config_name;
  std::string message;
  std::exception_ptr error;
};

struct ExperimentResult {
  size_t generated = 0;
  size_t resumed = 0;
  std::vector<ItemFailure> failures;
  // Final contents of the answer set, in output order.
  std::vector<AugmentedAnswer> answers;
};

// Answers every (record, config) pair and writes the answer set to
// `answers_path`: one JSON record per line, ordered by corpus position then
// config position. Pairs already present in an existing file are not
// regenerated, so an interrupted run resumes where it stopped. Each finished
// answer is appended as it completes; the file is rewritten in canonical order
// at the end. Stage timings go to "<answers_path>.timings.jsonl".
//
// Per-item failures are collected and skipped. If every attempted item fails,
// the first failure is rethrown.
ExperimentResult RunExperiment(const Corpus& corpus,
                               std::span<const SystemConfig> configs,
                               const Providers& providers,
                               const PipelineOptions& options,
                               const std::filesystem::path& answers_path);

// Reads an answer set. A malformed final line (an interrupted append) is
// dropped; malformed lines elsewhere throw ParseError.
std::vector<AugmentedAnswer> LoadAnswerSet(const std::filesystem::path& path);

}  // namespace umlsqa

#endif  // UMLSQA_PIPELINE_H_
