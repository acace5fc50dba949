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

// Medical terminology extraction by instruction prompting.
//
// Two prompt techniques are supported. Direct extraction asks only for the
// terms that literally occur in the question; indirect extraction asks for
// terms related to it, which lets the model expand abbreviations ("PAD") or
// reformulate phrases ("risk of stroke").

#ifndef UMLSQA_EXTRACTION_H_
#define UMLSQA_EXTRACTION_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "umlsqa/chat.h"

namespace umlsqa {

enum class ExtractionMode { kDirect, kIndirect };

std::string_view ToString(ExtractionMode mode);  // "direct" | "indirect"
ExtractionMode ParseExtractionMode(std::string_view name);

struct ExtractedTerm {
  std::string surface;
  ExtractionMode mode = ExtractionMode::kDirect;
  int ordinal = 0;

  bool operator==(const ExtractedTerm&) const = default;
};

// The prompt template with {question} substituted; nothing else changes.
// Throws ValidationError for an empty (or all-whitespace) question.
std::string BuildExtractionPrompt(std::string_view question, ExtractionMode mode);

// Pulls the "medical terminologies" string array out of free-form model
// output: the first balanced {...} block that parses as a JSON object holding
// that key wins, so surrounding prose and code fences are tolerated. Elements
// come back trimmed, empties dropped. Throws ParseError (carrying `raw`) when
// no such object exists or the value is not an array of strings.
std::vector<std::string> ParseExtractionOutput(std::string_view raw);

// Case-insensitive, first occurrence wins, order otherwise preserved.
std::vector<std::string> DedupTerms(std::span<const std::string> terms);

struct ExtractionOptions {
  std::string model;
  // Extra provider calls allowed after a reply that does not parse.
  int retry_budget = 2;
  double temperature = 0.0;
  int max_tokens = 512;
};

struct ExtractionResult {
  std::vector<ExtractedTerm> terms;
  std::string prompt;
  int attempts = 0;
  std::vector<std::string> warnings;
};

// Prompt -> provider -> parse -> dedup. Unparseable replies are retried up to
// the budget; if every reply fails to parse the result is empty and carries a
// warning. Provider failures are retried within the same budget and rethrown
// once it is spent. CredentialError is never retried.
ExtractionResult ExtractTerms(std::string_view question, ExtractionMode mode,
                              ChatProvider& llm,
                              const ExtractionOptions& options = {});

}  // namespace umlsqa

#endif  // UMLSQA_EXTRACTION_H_
