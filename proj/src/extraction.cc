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

#include "umlsqa/extraction.h"

#include <spdlog/spdlog.h>

#include <optional>
#include <unordered_set>

#include "umlsqa/error.h"
#include "umlsqa/util.h"

namespace umlsqa {
namespace {

constexpr std::string_view kDirectInstruction =
    "Only return the medical terminologies contained in the input question.\n";
constexpr std::string_view kIndirectInstruction =
    "Return medical terminologies related to the input question.\n";

// Shared by both modes, after the first instruction line.
constexpr std::string_view kTemplateBody =
    "Please return in JSON format.\n"
    "Output Format:\n"
    "{\n"
    "  \"medical terminologies\": [\"<name>\", \"<name>\"]\n"
    "}\n"
    "Please only return the JSON format information.\n"
    "Input: {question}\n"
    "Output:";

constexpr std::string_view kPlaceholder = "{question}";
constexpr std::string_view kTermsKey = "medical terminologies";

// Index one past the '}' that closes the object opened at `open`, or npos.
size_t MatchBrace(std::string_view s, size_t open) {
  int depth = 0;
  bool in_string = false;
  for (size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

std::string Excerpt(std::string_view raw) {
  constexpr size_t kMax = 200;
  return raw.size() <= kMax ? std::string(raw)
                            : std::string(raw.substr(0, kMax)) + "...";
}

}  // namespace

std::string_view ToString(ExtractionMode mode) {
  return mode == ExtractionMode::kDirect ? "direct" : "indirect";
}

ExtractionMode ParseExtractionMode(std::string_view name) {
  const std::string n = ToLowerAscii(name);
  if (n == "direct") return ExtractionMode::kDirect;
  if (n == "indirect") return ExtractionMode::kIndirect;
  throw ValidationError("unknown extraction mode '" + std::string(name) + "'");
}

std::string BuildExtractionPrompt(std::string_view question, ExtractionMode mode) {
  if (Trim(question).empty()) {
    throw ValidationError("extraction prompt needs a non-empty question");
  }
  std::string prompt(mode == ExtractionMode::kDirect ? kDirectInstruction
                                                     : kIndirectInstruction);
  const size_t at = kTemplateBody.find(kPlaceholder);
  prompt.append(kTemplateBody.substr(0, at));
  prompt.append(question);
  prompt.append(kTemplateBody.substr(at + kPlaceholder.size()));
  return prompt;
}

std::vector<std::string> ParseExtractionOutput(std::string_view raw) {
  for (size_t open = raw.find('{'); open != std::string_view::npos;
       open = raw.find('{', open + 1)) {
    const size_t end = MatchBrace(raw, open);
    if (end == std::string_view::npos) continue;
    const auto obj = nlohmann::json::parse(raw.substr(open, end - open),
                                           nullptr, /*allow_exceptions=*/false);
    if (!obj.is_object()) continue;
    const auto it = obj.find(kTermsKey);
    if (it == obj.end()) continue;
    if (!it->is_array()) {
      throw ParseError("\"medical terminologies\" is not an array", std::string(raw));
    }
    std::vector<std::string> terms;
    for (const auto& item : *it) {
      if (!item.is_string()) {
        throw ParseError("\"medical terminologies\" holds a non-string element",
                         std::string(raw));
      }
      std::string t = Trim(item.get<std::string>());
      if (!t.empty()) terms.push_back(std::move(t));
    }
    return terms;
  }
  throw ParseError("no JSON object with \"medical terminologies\" in: " +
                       Excerpt(raw),
                   std::string(raw));
}

std::vector<std::string> DedupTerms(std::span<const std::string> terms) {
  std::unordered_set<std::string> seen;
  std::vector<std::string> out;
  for (const auto& t : terms) {
    std::string trimmed = Trim(t);
    if (trimmed.empty()) continue;
    if (seen.insert(ToLowerAscii(trimmed)).second) out.push_back(std::move(trimmed));
  }
  return out;
}

ExtractionResult ExtractTerms(std::string_view question, ExtractionMode mode,
                              ChatProvider& llm, const ExtractionOptions& options) {
  ExtractionResult result;
  result.prompt = BuildExtractionPrompt(question, mode);

  ChatRequest request;
  request.model = options.model;
  request.messages.push_back({"user", result.prompt});
  request.temperature = options.temperature;
  request.max_tokens = options.max_tokens;

  const int max_attempts = 1 + std::max(0, options.retry_budget);
  std::optional<ProviderError> provider_failure;
  std::string last_raw;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    result.attempts = attempt;
    std::string raw;
    try {
      raw = llm.Complete(request);
    } catch (const CredentialError&) {
      throw;
    } catch (const ProviderError& e) {
      provider_failure = e;
      spdlog::warn("extraction attempt {}/{}: {}", attempt, max_attempts, e.what());
      continue;
    }
    provider_failure.reset();
    try {
      const auto terms = DedupTerms(ParseExtractionOutput(raw));
      for (size_t i = 0; i < terms.size(); ++i) {
        result.terms.push_back({terms[i], mode, static_cast<int>(i)});
      }
      return result;
    } catch (const ParseError&) {
      last_raw = std::move(raw);
      spdlog::warn("extraction attempt {}/{}: unparseable reply", attempt,
                   max_attempts);
    }
  }
  if (provider_failure) throw *provider_failure;
  result.warnings.push_back("extraction output unparseable after " +
                            std::to_string(max_attempts) +
                            " attempt(s); last reply: " + Excerpt(last_raw));
  return result;
}

}  // namespace umlsqa
