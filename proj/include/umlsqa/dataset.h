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

// Question corpora: the normalized line-delimited format, the TREC LiveQA
// XML converter, and id-manifest subsets.
//
// Normalized format, one JSON object per line (UTF-8):
//
//   {"id": "TQ1", "question": "...", "reference_answers": ["..."],
//    "source_tag": "liveqa-test"}
//
// `id` and `source_tag` are optional on input; a missing id becomes the
// 1-based line position among non-blank lines.

#ifndef UMLSQA_DATASET_H_
#define UMLSQA_DATASET_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace umlsqa {

struct QARecord {
  std::string id;
  std::string question_text;
  std::vector<std::string> reference_answers;
  std::string source_tag;

  bool operator==(const QARecord&) const = default;
};

struct Corpus {
  std::string name;
  std::vector<QARecord> records;

  // nullptr if absent.
  const QARecord* Find(std::string_view id) const;

  bool operator==(const Corpus&) const = default;
};

enum class CorpusFormat { kNormalizedJsonl, kTrecXml };

CorpusFormat ParseCorpusFormat(std::string_view name);

nlohmann::json ToJson(const QARecord& record);

// Corpus name is the file stem.
Corpus LoadCorpus(const std::filesystem::path& path, CorpusFormat format,
                  std::string_view source_tag = "liveqa-test");

Corpus ParseNormalizedJsonl(std::string_view text, std::string name);

// TREC 2017 LiveQA medical layout. Element mapping (case-insensitive):
//   NLM-QUESTION[@qid]                       -> id (position if absent)
//   ORIGINAL-QUESTION/MESSAGE                -> question text; falls back to
//     ORIGINAL-QUESTION/SUBJECT, then NIST-PARAPHRASE, then NLM-SUMMARY
//   REFERENCEANSWERS/REFANSWER/ANSWER        -> reference_answers, in order
//     (REFERENCE-ANSWERS/REFERENCE-ANSWER/ANSWER is accepted too)
// NLM-QUESTION elements may sit at any depth below the document root.
Corpus ParseTrecXml(std::string_view text, std::string name,
                    std::string_view source_tag);

std::string SerializeCorpus(const Corpus& corpus);
void SaveCorpus(const Corpus& corpus, const std::filesystem::path& path);

// Keeps corpus order regardless of the order of `ids`. Throws DatasetError
// listing every unknown id.
Corpus SelectSubset(const Corpus& corpus, std::span<const std::string> ids,
                    std::string_view suffix = "subset");

// One id per line; blank lines and lines starting with '#' are ignored.
std::vector<std::string> ReadIdManifest(const std::filesystem::path& path);

}  // namespace umlsqa

#endif  // UMLSQA_DATASET_H_
