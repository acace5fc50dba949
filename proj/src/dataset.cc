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

#include "umlsqa/dataset.h"

#include <algorithm>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "umlsqa/error.h"
#include "umlsqa/util.h"

namespace umlsqa {
namespace {

using boost::property_tree::ptree;

void CheckUniqueIds(const Corpus& corpus) {
  std::unordered_set<std::string> seen;
  std::set<std::string> dups;
  for (const auto& r : corpus.records) {
    if (!seen.insert(r.id).second) dups.insert(r.id);
  }
  if (!dups.empty()) {
    std::string msg = "duplicate record id(s) in " + corpus.name + ":";
    for (const auto& id : dups) msg += " " + id;
    throw DatasetError(msg, {dups.begin(), dups.end()});
  }
}

bool NameIs(const std::string& tag, std::string_view want) {
  return ToLowerAscii(tag) == ToLowerAscii(want);
}

const ptree* Child(const ptree& node, std::string_view name) {
  for (const auto& [tag, child] : node) {
    if (NameIs(tag, name)) return &child;
  }
  return nullptr;
}

std::string ChildText(const ptree& node, std::string_view name) {
  const ptree* c = Child(node, name);
  return c ? Trim(c->data()) : std::string();
}

// REFANSWER, REFERENCE-ANSWER and misspelled variants seen in the wild.
bool IsAnswerEntry(const std::string& tag) {
  const std::string t = ToLowerAscii(tag);
  return t.find("answer") != std::string::npos && t.find("url") == std::string::npos;
}

void CollectQuestions(const ptree& node, std::vector<const ptree*>& out) {
  for (const auto& [tag, child] : node) {
    if (NameIs(tag, "NLM-QUESTION")) {
      out.push_back(&child);
    } else if (tag != "<xmlattr>" && tag != "<xmlcomment>") {
      CollectQuestions(child, out);
    }
  }
}

QARecord RecordFromTrec(const ptree& q, size_t position,
                        std::string_view source_tag) {
  QARecord rec;
  rec.source_tag = std::string(source_tag);
  if (auto attrs = q.get_child_optional("<xmlattr>")) {
    for (const auto& [name, value] : *attrs) {
      if (NameIs(name, "qid")) rec.id = Trim(value.data());
    }
  }
  if (rec.id.empty()) rec.id = std::to_string(position);

  if (const ptree* orig = Child(q, "ORIGINAL-QUESTION")) {
    rec.question_text = ChildText(*orig, "MESSAGE");
    if (rec.question_text.empty()) rec.question_text = ChildText(*orig, "SUBJECT");
  }
  if (rec.question_text.empty()) rec.question_text = ChildText(q, "NIST-PARAPHRASE");
  if (rec.question_text.empty()) rec.question_text = ChildText(q, "NLM-SUMMARY");
  if (rec.question_text.empty()) {
    throw ParseError("NLM-QUESTION " + rec.id + " (#" +
                     std::to_string(position) + ") has no question text");
  }

  const ptree* refs = Child(q, "REFERENCEANSWERS");
  if (refs == nullptr) refs = Child(q, "REFERENCE-ANSWERS");
  if (refs != nullptr) {
    for (const auto& [tag, ref] : *refs) {
      if (!IsAnswerEntry(tag)) continue;
      std::string answer = ChildText(ref, "ANSWER");
      if (!answer.empty()) rec.reference_answers.push_back(std::move(answer));
    }
  }
  return rec;
}

}  // namespace

const QARecord* Corpus::Find(std::string_view id) const {
  for (const auto& r : records) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

CorpusFormat ParseCorpusFormat(std::string_view name) {
  if (name == "normalized-jsonl" || name == "jsonl") {
    return CorpusFormat::kNormalizedJsonl;
  }
  if (name == "trec-xml" || name == "xml") return CorpusFormat::kTrecXml;
  throw ValidationError("unknown corpus format '" + std::string(name) +
                        "' (expected normalized-jsonl or trec-xml)");
}

nlohmann::json ToJson(const QARecord& record) {
  return nlohmann::json{{"id", record.id},
                        {"question", record.question_text},
                        {"reference_answers", record.reference_answers},
                        {"source_tag", record.source_tag}};
}

Corpus ParseNormalizedJsonl(std::string_view text, std::string name) {
  Corpus corpus{std::move(name), {}};
  std::istringstream in{std::string(text)};
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const std::string where = corpus.name + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(where + ": " + e.what(), line);
    }
    if (!j.is_object()) throw ParseError(where + ": record is not an object", line);

    QARecord rec;
    try {
      if (j.contains("id") && !j["id"].is_null()) {
        rec.id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
      } else {
        rec.id = std::to_string(corpus.records.size() + 1);
      }
      if (!j.contains("question") || !j["question"].is_string()) {
        throw ValidationError(where + ": missing string field \"question\"");
      }
      rec.question_text = Trim(j["question"].get<std::string>());
      if (j.contains("reference_answers")) {
        rec.reference_answers =
            j["reference_answers"].get<std::vector<std::string>>();
      }
      rec.source_tag = j.value("source_tag", std::string());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + ": " + e.what(), line);
    }
    if (rec.question_text.empty()) throw ValidationError(where + ": empty question text");
    corpus.records.push_back(std::move(rec));
  }
  CheckUniqueIds(corpus);
  return corpus;
}

Corpus ParseTrecXml(std::string_view text, std::string name,
                    std::string_view source_tag) {
  ptree doc;
  std::istringstream in{std::string(text)};
  try {
    boost::property_tree::read_xml(in, doc);
  } catch (const boost::property_tree::xml_parser_error& e) {
    throw ParseError(name + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  std::vector<const ptree*> questions;
  CollectQuestions(doc, questions);

  Corpus corpus{std::move(name), {}};
  corpus.records.reserve(questions.size());
  for (size_t i = 0; i < questions.size(); ++i) {
    corpus.records.push_back(RecordFromTrec(*questions[i], i + 1, source_tag));
  }
  CheckUniqueIds(corpus);
  return corpus;
}

Corpus LoadCorpus(const std::filesystem::path& path, CorpusFormat format,
                  std::string_view source_tag) {
  const std::string text = ReadFile(path);
  std::string name = path.stem().string();
  switch (format) {
    case CorpusFormat::kNormalizedJsonl:
      return ParseNormalizedJsonl(text, std::move(name));
    case CorpusFormat::kTrecXml:
      return ParseTrecXml(text, std::move(name), source_tag);
  }
  throw ValidationError("unknown corpus format");
}

std::string SerializeCorpus(const Corpus& corpus) {
  std::string out;
  for (const auto& r : corpus.records) {
    out += ToJson(r).dump();
    out += '\n';
  }
  return out;
}

void SaveCorpus(const Corpus& corpus, const std::filesystem::path& path) {
  WriteFileAtomic(path, SerializeCorpus(corpus));
}

Corpus SelectSubset(const Corpus& corpus, std::span<const std::string> ids,
                    std::string_view suffix) {
  std::unordered_set<std::string> wanted;
  std::vector<std::string> repeated;
  for (const auto& id : ids) {
    if (!wanted.insert(id).second) repeated.push_back(id);
  }
  if (!repeated.empty()) {
    std::string msg = "id list repeats:";
    for (const auto& id : repeated) msg += " " + id;
    throw DatasetError(msg, repeated);
  }

  std::vector<std::string> missing;
  for (const auto& id : ids) {
    if (corpus.Find(id) == nullptr) missing.push_back(id);
  }
  if (!missing.empty()) {
    std::string msg = "unknown id(s) in " + corpus.name + ":";
    for (const auto& id : missing) msg += " " + id;
    throw DatasetError(msg, missing);
  }

  Corpus subset{corpus.name + "-" + std::string(suffix), {}};
  for (const auto& r : corpus.records) {
    if (wanted.count(r.id)) subset.records.push_back(r);
  }
  return subset;
}

std::vector<std::string> ReadIdManifest(const std::filesystem::path& path) {
  std::istringstream in(ReadFile(path));
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    std::string id = Trim(line);
    if (id.empty() || id.front() == '#') continue;
    ids.push_back(std::move(id));
  }
  return ids;
}

}  // namespace umlsqa
