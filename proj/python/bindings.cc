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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "umlsqa/dataset.h"
#include "umlsqa/error.h"
#include "umlsqa/extraction.h"
#include "umlsqa/metrics.h"
#include "umlsqa/review.h"

namespace py = pybind11;

namespace umlsqa {
namespace {

py::tuple AsTuple(const Prf& p) { return py::make_tuple(p.precision, p.recall, p.f1); }

// Stub-embedder BERTScore with a fresh token space per call.
py::tuple StubBertScore(const std::vector<std::string>& candidate,
                        const std::vector<std::string>& reference) {
  OrthogonalStubEmbedder embedder(candidate.size() + reference.size() + 1);
  return AsTuple(BertScore(candidate, reference, embedder));
}

py::dict WinRates(const std::vector<py::dict>& judgments,
                  const std::map<std::string, std::string>& assignments) {
  std::vector<Judgment> js;
  for (const auto& d : judgments) {
    Judgment j;
    j.reviewer_id = d["reviewer_id"].cast<std::string>();
    j.question_id = d["question_id"].cast<std::string>();
    for (const auto& [k, v] : d["verdicts"].cast<std::map<std::string, std::string>>()) {
      j.verdicts[ParseDimension(k)] = ParseVerdict(v);
    }
    js.push_back(std::move(j));
  }
  std::map<std::string, SlotAssignment> a;
  for (const auto& [q, s] : assignments) {
    if (s == "augmented_in_a") {
      a[q] = SlotAssignment::kAugmentedInA;
    } else if (s == "baseline_in_a") {
      a[q] = SlotAssignment::kBaselineInA;
    } else {
      throw ValidationError("assignment must be augmented_in_a or baseline_in_a");
    }
  }
  const WinRateSummary s = ComputeWinRates(js, a);
  py::dict out;
  out["questions"] = s.questions;
  for (const auto& [d, r] : s.dimensions) {
    py::dict dim;
    dim["augmented"] = r.pct[0];
    dim["tie"] = r.pct[1];
    dim["baseline"] = r.pct[2];
    out[py::str(std::string(ToString(d)))] = dim;
  }
  return out;
}

ExtractionMode Mode(const std::string& name) { return ParseExtractionMode(name); }

}  // namespace
}  // namespace umlsqa

PYBIND11_MODULE(_umlsqa, m) {
  using namespace umlsqa;
  m.doc() = "umlsqa core bindings";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  m.def("tokenize", &Tokenize, py::arg("text"));
  m.def(
      "rouge_n",
      [](const std::vector<std::string>& c, const std::vector<std::string>& r, int n) {
        return AsTuple(RougeN(c, r, n));
      },
      py::arg("candidate"), py::arg("reference"), py::arg("n"));
  m.def(
      "rouge_l",
      [](const std::vector<std::string>& c, const std::vector<std::string>& r) {
        return AsTuple(RougeL(c, r));
      },
      py::arg("candidate"), py::arg("reference"));
  m.def(
      "lcs_length",
      [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
        return LcsLength(a, b);
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "greedy_match",
      [](const std::vector<std::vector<double>>& rows) {
        SimilarityMatrix s;
        s.rows = rows.size();
        s.cols = rows.empty() ? 0 : rows.front().size();
        for (const auto& r : rows) {
          if (r.size() != s.cols) throw ValidationError("ragged similarity matrix");
          s.values.insert(s.values.end(), r.begin(), r.end());
        }
        return AsTuple(GreedyMatch(s));
      },
      py::arg("similarity"));
  m.def("stub_bertscore", &StubBertScore, py::arg("candidate"), py::arg("reference"));

  m.def(
      "extraction_prompt",
      [](const std::string& q, const std::string& mode) {
        return BuildExtractionPrompt(q, Mode(mode));
      },
      py::arg("question"), py::arg("mode"));
  m.def("parse_extraction_output", &ParseExtractionOutput, py::arg("raw"));
  m.def(
      "dedup_terms", [](const std::vector<std::string>& t) { return DedupTerms(t); },
      py::arg("terms"));

  m.def("win_rates", &WinRates, py::arg("judgments"), py::arg("assignments"));
  m.def("largest_remainder_percent", &LargestRemainderPercent, py::arg("counts"));

  m.def(
      "load_corpus",
      [](const std::filesystem::path& path, const std::string& format) {
        const Corpus c = LoadCorpus(path, ParseCorpusFormat(format));
        py::list out;
        for (const auto& r : c.records) {
          py::dict d;
          d["id"] = r.id;
          d["question"] = r.question_text;
          d["reference_answers"] = r.reference_answers;
          d["source_tag"] = r.source_tag;
          out.append(d);
        }
        return out;
      },
      py::arg("path"), py::arg("format") = "normalized-jsonl");
}
