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

// ROUGE-N, ROUGE-L and BERTScore, plus answer-set reports.
//
// Tokenization is fixed: ASCII-lowercase, then split on every run of
// non-alphanumeric bytes. Bytes >= 0x80 count as alphanumeric so UTF-8 words
// stay whole. No stemming, no stopwords.
//
// BERTScore here is the greedy-matching core only: cosine similarity between
// token embeddings, precision = mean over candidate tokens of the row max,
// recall = mean over reference tokens of the column max. No idf weighting and
// no baseline rescaling.

#ifndef UMLSQA_METRICS_H_
#define UMLSQA_METRICS_H_

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "umlsqa/dataset.h"
#include "umlsqa/http.h"
#include "umlsqa/pipeline.h"

namespace umlsqa {

using TokenSequence = std::vector<std::string>;

struct Prf {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

// 2PR/(P+R), or 0 when P+R is 0.
double HarmonicF1(double precision, double recall);

TokenSequence Tokenize(std::string_view text);

// Clipped n-gram overlap. Throws ValidationError for n < 1.
Prf RougeN(std::span<const std::string> candidate,
           std::span<const std::string> reference, int n);

size_t LcsLength(std::span<const std::string> a, std::span<const std::string> b);

// beta = 1.
Prf RougeL(std::span<const std::string> candidate,
           std::span<const std::string> reference);

// Row-major, rows = candidate tokens, cols = reference tokens.
struct SimilarityMatrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> values;

  double at(size_t r, size_t c) const { return values[r * cols + c]; }
};

// Greedy matching over a precomputed similarity matrix; 0/0/0 when either
// side is empty.
Prf GreedyMatch(const SimilarityMatrix& sim);

struct Embeddings {
  size_t dim = 0;
  std::vector<std::vector<double>> vectors;
};

class TokenEmbedder {
 public:
  virtual ~TokenEmbedder() = default;
  // One vector per token, all of the same dimension.
  virtual Embeddings Embed(std::span<const std::string> tokens) = 0;
  // False if Embed() must not be called from several threads at once.
  virtual bool concurrent() const { return true; }
  virtual std::string Identifier() const = 0;
};

// Each distinct token gets its own standard basis vector, so cosine similarity
// is 1 for equal tokens and 0 otherwise. Token ids are assigned on first
// sight and shared across calls. Throws ProviderError once more than `dim`
// distinct tokens have been seen.
class OrthogonalStubEmbedder : public TokenEmbedder {
 public:
  explicit OrthogonalStubEmbedder(size_t dim = 4096) : dim_(dim) {}
  Embeddings Embed(std::span<const std::string> tokens) override;
  std::string Identifier() const override { return "orthogonal-stub"; }

 private:
  size_t dim_;
  std::mutex mu_;
  std::unordered_map<std::string, size_t> ids_;
};

// POST {base_url}/embed  {"tokens": ["..."]}
//   -> {"dim": 768, "vectors": [[...], ...]}
class HttpTokenEmbedder : public TokenEmbedder {
 public:
  HttpTokenEmbedder(std::string base_url, std::string api_key, RetryPolicy retry = {});
  Embeddings Embed(std::span<const std::string> tokens) override;
  std::string Identifier() const override { return "http:" + base_url_; }

 private:
  std::string base_url_;
  std::string api_key_;
  RetryPolicy retry_;
};

// Cosine similarity; zero vectors have similarity 0 with everything.
SimilarityMatrix CosineMatrix(const Embeddings& candidate,
                              const Embeddings& reference);

// Empty candidate or reference gives 0/0/0 and, if `warnings` is set, a note.
// Throws ProviderError if the embedder returns ragged or miscounted vectors.
Prf BertScore(std::span<const std::string> candidate,
              std::span<const std::string> reference, TokenEmbedder& embedder,
              std::vector<std::string>* warnings = nullptr);

struct PairScores {
  std::string question_id;
  std::string config_name;
  Prf rouge1, rouge2, rougeL, bertscore;
};

struct ConfigMeans {
  std::string config_name;
  size_t scored = 0;
  Prf rouge1, rouge2, rougeL, bertscore;
};

struct Exclusion {
  std::string question_id;
  std::string config_name;
  std::string reason;
};

struct MetricReport {
  std::vector<PairScores> pairs;
  std::vector<ConfigMeans> configs;  // order of first appearance
  std::vector<Exclusion> excluded;
  std::vector<std::string> warnings;

  nlohmann::json ToJson() const;
  // Rows are configs; columns R-1, R-2, R-L (ROUGE F1) and P, R, F1
  // (BERTScore), all x100 with two decimals.
  std::string ToTable() const;
};

// Each answer is scored against every reference answer of its question and
// the best F1 is kept per metric (with its P and R). Answers whose question
// is missing from the corpus or has no reference are excluded from the means
// and listed in `excluded`.
MetricReport ScoreAnswerSet(std::span<const AugmentedAnswer> answers,
                            const Corpus& corpus, TokenEmbedder& embedder,
                            int workers = 1);

}  // namespace umlsqa

#endif  // UMLSQA_METRICS_H_
