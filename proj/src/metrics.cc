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

#include "umlsqa/metrics.h"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "umlsqa/error.h"

namespace umlsqa {
namespace {

bool IsTokenByte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c >= 0x80;
}

std::map<std::string, int> NgramCounts(std::span<const std::string> tokens,
                                       int n) {
  std::map<std::string, int> counts;
  if (tokens.size() < static_cast<size_t>(n)) return counts;
  for (size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (int k = 1; k < n; ++k) {
      key += '\x1f';
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

Prf FromCounts(double overlap, double cand_total, double ref_total) {
  Prf s;
  s.precision = cand_total > 0 ? overlap / cand_total : 0.0;
  s.recall = ref_total > 0 ? overlap / ref_total : 0.0;
  s.f1 = HarmonicF1(s.precision, s.recall);
  return s;
}

double Norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Keeps the higher-F1 score; ties keep `best`.
void KeepBest(Prf& best, const Prf& candidate, bool first) {
  if (first || candidate.f1 > best.f1) best = candidate;
}

Prf MeanOf(const std::vector<const Prf*>& xs) {
  Prf m;
  if (xs.empty()) return m;
  for (const Prf* x : xs) {
    m.precision += x->precision;
    m.recall += x->recall;
    m.f1 += x->f1;
  }
  const double n = static_cast<double>(xs.size());
  m.precision /= n;
  m.recall /= n;
  m.f1 /= n;
  return m;
}

nlohmann::json PrfJson(const Prf& s) {
  return {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
}

}  // namespace

double HarmonicF1(double precision, double recall) {
  const double sum = precision + recall;
  return sum != 0 ? 2.0 * precision * recall / sum : 0.0;
}

TokenSequence Tokenize(std::string_view text) {
  TokenSequence tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (IsTokenByte(c)) {
      current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : ch);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Prf RougeN(std::span<const std::string> candidate,
           std::span<const std::string> reference, int n) {
  if (n < 1) throw ValidationError("ROUGE-N needs n >= 1");
  const auto cand = NgramCounts(candidate, n);
  const auto ref = NgramCounts(reference, n);
  double overlap = 0;
  for (const auto& [gram, count] : cand) {
    const auto it = ref.find(gram);
    if (it != ref.end()) overlap += std::min(count, it->second);
  }
  const auto total = [n](size_t len) {
    return len >= static_cast<size_t>(n) ? static_cast<double>(len - n + 1) : 0.0;
  };
  return FromCounts(overlap, total(candidate.size()), total(reference.size()));
}

size_t LcsLength(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

Prf RougeL(std::span<const std::string> candidate,
           std::span<const std::string> reference) {
  const double lcs = static_cast<double>(LcsLength(candidate, reference));
  return FromCounts(lcs, static_cast<double>(candidate.size()),
                    static_cast<double>(reference.size()));
}

Prf GreedyMatch(const SimilarityMatrix& sim) {
  if (sim.rows == 0 || sim.cols == 0) return {};
  constexpr double kLow = -std::numeric_limits<double>::infinity();
  std::vector<double> col_max(sim.cols, kLow);
  double row_sum = 0;
  for (size_t r = 0; r < sim.rows; ++r) {
    double row_max = kLow;
    const double* row = &sim.values[r * sim.cols];
    for (size_t c = 0; c < sim.cols; ++c) {
      row_max = std::max(row_max, row[c]);
      col_max[c] = std::max(col_max[c], row[c]);
    }
    row_sum += row_max;
  }
  double col_sum = 0;
  for (double v : col_max) col_sum += v;
  Prf s;
  s.precision = row_sum / static_cast<double>(sim.rows);
  s.recall = col_sum / static_cast<double>(sim.cols);
  s.f1 = HarmonicF1(s.precision, s.recall);
  return s;
}

Embeddings OrthogonalStubEmbedder::Embed(std::span<const std::string> tokens) {
  Embeddings e;
  e.dim = dim_;
  e.vectors.reserve(tokens.size());
  std::lock_guard lock(mu_);
  for (const auto& t : tokens) {
    auto [it, inserted] = ids_.emplace(t, ids_.size());
    if (it->second >= dim_) {
      ids_.erase(it);
      throw ProviderError("orthogonal stub embedder exhausted its " +
                          std::to_string(dim_) + " dimensions");
    }
    std::vector<double> v(dim_, 0.0);
    v[it->second] = 1.0;
    e.vectors.push_back(std::move(v));
  }
  return e;
}

HttpTokenEmbedder::HttpTokenEmbedder(std::string base_url, std::string api_key,
                                     RetryPolicy retry)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)), retry_(retry) {}

Embeddings HttpTokenEmbedder::Embed(std::span<const std::string> tokens) {
  HttpClient client(base_url_, retry_);
  if (!api_key_.empty()) client.SetBearerToken(api_key_);
  const nlohmann::json req{{"tokens", std::vector<std::string>(tokens.begin(), tokens.end())}};
  const HttpResponse res = client.Post("/embed", req.dump());
  if (res.status != 200) {
    throw ProviderError("embedding endpoint: HTTP " + std::to_string(res.status));
  }
  try {
    const auto j = nlohmann::json::parse(res.body);
    Embeddings e;
    e.dim = j.at("dim").get<size_t>();
    e.vectors = j.at("vectors").get<std::vector<std::vector<double>>>();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw ProviderError(std::string("malformed embedding response: ") + ex.what());
  }
}

SimilarityMatrix CosineMatrix(const Embeddings& candidate,
                              const Embeddings& reference) {
  SimilarityMatrix sim;
  sim.rows = candidate.vectors.size();
  sim.cols = reference.vectors.size();
  sim.values.assign(sim.rows * sim.cols, 0.0);
  std::vector<double> ref_norm(sim.cols);
  for (size_t c = 0; c < sim.cols; ++c) ref_norm[c] = Norm(reference.vectors[c]);
  for (size_t r = 0; r < sim.rows; ++r) {
    const auto& u = candidate.vectors[r];
    const double un = Norm(u);
    for (size_t c = 0; c < sim.cols; ++c) {
      const auto& v = reference.vectors[c];
      if (un == 0 || ref_norm[c] == 0) continue;
      double dot = 0;
      for (size_t k = 0; k < u.size(); ++k) dot += u[k] * v[k];
      sim.values[r * sim.cols + c] = dot / (un * ref_norm[c]);
    }
  }
  return sim;
}

Prf BertScore(std::span<const std::string> candidate,
              std::span<const std::string> reference, TokenEmbedder& embedder,
              std::vector<std::string>* warnings) {
  if (candidate.empty() || reference.empty()) {
    if (warnings) {
      warnings->push_back(std::string("BERTScore on empty ") +
                          (candidate.empty() ? "candidate" : "reference") +
                          "; scored 0");
    }
    return {};
  }
  const Embeddings c = embedder.Embed(candidate);
  const Embeddings r = embedder.Embed(reference);
  const auto check = [](const Embeddings& e, size_t expected, size_t dim) {
    if (e.vectors.size() != expected) {
      throw ProviderError("embedder returned " + std::to_string(e.vectors.size()) +
                          " vectors for " + std::to_string(expected) + " tokens");
    }
    for (const auto& v : e.vectors) {
      if (v.size() != dim) {
        throw ProviderError("embedder dimension mismatch: got " +
                            std::to_string(v.size()) + ", expected " +
                            std::to_string(dim));
      }
    }
  };
  check(c, candidate.size(), c.dim);
  check(r, reference.size(), c.dim);
  return GreedyMatch(CosineMatrix(c, r));
}

nlohmann::json MetricReport::ToJson() const {
  nlohmann::json j;
  j["configs"] = nlohmann::json::array();
  for (const auto& c : configs) {
    j["configs"].push_back({{"config", c.config_name},
                            {"scored", c.scored},
                            {"rouge1", PrfJson(c.rouge1)},
                            {"rouge2", PrfJson(c.rouge2)},
                            {"rougeL", PrfJson(c.rougeL)},
                            {"bertscore", PrfJson(c.bertscore)}});
  }
  j["pairs"] = nlohmann::json::array();
  for (const auto& p : pairs) {
    j["pairs"].push_back({{"question_id", p.question_id},
                          {"config", p.config_name},
                          {"rouge1", PrfJson(p.rouge1)},
                          {"rouge2", PrfJson(p.rouge2)},
                          {"rougeL", PrfJson(p.rougeL)},
                          {"bertscore", PrfJson(p.bertscore)}});
  }
  j["excluded"] = nlohmann::json::array();
  for (const auto& e : excluded) {
    j["excluded"].push_back(
        {{"question_id", e.question_id}, {"config", e.config_name}, {"reason", e.reason}});
  }
  j["excluded_count"] = excluded.size();
  j["warnings"] = warnings;
  return j;
}

std::string MetricReport::ToTable() const {
  size_t name_w = 6;
  for (const auto& c : configs) name_w = std::max(name_w, c.config_name.size());
  const auto pct = [](double v) { return fmt::format("{:>8.2f}", v * 100.0); };
  std::string out;
  out += fmt::format("{:<{}}  {:^24}  {:^24}\n", "", name_w, "ROUGE", "BERTScore");
  out += fmt::format("{:<{}}  {:>8}{:>8}{:>8}  {:>8}{:>8}{:>8}\n", "config", name_w,
                     "R-1", "R-2", "R-L", "P", "R", "F1");
  for (const auto& c : configs) {
    out += fmt::format("{:<{}}  {}{}{}  {}{}{}\n", c.config_name, name_w,
                       pct(c.rouge1.f1), pct(c.rouge2.f1), pct(c.rougeL.f1),
                       pct(c.bertscore.precision), pct(c.bertscore.recall),
                       pct(c.bertscore.f1));
  }
  if (!excluded.empty()) {
    out += fmt::format("({} answer(s) excluded)\n", excluded.size());
  }
  return out;
}

MetricReport ScoreAnswerSet(std::span<const AugmentedAnswer> answers,
                            const Corpus& corpus, TokenEmbedder& embedder,
                            int workers) {
  MetricReport report;
  struct Job {
    const AugmentedAnswer* answer;
    const QARecord* record;
  };
  std::vector<Job> jobs;
  for (const auto& a : answers) {
    const std::string name = a.config.Name();
    if (std::none_of(report.configs.begin(), report.configs.end(),
                     [&](const ConfigMeans& c) { return c.config_name == name; })) {
      report.configs.push_back({name, 0, {}, {}, {}, {}});
    }
    const QARecord* rec = corpus.Find(a.question_id);
    if (rec == nullptr) {
      report.excluded.push_back({a.question_id, name, "question not in corpus"});
    } else if (rec->reference_answers.empty()) {
      report.excluded.push_back({a.question_id, name, "no reference answer"});
    } else {
      jobs.push_back({&a, rec});
    }
  }

  std::vector<PairScores> scores(jobs.size());
  std::vector<std::vector<std::string>> job_warnings(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const auto& [answer, rec] = jobs[i];
        const TokenSequence cand = Tokenize(answer->answer_text);
        PairScores& s = scores[i];
        s.question_id = answer->question_id;
        s.config_name = answer->config.Name();
        bool first = true;
        for (const auto& ref_text : rec->reference_answers) {
          const TokenSequence ref = Tokenize(ref_text);
          KeepBest(s.rouge1, RougeN(cand, ref, 1), first);
          KeepBest(s.rouge2, RougeN(cand, ref, 2), first);
          KeepBest(s.rougeL, RougeL(cand, ref), first);
          KeepBest(s.bertscore, BertScore(cand, ref, embedder, &job_warnings[i]), first);
          first = false;
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = embedder.concurrent() ? std::max(1, workers) : 1;
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (size_t i = 0; i < jobs.size(); ++i) {
    for (auto& w : job_warnings[i]) {
      report.warnings.push_back(scores[i].question_id + " [" + scores[i].config_name +
                                "]: " + w);
    }
  }
  report.pairs = std::move(scores);
  for (auto& c : report.configs) {
    std::vector<const Prf*> r1, r2, rl, bs;
    for (const auto& p : report.pairs) {
      if (p.config_name != c.config_name) continue;
      r1.push_back(&p.rouge1);
      r2.push_back(&p.rouge2);
      rl.push_back(&p.rougeL);
      bs.push_back(&p.bertscore);
    }
    c.scored = r1.size();
    c.rouge1 = MeanOf(r1);
    c.rouge2 = MeanOf(r2);
    c.rougeL = MeanOf(rl);
    c.bertscore = MeanOf(bs);
  }
  return report;
}

}  // namespace umlsqa
