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

// Randomized reviewer sessions against the review API, scanning every
// reviewer-facing payload for leaked system identities.

#ifndef UMLSQA_TESTS_BLINDING_SESSIONS_H_
#define UMLSQA_TESTS_BLINDING_SESSIONS_H_

#include <random>
#include <string>
#include <vector>

#include "testing.h"
#include "umlsqa/review.h"
#include "umlsqa/review_api.h"
#include "umlsqa/util.h"

namespace umlsqa::testing {

struct SessionStats {
  size_t sessions = 0;
  size_t payloads = 0;
  size_t judgments = 0;
  std::vector<std::string> leaks;  // "<needle> in <method> <path>"
};

inline std::string RandomWord(std::mt19937_64& rng, size_t len) {
  static constexpr char kAlpha[] = "abcdefghijklmnopqrstuvwxyz";
  std::string s;
  for (size_t i = 0; i < len; ++i) s.push_back(kAlpha[rng() % 26]);
  return s;
}

// Runs `sessions` independent sessions. Each builds a fresh review set with
// random model names, then drives the API with a random mix of valid and
// invalid reviewer calls.
inline SessionStats RunBlindingSessions(size_t sessions, std::uint64_t seed) {
  SessionStats stats;
  std::mt19937_64 rng(seed);
  static const char* kAugs[] = {"none", "direct+umls", "indirect+umls"};
  for (size_t s = 0; s < sessions; ++s) {
    TempDir dir;
    const std::string base_model = "gpt-" + RandomWord(rng, 6);
    const std::string aug_model = "llama-" + RandomWord(rng, 6);
    const std::string base_label = base_model + "/" + kAugs[0];
    const std::string aug_label = aug_model + "/" + kAugs[1 + rng() % 2];

    std::vector<PairInput> pairs;
    const size_t n = 1 + rng() % 6;
    for (size_t i = 0; i < n; ++i) {
      const std::string qid = "Q" + std::to_string(i) + RandomWord(rng, 3);
      pairs.push_back({qid, "What about " + RandomWord(rng, 8) + "?",
                       "Answer text " + RandomWord(rng, 12),
                       "Other answer " + RandomWord(rng, 12)});
    }
    ReviewStore::Create(dir.path(), {base_label, aug_label, rng(), AssignBlinding(pairs, rng())});
    ReviewStore store(dir.path());
    const auto reviewers = store.IssueReviewers(1 + rng() % 3);
    const auto tokens = nlohmann::json::parse(ReadFile(dir / "reviewers.json"));
    std::vector<std::string> reviewer_tokens;
    for (const auto& r : tokens["reviewers"]) reviewer_tokens.push_back(r["token"]);

    const std::vector<std::string> needles = {
        base_model,     aug_model,       base_label,     aug_label,   "hidden_assignment",
        "assignment",   "augmented_in_a", "baseline_in_a", "baseline", "augmented",
        "model",        "config",         "system"};

    ReviewApi api(store);
    const auto call = [&](const std::string& method, const std::string& path,
                          const std::string& token, const std::string& body) {
      const ApiResponse r = api.Handle({method, path, token, body});
      const std::string text = r.body.dump();
      ++stats.payloads;
      for (const auto& needle : needles) {
        if (text.find(needle) != std::string::npos) {
          stats.leaks.push_back(needle + " in " + method + " " + path);
        }
      }
      return r;
    };

    const size_t steps = 5 + rng() % 20;
    for (size_t step = 0; step < steps; ++step) {
      const std::string& token = reviewer_tokens[rng() % reviewer_tokens.size()];
      const std::string& qid = pairs[rng() % pairs.size()].question_id;
      switch (rng() % 9) {
        case 0: call("GET", "/api/criteria", token, ""); break;
        case 1: call("GET", "/api/pending", token, ""); break;
        case 2: call("GET", "/api/progress", token, ""); break;
        case 3: call("GET", "/api/pairs/" + qid, token, ""); break;
        case 4: call("GET", "/api/pairs/missing-" + qid, token, ""); break;
        case 5: call("GET", "/api/summary", token, ""); break;
        case 6: call("POST", "/api/judgments", token, "{not json"); break;
        case 7: {
          nlohmann::json body{{"question_id", qid}, {"verdicts", nlohmann::json::object()}};
          static const char* kVerdicts[] = {"A", "tie", "B"};
          static const char* kDims[] = {"factuality", "completeness", "readability",
                                        "relevance"};
          for (const char* d : kDims) body["verdicts"][d] = kVerdicts[rng() % 3];
          if (rng() % 5 == 0) body["verdicts"].erase("readability");
          if (call("POST", "/api/judgments", token, body.dump()).status == 201) ++stats.judgments;
          break;
        }
        default: call("DELETE", "/api/pending", token, ""); break;
      }
    }
    ++stats.sessions;
  }
  return stats;
}

}  // namespace umlsqa::testing

#endif  // UMLSQA_TESTS_BLINDING_SESSIONS_H_
