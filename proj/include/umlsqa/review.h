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

// Blind pairwise review of two systems' answers.
//
// System 1 is the baseline, system 2 the augmented system. Reviewers only
// ever see "slot A" and "slot B"; which system sits in which slot is drawn
// per question from a seeded generator and kept server-side.

#ifndef UMLSQA_REVIEW_H_
#define UMLSQA_REVIEW_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace umlsqa {

enum class Dimension { kFactuality, kCompleteness, kReadability, kRelevance };

inline constexpr std::array<Dimension, 4> kAllDimensions = {
    Dimension::kFactuality, Dimension::kCompleteness, Dimension::kReadability,
    Dimension::kRelevance};

// Wire key: "factuality" | "completeness" | "readability" | "relevance".
std::string_view ToString(Dimension d);
std::string_view DisplayName(Dimension d);
// The reviewer-facing description of the criterion.
std::string_view CriterionDescription(Dimension d);
// Accepts the wire key, the display name, and "relevancy".
Dimension ParseDimension(std::string_view name);

enum class Verdict { kSlotA, kTie, kSlotB };
std::string_view ToString(Verdict v);  // "A" | "tie" | "B"
Verdict ParseVerdict(std::string_view v);

enum class SlotAssignment { kBaselineInA, kAugmentedInA };

struct PairInput {
  std::string question_id;
  std::string question_text;
  std::string baseline_answer;
  std::string augmented_answer;
};

struct BlindedPair {
  std::string question_id;
  std::string question_text;
  std::string slot_a_text;
  std::string slot_b_text;
  SlotAssignment hidden_assignment = SlotAssignment::kBaselineInA;

  bool operator==(const BlindedPair&) const = default;
};

// What a reviewer receives: question and the two slot texts, nothing else.
nlohmann::json ReviewerPayload(const BlindedPair& pair);

// One fair coin per question, in input order, from a seeded 64-bit Mersenne
// Twister. Throws ValidationError naming the question if an answer is empty.
std::vector<BlindedPair> AssignBlinding(std::span<const PairInput> pairs,
                                        std::uint64_t seed);

struct Judgment {
  std::string reviewer_id;
  std::string question_id;
  std::map<Dimension, Verdict> verdicts;
  std::string submitted_at;
};

nlohmann::json ToJson(const Judgment& j);
Judgment JudgmentFromJson(const nlohmann::json& j);

struct FieldError {
  std::string field;
  std::string message;
};

// Empty when `j` is a well-formed submission body:
//   {"question_id": "...", "verdicts": {"factuality": "A", ...}}
// Every dimension must appear exactly once.
std::vector<FieldError> ValidateSubmission(const nlohmann::json& j);

enum class Outcome { kAugmented, kTie, kBaseline };

struct DimensionRates {
  // augmented, tie, baseline
  std::array<size_t, 3> counts{};
  std::array<double, 3> exact_pct{};
  // Largest-remainder rounding: always sums to 100.
  std::array<int, 3> pct{};
};

struct WinRateSummary {
  size_t questions = 0;
  std::map<Dimension, DimensionRates> dimensions;

  nlohmann::json ToJson() const;
  // Rows per dimension, columns augmented / tie / baseline, ready for a
  // stacked bar chart.
  std::string ToTable() const;
};

// Integer percentages of `counts` that sum to exactly 100; leftover points go
// to the largest fractional parts, earlier entries first on ties.
std::array<int, 3> LargestRemainderPercent(const std::array<size_t, 3>& counts);

// De-blinds every verdict, then per question and dimension takes the majority
// outcome across reviewers; a tie in votes counts as Tie. Percentages are over
// questions with at least one complete judgment; incomplete judgments are
// ignored. Throws ConsistencyError for a judgment whose question has no
// assignment.
WinRateSummary ComputeWinRates(
    std::span<const Judgment> judgments,
    const std::map<std::string, SlotAssignment>& assignments);

struct ReviewSet {
  std::string baseline_label;
  std::string augmented_label;
  std::uint64_t seed = 0;
  std::vector<BlindedPair> pairs;
};

struct Progress {
  size_t completed = 0;
  size_t total = 0;
};

struct RecordResult {
  bool replaced = false;
  Progress progress;
};

// On-disk layout under one directory:
//   review_set.json   pairs with their hidden assignments (server-side only)
//   judgments.jsonl   append-only; the last line per (reviewer, question) wins
//   audit.jsonl       one line per submission, marking overwrites
//   reviewers.json    reviewer and admin tokens (mode 0600)
//
// Thread-safe: writers are exclusive, readers share a consistent snapshot.
class ReviewStore {
 public:
  static void Create(const std::filesystem::path& dir, const ReviewSet& set);
  explicit ReviewStore(std::filesystem::path dir);

  // Appends `count` reviewers with fresh random tokens; returns their ids.
  std::vector<std::string> IssueReviewers(size_t count);
  std::optional<std::string> ReviewerForToken(std::string_view token) const;
  bool IsAdminToken(std::string_view token) const;

  const ReviewSet& review_set() const { return set_; }
  const BlindedPair* Find(std::string_view question_id) const;

  // Throws ValidationError (listing missing dimensions) or NotFoundError.
  RecordResult Record(Judgment judgment);

  Progress ProgressFor(std::string_view reviewer_id) const;
  // Review-set order, minus questions this reviewer already judged.
  std::vector<std::string> PendingFor(std::string_view reviewer_id) const;
  std::vector<Judgment> Judgments() const;
  std::map<std::string, SlotAssignment> Assignments() const;
  WinRateSummary Summary() const;

 private:
  void LoadTokens();
  void SaveTokens() const;

  std::filesystem::path dir_;
  ReviewSet set_;
  mutable std::shared_mutex mu_;
  // (reviewer, question) -> latest judgment
  std::map<std::pair<std::string, std::string>, Judgment> latest_;
  std::map<std::string, std::string> reviewer_tokens_;  // token -> reviewer id
  std::string admin_token_;
};

nlohmann::json ToJson(const ReviewSet& set);
ReviewSet ReviewSetFromJson(const nlohmann::json& j);

}  // namespace umlsqa

#endif  // UMLSQA_REVIEW_H_
