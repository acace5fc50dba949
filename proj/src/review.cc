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

#include "umlsqa/review.h"

#include <fmt/format.h>
#include <openssl/rand.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <mutex>
#include <random>
#include <sstream>

#include "umlsqa/error.h"
#include "umlsqa/util.h"

namespace umlsqa {
namespace {

constexpr std::string_view kReviewSetFile = "review_set.json";
constexpr std::string_view kJudgmentsFile = "judgments.jsonl";
constexpr std::string_view kAuditFile = "audit.jsonl";
constexpr std::string_view kReviewersFile = "reviewers.json";

std::string RandomToken() {
  unsigned char bytes[16];
  if (RAND_bytes(bytes, sizeof(bytes)) != 1) throw Error("RAND_bytes failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned char b : bytes) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xF]);
  }
  return out;
}

void AppendLine(const std::filesystem::path& path, const std::string& line) {
  std::ofstream out(path, std::ios::app | std::ios::binary);
  out << line << '\n' << std::flush;
  if (!out) throw StorageError("cannot append to " + path.string());
}

Outcome Deblind(Verdict v, SlotAssignment a) {
  if (v == Verdict::kTie) return Outcome::kTie;
  const bool a_wins = v == Verdict::kSlotA;
  const bool augmented_in_a = a == SlotAssignment::kAugmentedInA;
  return a_wins == augmented_in_a ? Outcome::kAugmented : Outcome::kBaseline;
}

bool Complete(const Judgment& j) {
  return std::all_of(kAllDimensions.begin(), kAllDimensions.end(),
                     [&](Dimension d) { return j.verdicts.count(d) > 0; });
}

}  // namespace

std::string_view ToString(Dimension d) {
  switch (d) {
    case Dimension::kFactuality: return "factuality";
    case Dimension::kCompleteness: return "completeness";
    case Dimension::kReadability: return "readability";
    case Dimension::kRelevance: return "relevance";
  }
  return "";
}

std::string_view DisplayName(Dimension d) {
  switch (d) {
    case Dimension::kFactuality: return "Factuality";
    case Dimension::kCompleteness: return "Completeness";
    case Dimension::kReadability: return "Readability";
    case Dimension::kRelevance: return "Relevance";
  }
  return "";
}

std::string_view CriterionDescription(Dimension d) {
  switch (d) {
    case Dimension::kFactuality:
      return "The degree to which the generated text aligns with established "
             "medical facts, providing accurate explanations for further "
             "verification.";
    case Dimension::kCompleteness:
      return "The degree to which the generated text comprehensively portrays "
             "the clinical scenario or posed question, including other "
             "pertinent considerations.";
    case Dimension::kReadability:
      return "The extent to which the generated text is readily comprehensible "
             "to the user, incorporating suitable language and structure to "
             "facilitate accessibility.";
    case Dimension::kRelevance:
      return "The extent to which the generated text directly addresses medical "
             "questions while encompassing a comprehensive range of pertinent "
             "information.";
  }
  return "";
}

Dimension ParseDimension(std::string_view name) {
  const std::string n = ToLowerAscii(name);
  for (Dimension d : kAllDimensions) {
    if (n == ToString(d)) return d;
  }
  if (n == "relevancy") return Dimension::kRelevance;
  throw ValidationError("unknown dimension '" + std::string(name) + "'");
}

std::string_view ToString(Verdict v) {
  switch (v) {
    case Verdict::kSlotA: return "A";
    case Verdict::kTie: return "tie";
    case Verdict::kSlotB: return "B";
  }
  return "";
}

Verdict ParseVerdict(std::string_view v) {
  const std::string n = ToLowerAscii(v);
  if (n == "a") return Verdict::kSlotA;
  if (n == "b") return Verdict::kSlotB;
  if (n == "tie") return Verdict::kTie;
  throw ValidationError("verdict must be \"A\", \"tie\" or \"B\"");
}

nlohmann::json ReviewerPayload(const BlindedPair& pair) {
  return {{"question_id", pair.question_id},
          {"question_text", pair.question_text},
          {"slot_a", pair.slot_a_text},
          {"slot_b", pair.slot_b_text}};
}

std::vector<BlindedPair> AssignBlinding(std::span<const PairInput> pairs,
                                        std::uint64_t seed) {
  for (const auto& p : pairs) {
    if (Trim(p.baseline_answer).empty() || Trim(p.augmented_answer).empty()) {
      throw ValidationError("question " + p.question_id + " has an empty answer");
    }
  }
  std::mt19937_64 gen(seed);
  std::vector<BlindedPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    // Top bit of each draw.
    const bool augmented_in_a = (gen() >> 63) != 0;
    BlindedPair b;
    b.question_id = p.question_id;
    b.question_text = p.question_text;
    b.hidden_assignment =
        augmented_in_a ? SlotAssignment::kAugmentedInA : SlotAssignment::kBaselineInA;
    b.slot_a_text = augmented_in_a ? p.augmented_answer : p.baseline_answer;
    b.slot_b_text = augmented_in_a ? p.baseline_answer : p.augmented_answer;
    out.push_back(std::move(b));
  }
  return out;
}

nlohmann::json ToJson(const Judgment& j) {
  nlohmann::json verdicts = nlohmann::json::object();
  for (const auto& [d, v] : j.verdicts) verdicts[std::string(ToString(d))] = ToString(v);
  return {{"reviewer_id", j.reviewer_id},
          {"question_id", j.question_id},
          {"verdicts", std::move(verdicts)},
          {"submitted_at", j.submitted_at}};
}

Judgment JudgmentFromJson(const nlohmann::json& j) {
  Judgment out;
  try {
    out.reviewer_id = j.value("reviewer_id", std::string());
    out.question_id = j.at("question_id").get<std::string>();
    for (const auto& [k, v] : j.at("verdicts").items()) {
      out.verdicts[ParseDimension(k)] = ParseVerdict(v.get<std::string>());
    }
    out.submitted_at = j.value("submitted_at", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("judgment: ") + e.what(), j.dump());
  }
  return out;
}

std::vector<FieldError> ValidateSubmission(const nlohmann::json& j) {
  std::vector<FieldError> errors;
  if (!j.is_object()) return {{"", "body must be a JSON object"}};
  if (!j.contains("question_id") || !j["question_id"].is_string() ||
      j["question_id"].get<std::string>().empty()) {
    errors.push_back({"question_id", "required non-empty string"});
  }
  if (!j.contains("verdicts") || !j["verdicts"].is_object()) {
    errors.push_back({"verdicts", "required object"});
    return errors;
  }
  std::map<Dimension, int> seen;
  for (const auto& [k, v] : j["verdicts"].items()) {
    Dimension d;
    try {
      d = ParseDimension(k);
    } catch (const ValidationError&) {
      errors.push_back({"verdicts." + k, "unknown dimension"});
      continue;
    }
    if (++seen[d] > 1) {
      errors.push_back({"verdicts." + k, "dimension given more than once"});
    }
    if (!v.is_string()) {
      errors.push_back({"verdicts." + k, "verdict must be \"A\", \"tie\" or \"B\""});
      continue;
    }
    try {
      ParseVerdict(v.get<std::string>());
    } catch (const ValidationError& e) {
      errors.push_back({"verdicts." + k, e.what()});
    }
  }
  for (Dimension d : kAllDimensions) {
    if (!seen.count(d)) {
      errors.push_back({"verdicts." + std::string(ToString(d)),
                        "missing verdict for " + std::string(DisplayName(d))});
    }
  }
  return errors;
}

std::array<int, 3> LargestRemainderPercent(const std::array<size_t, 3>& counts) {
  const size_t total = counts[0] + counts[1] + counts[2];
  std::array<int, 3> pct{};
  if (total == 0) return pct;
  std::array<size_t, 3> remainder{};
  int assigned = 0;
  for (size_t i = 0; i < 3; ++i) {
    pct[i] = static_cast<int>(counts[i] * 100 / total);
    remainder[i] = counts[i] * 100 % total;
    assigned += pct[i];
  }
  std::array<size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return remainder[a] > remainder[b]; });
  for (size_t k = 0; assigned < 100; ++k, ++assigned) ++pct[order[k % 3]];
  return pct;
}

WinRateSummary ComputeWinRates(
    std::span<const Judgment> judgments,
    const std::map<std::string, SlotAssignment>& assignments) {
  // question -> dimension -> votes per outcome
  std::map<std::string, std::map<Dimension, std::array<size_t, 3>>> votes;
  for (const auto& j : judgments) {
    const auto it = assignments.find(j.question_id);
    if (it == assignments.end()) {
      throw ConsistencyError("judgment for " + j.question_id +
                             " has no persisted assignment");
    }
    if (!Complete(j)) continue;
    auto& q = votes[j.question_id];
    for (const auto& [d, v] : j.verdicts) {
      ++q[d][static_cast<size_t>(Deblind(v, it->second))];
    }
  }

  WinRateSummary s;
  s.questions = votes.size();
  for (Dimension d : kAllDimensions) {
    DimensionRates rates;
    for (auto& [qid, dims] : votes) {
      const auto& v = dims[d];
      const size_t top = std::max({v[0], v[1], v[2]});
      const auto winners = std::count(v.begin(), v.end(), top);
      const size_t outcome =
          winners > 1 ? static_cast<size_t>(Outcome::kTie)
                      : static_cast<size_t>(std::find(v.begin(), v.end(), top) - v.begin());
      ++rates.counts[outcome];
    }
    for (size_t i = 0; i < 3 && s.questions > 0; ++i) {
      rates.exact_pct[i] = 100.0 * static_cast<double>(rates.counts[i]) /
                           static_cast<double>(s.questions);
    }
    rates.pct = LargestRemainderPercent(rates.counts);
    s.dimensions[d] = rates;
  }
  return s;
}

nlohmann::json WinRateSummary::ToJson() const {
  nlohmann::json dims = nlohmann::json::object();
  for (const auto& [d, r] : dimensions) {
    dims[std::string(ToString(d))] = {
        {"augmented", {{"count", r.counts[0]}, {"pct", r.pct[0]}, {"exact_pct", r.exact_pct[0]}}},
        {"tie", {{"count", r.counts[1]}, {"pct", r.pct[1]}, {"exact_pct", r.exact_pct[1]}}},
        {"baseline", {{"count", r.counts[2]}, {"pct", r.pct[2]}, {"exact_pct", r.exact_pct[2]}}}};
  }
  return {{"questions", questions}, {"dimensions", std::move(dims)}};
}

std::string WinRateSummary::ToTable() const {
  std::string out = fmt::format("{:<14}{:>11}{:>7}{:>10}\n", "dimension",
                                "augmented", "tie", "baseline");
  for (const auto& [d, r] : dimensions) {
    out += fmt::format("{:<14}{:>11}{:>7}{:>10}\n", DisplayName(d), r.pct[0],
                       r.pct[1], r.pct[2]);
  }
  out += fmt::format("({} question(s))\n", questions);
  return out;
}

nlohmann::json ToJson(const ReviewSet& set) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : set.pairs) {
    pairs.push_back({{"question_id", p.question_id},
                     {"question_text", p.question_text},
                     {"slot_a", p.slot_a_text},
                     {"slot_b", p.slot_b_text},
                     {"assignment", p.hidden_assignment == SlotAssignment::kAugmentedInA
                                        ? "augmented_in_a"
                                        : "baseline_in_a"}});
  }
  return {{"baseline_label", set.baseline_label},
          {"augmented_label", set.augmented_label},
          {"seed", set.seed},
          {"pairs", std::move(pairs)}};
}

ReviewSet ReviewSetFromJson(const nlohmann::json& j) {
  ReviewSet set;
  try {
    set.baseline_label = j.at("baseline_label").get<std::string>();
    set.augmented_label = j.at("augmented_label").get<std::string>();
    set.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& p : j.at("pairs")) {
      BlindedPair b;
      b.question_id = p.at("question_id").get<std::string>();
      b.question_text = p.at("question_text").get<std::string>();
      b.slot_a_text = p.at("slot_a").get<std::string>();
      b.slot_b_text = p.at("slot_b").get<std::string>();
      const std::string a = p.at("assignment").get<std::string>();
      if (a != "augmented_in_a" && a != "baseline_in_a") {
        throw ParseError("bad assignment '" + a + "' for " + b.question_id);
      }
      b.hidden_assignment = a == "augmented_in_a" ? SlotAssignment::kAugmentedInA
                                                  : SlotAssignment::kBaselineInA;
      set.pairs.push_back(std::move(b));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("review set: ") + e.what());
  }
  return set;
}

// --- ReviewStore ------------------------------------------------------------

void ReviewStore::Create(const std::filesystem::path& dir, const ReviewSet& set) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw StorageError("cannot create " + dir.string());
  if (std::filesystem::exists(dir / kReviewSetFile)) {
    throw StorageError(dir.string() + " already holds a review set");
  }
  WriteFileAtomic(dir / kReviewSetFile, ToJson(set).dump(2) + "\n");
  WriteFileAtomic(dir / kJudgmentsFile, "");
  WriteFileAtomic(dir / kAuditFile, "");
}

ReviewStore::ReviewStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  const auto j = nlohmann::json::parse(ReadFile(dir_ / kReviewSetFile), nullptr, false);
  if (j.is_discarded()) throw ParseError("malformed " + (dir_ / kReviewSetFile).string());
  set_ = ReviewSetFromJson(j);

  const auto path = dir_ / kJudgmentsFile;
  if (std::filesystem::exists(path)) {
    std::istringstream in(ReadFile(path));
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
      if (!Trim(line).empty()) lines.push_back(line);
    }
    for (size_t i = 0; i < lines.size(); ++i) {
      const auto jl = nlohmann::json::parse(lines[i], nullptr, false);
      if (jl.is_discarded()) {
        if (i + 1 == lines.size()) {
          spdlog::warn("{}: dropping truncated final judgment", path.string());
          break;
        }
        throw ParseError(path.string() + ":" + std::to_string(i + 1) +
                         ": malformed judgment");
      }
      Judgment jg = JudgmentFromJson(jl);
      latest_.insert_or_assign({jg.reviewer_id, jg.question_id}, std::move(jg));
    }
  }
  LoadTokens();
}

void ReviewStore::LoadTokens() {
  const auto path = dir_ / kReviewersFile;
  if (!std::filesystem::exists(path)) return;
  const auto j = nlohmann::json::parse(ReadFile(path), nullptr, false);
  if (j.is_discarded()) throw ParseError("malformed " + path.string());
  admin_token_ = j.value("admin_token", std::string());
  for (const auto& r : j.value("reviewers", nlohmann::json::array())) {
    reviewer_tokens_[r.at("token").get<std::string>()] = r.at("id").get<std::string>();
  }
}

void ReviewStore::SaveTokens() const {
  nlohmann::json reviewers = nlohmann::json::array();
  std::vector<std::pair<std::string, std::string>> by_id;
  for (const auto& [token, id] : reviewer_tokens_) by_id.emplace_back(id, token);
  std::sort(by_id.begin(), by_id.end());
  for (const auto& [id, token] : by_id) reviewers.push_back({{"id", id}, {"token", token}});
  const auto path = dir_ / kReviewersFile;
  WriteFileAtomic(path, nlohmann::json{{"admin_token", admin_token_},
                                       {"reviewers", std::move(reviewers)}}
                                .dump(2) + "\n",
                  std::filesystem::perms::owner_read | std::filesystem::perms::owner_write);
}

std::vector<std::string> ReviewStore::IssueReviewers(size_t count) {
  std::unique_lock lock(mu_);
  if (admin_token_.empty()) admin_token_ = RandomToken();
  std::vector<std::string> ids;
  for (size_t i = 0; i < count; ++i) {
    std::string id = "reviewer-" + std::to_string(reviewer_tokens_.size() + 1);
    reviewer_tokens_[RandomToken()] = id;
    ids.push_back(std::move(id));
  }
  SaveTokens();
  return ids;
}

std::optional<std::string> ReviewStore::ReviewerForToken(std::string_view token) const {
  std::shared_lock lock(mu_);
  const auto it = reviewer_tokens_.find(std::string(token));
  if (it == reviewer_tokens_.end()) return std::nullopt;
  return it->second;
}

bool ReviewStore::IsAdminToken(std::string_view token) const {
  std::shared_lock lock(mu_);
  return !admin_token_.empty() && token == admin_token_;
}

const BlindedPair* ReviewStore::Find(std::string_view question_id) const {
  for (const auto& p : set_.pairs) {
    if (p.question_id == question_id) return &p;
  }
  return nullptr;
}

RecordResult ReviewStore::Record(Judgment judgment) {
  std::vector<std::string> missing;
  for (Dimension d : kAllDimensions) {
    if (!judgment.verdicts.count(d)) missing.emplace_back(DisplayName(d));
  }
  if (!missing.empty()) {
    std::string msg = "judgment is missing:";
    for (const auto& m : missing) msg += " " + m;
    throw ValidationError(msg);
  }
  if (judgment.reviewer_id.empty()) throw ValidationError("judgment needs a reviewer_id");
  if (Find(judgment.question_id) == nullptr) {
    throw NotFoundError("question " + judgment.question_id + " is not in the review set");
  }
  if (judgment.submitted_at.empty()) judgment.submitted_at = NowIso8601();

  std::unique_lock lock(mu_);
  const auto key = std::make_pair(judgment.reviewer_id, judgment.question_id);
  RecordResult result;
  result.replaced = latest_.count(key) > 0;
  AppendLine(dir_ / kJudgmentsFile, ToJson(judgment).dump());
  AppendLine(dir_ / kAuditFile,
             nlohmann::json{{"at", judgment.submitted_at},
                            {"reviewer_id", judgment.reviewer_id},
                            {"question_id", judgment.question_id},
                            {"action", result.replaced ? "overwrite" : "submit"}}
                 .dump());
  latest_.insert_or_assign(key, std::move(judgment));
  size_t done = 0;
  for (const auto& [k, j] : latest_) done += k.first == key.first;
  result.progress = {done, set_.pairs.size()};
  return result;
}

Progress ReviewStore::ProgressFor(std::string_view reviewer_id) const {
  std::shared_lock lock(mu_);
  size_t done = 0;
  for (const auto& [k, j] : latest_) done += k.first == reviewer_id;
  return {done, set_.pairs.size()};
}

std::vector<std::string> ReviewStore::PendingFor(std::string_view reviewer_id) const {
  std::shared_lock lock(mu_);
  std::vector<std::string> out;
  for (const auto& p : set_.pairs) {
    if (!latest_.count({std::string(reviewer_id), p.question_id})) {
      out.push_back(p.question_id);
    }
  }
  return out;
}

std::vector<Judgment> ReviewStore::Judgments() const {
  std::shared_lock lock(mu_);
  std::vector<Judgment> out;
  for (const auto& [k, j] : latest_) out.push_back(j);
  return out;
}

std::map<std::string, SlotAssignment> ReviewStore::Assignments() const {
  std::map<std::string, SlotAssignment> out;
  for (const auto& p : set_.pairs) out[p.question_id] = p.hidden_assignment;
  return out;
}

WinRateSummary ReviewStore::Summary() const {
  const auto judgments = Judgments();
  return ComputeWinRates(judgments, Assignments());
}

}  // namespace umlsqa
