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

#include "cli.h"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <csignal>
#include <fstream>
#include <map>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "umlsqa/cache.h"
#include "umlsqa/config.h"
#include "umlsqa/dataset.h"
#include "umlsqa/error.h"
#include "umlsqa/metrics.h"
#include "umlsqa/pipeline.h"
#include "umlsqa/review.h"
#include "umlsqa/review_api.h"
#include "umlsqa/umls.h"
#include "umlsqa/util.h"

namespace umlsqa::cli {
namespace {

namespace fs = std::filesystem;

// Stands in for the UMLS client when no configured system augments.
class UnavailableUmlsClient : public UmlsClient {
 public:
  std::string Fetch(const UmlsQuery&) override {
    throw ProviderError("no UMLS client configured");
  }
  std::string Identifier() const override { return "none"; }
};

struct CommonFlags {
  std::optional<std::string> config;
  std::optional<std::string> cache_dir;
  std::optional<std::string> umls_fixtures;
  std::optional<std::string> umls_base_url;
  std::optional<std::string> llm_base_url;
  std::optional<long long> workers;
  std::optional<long long> relation_cap;
};

Settings LoadSettings(const CommonFlags& f) {
  Settings s = f.config ? Settings::FromFile(*f.config) : Settings();
  if (f.cache_dir) s.SetFlag("cache_dir", *f.cache_dir);
  if (f.umls_fixtures) s.SetFlag("umls.fixtures", *f.umls_fixtures);
  if (f.umls_base_url) s.SetFlag("umls.base_url", *f.umls_base_url);
  if (f.llm_base_url) s.SetFlag("llm.base_url", *f.llm_base_url);
  if (f.workers) s.SetFlag("workers", std::to_string(*f.workers));
  if (f.relation_cap) s.SetFlag("relation_cap", std::to_string(*f.relation_cap));
  return s;
}

std::string FlagsDigestInput(const CommonFlags& f) {
  nlohmann::json j = nlohmann::json::object();
  if (f.umls_fixtures) j["umls_fixtures"] = *f.umls_fixtures;
  if (f.umls_base_url) j["umls_base_url"] = *f.umls_base_url;
  if (f.llm_base_url) j["llm_base_url"] = *f.llm_base_url;
  if (f.relation_cap) j["relation_cap"] = *f.relation_cap;
  return j.dump();
}

void AddCommonFlags(CLI::App* app, CommonFlags& f, bool with_llm) {
  app->add_option("--config", f.config, "JSON run configuration");
  app->add_option("--cache-dir", f.cache_dir, "UMLS response cache directory");
  app->add_option("--umls-fixtures", f.umls_fixtures, "replay UMLS responses from fixtures");
  app->add_option("--umls-base-url", f.umls_base_url, "UMLS REST base URL");
  app->add_option("--relation-cap", f.relation_cap, "max relations per concept")
      ->check(CLI::PositiveNumber);
  if (with_llm) {
    app->add_option("--llm-base-url", f.llm_base_url, "chat-completion base URL");
    app->add_option("--workers", f.workers, "concurrent questions")->check(CLI::PositiveNumber);
  }
}

// Owns the UMLS client stack: raw -> counting -> optional cache.
struct UmlsStack {
  std::unique_ptr<UmlsClient> raw;
  std::unique_ptr<CountingUmlsClient> counting;
  std::unique_ptr<CacheStore> cache;
  std::unique_ptr<CachingUmlsClient> caching;

  UmlsClient& client() {
    if (caching) return *caching;
    return *counting;
  }
};

UmlsStack MakeUmlsStack(const Settings& s, bool needed) {
  UmlsStack st;
  st.raw = needed ? MakeUmlsClient(s, "umls") : std::make_unique<UnavailableUmlsClient>();
  st.counting = std::make_unique<CountingUmlsClient>(*st.raw);
  if (auto dir = s.Path("cache_dir"); dir && needed) {
    st.cache = std::make_unique<CacheStore>(*dir);
    st.caching = std::make_unique<CachingUmlsClient>(*st.counting, *st.cache);
  }
  return st;
}

Corpus LoadCorpusArg(const std::string& path, const std::string& format) {
  return LoadCorpus(path, ParseCorpusFormat(format));
}

// --- dataset ----------------------------------------------------------------

struct DatasetConvertArgs {
  std::string input, output, from = "trec-xml", source_tag = "liveqa-test";
};

int DatasetConvert(const DatasetConvertArgs& a, std::ostream& out) {
  const Corpus c = LoadCorpus(a.input, ParseCorpusFormat(a.from), a.source_tag);
  SaveCorpus(c, a.output);
  out << "wrote " << c.records.size() << " record(s) to " << a.output << "\n";
  return kOk;
}

struct DatasetSubsetArgs {
  std::string corpus, ids_file, output, format = "normalized-jsonl", suffix = "subset";
};

int DatasetSubset(const DatasetSubsetArgs& a, std::ostream& out) {
  const Corpus c = LoadCorpusArg(a.corpus, a.format);
  const auto ids = ReadIdManifest(a.ids_file);
  const Corpus sub = SelectSubset(c, ids, a.suffix);
  SaveCorpus(sub, a.output);
  out << "wrote " << sub.records.size() << " record(s) to " << a.output << "\n";
  return kOk;
}

// --- umls -------------------------------------------------------------------

int UmlsLink(const CommonFlags& f, const std::string& term, std::ostream& out) {
  const Settings s = LoadSettings(f);
  UmlsStack st = MakeUmlsStack(s, true);
  const auto link = LinkConcept(term, st.client());
  nlohmann::json j{{"term", term}, {"cui", nullptr}, {"preferred_name", nullptr}};
  if (link) {
    j["cui"] = link->cui;
    j["preferred_name"] = link->preferred_name;
  }
  out << j.dump(2) << "\n";
  return kOk;
}

int UmlsConcept(const CommonFlags& f, const std::string& cui, std::ostream& out) {
  if (!IsValidCui(cui)) throw ValidationError("malformed CUI '" + cui + "'");
  const Settings s = LoadSettings(f);
  UmlsStack st = MakeUmlsStack(s, true);
  const int cap = static_cast<int>(s.Int("relation_cap").value_or(kDefaultRelationCap));
  // The preferred name comes from a search on the CUI itself.
  const auto link = LinkConcept(cui, st.client());
  const ConceptLink l{cui, link && link->cui == cui ? link->preferred_name : ""};
  out << ToJson(FetchConcept(l, st.client(), cap)).dump(2) << "\n";
  return kOk;
}

int UmlsRecordFixtures(const CommonFlags& f, const std::string& terms_file,
                       const std::string& out_dir, std::ostream& out) {
  const Settings s = LoadSettings(f);
  auto raw = MakeUmlsClient(s, "umls");
  RecordingUmlsClient recorder(*raw, out_dir);
  const int cap = static_cast<int>(s.Int("relation_cap").value_or(kDefaultRelationCap));
  size_t linked = 0, terms = 0;
  for (const auto& term : ReadIdManifest(terms_file)) {
    ++terms;
    const auto link = LinkConcept(term, recorder);
    if (!link) continue;
    ++linked;
    FetchConcept(*link, recorder, cap);
  }
  out << "recorded " << terms << " term(s), " << linked << " linked, into " << out_dir << "\n";
  return kOk;
}

// --- pipeline ---------------------------------------------------------------

struct PipelineArgs {
  CommonFlags common;
  std::string corpus;
  std::string format = "normalized-jsonl";
  std::optional<std::string> out;
  std::optional<std::string> ids_file;
  std::optional<std::string> subset;
  std::optional<std::string> question_id;
  std::optional<std::string> system;
};

struct PreparedRun {
  Settings settings;
  Corpus corpus;
  std::vector<SystemConfig> systems;
  std::unique_ptr<ChatProvider> llm;
  std::unique_ptr<ChatProvider> extractor;
  UmlsStack umls;
  PipelineOptions options;
};

PreparedRun Prepare(const PipelineArgs& a) {
  if (!a.common.config) throw ValidationError("--config is required");
  PreparedRun r{LoadSettings(a.common), {}, {}, nullptr, nullptr, {}, {}};
  const Settings& s = r.settings;
  r.corpus = LoadCorpusArg(a.corpus, a.format);
  std::optional<fs::path> ids = a.ids_file ? std::optional<fs::path>(*a.ids_file) : std::nullopt;
  if (!ids && a.subset) {
    ids = s.Path("subsets." + *a.subset);
    if (!ids) throw ValidationError("config has no subset '" + *a.subset + "'");
  }
  if (ids) r.corpus = SelectSubset(r.corpus, ReadIdManifest(*ids), a.subset.value_or("subset"));

  r.systems = SystemsFromSettings(s, a.common.relation_cap);
  if (a.system) {
    std::erase_if(r.systems, [&](const SystemConfig& c) { return c.Name() != *a.system; });
    if (r.systems.empty()) throw ValidationError("no system named " + *a.system);
  }
  const bool needs_umls = std::any_of(r.systems.begin(), r.systems.end(), [](const auto& c) {
    return c.augmentation != Augmentation::kNone;
  });
  r.llm = MakeChatProvider(s, "llm");
  if (s.Node("extractor").is_object()) r.extractor = MakeChatProvider(s, "extractor");
  r.umls = MakeUmlsStack(s, needs_umls);

  r.options.workers = static_cast<int>(s.Int("workers").value_or(4));
  r.options.extraction.retry_budget = static_cast<int>(s.Int("extraction_retries").value_or(2));
  r.options.concept_char_budget =
      static_cast<size_t>(s.Int("concept_char_budget").value_or(4000));
  if (const auto& src = s.Node("definition_sources"); src.is_array()) {
    r.options.definitions.source_priority = src.get<std::vector<std::string>>();
  }
  return r;
}

nlohmann::json Manifest(const PipelineArgs& a, const PreparedRun& r, const std::string& run_id,
                        const std::string& config_digest, const std::string& corpus_digest) {
  nlohmann::json systems = nlohmann::json::array();
  nlohmann::json seeds = nlohmann::json::object();
  for (const auto& c : r.systems) {
    systems.push_back(ToJson(c));
    seeds[c.Name()] = c.generation.seed ? nlohmann::json(*c.generation.seed) : nullptr;
  }
  return {{"run_id", run_id},
          {"config_digest", config_digest},
          {"corpus_digest", corpus_digest},
          {"corpus", r.corpus.name},
          {"records", r.corpus.records.size()},
          {"systems", std::move(systems)},
          {"seeds", std::move(seeds)},
          {"providers",
           {{"llm", r.llm->Identifier()},
            {"extractor", (r.extractor ? r.extractor : r.llm)->Identifier()},
            {"umls", r.umls.raw->Identifier()}}},
          {"outputs", {{"answers", *a.out}}},
          {"status", "running"},
          {"started_at", NowIso8601()},
          {"finished_at", nullptr}};
}

int PipelineRun(const PipelineArgs& a, std::ostream& out) {
  if (!a.out) throw ValidationError("--out is required");
  PreparedRun r = Prepare(a);
  const std::string config_digest =
      Sha256Hex(ReadFile(*a.common.config) + FlagsDigestInput(a.common));
  const std::string corpus_digest = Sha256Hex(SerializeCorpus(r.corpus));
  nlohmann::json systems = nlohmann::json::array();
  for (const auto& c : r.systems) systems.push_back(ToJson(c));
  const std::string run_id =
      Sha256Hex(config_digest + corpus_digest + systems.dump()).substr(0, 16);
  r.options.run_id = run_id;

  const fs::path answers(*a.out);
  const fs::path manifest_path = answers.string() + ".manifest.json";
  nlohmann::json manifest = Manifest(a, r, run_id, config_digest, corpus_digest);
  WriteFileAtomic(manifest_path, manifest.dump(2) + "\n");

  const Providers providers{r.extractor ? *r.extractor : *r.llm, *r.llm, r.umls.client()};
  auto finish = [&](const std::string& status, const ExperimentResult* result) {
    manifest["status"] = status;
    manifest["finished_at"] = NowIso8601();
    manifest["umls_provider_calls"] = r.umls.counting->calls();
    if (result) {
      manifest["counts"] = {{"generated", result->generated},
                            {"resumed", result->resumed},
                            {"failed", result->failures.size()},
                            {"answers", result->answers.size()}};
      nlohmann::json failures = nlohmann::json::array();
      for (const auto& fl : result->failures) {
        failures.push_back(
            {{"question_id", fl.question_id}, {"config", fl.config_name}, {"error", fl.message}});
      }
      manifest["failures"] = std::move(failures);
    }
    WriteFileAtomic(manifest_path, manifest.dump(2) + "\n");
  };
  ExperimentResult result;
  try {
    result = RunExperiment(r.corpus, r.systems, providers, r.options, answers);
  } catch (const std::exception& e) {
    manifest["error"] = e.what();
    finish("failed", nullptr);
    throw;
  }
  finish(result.failures.empty() ? "complete" : "partial", &result);
  out << "answers: " << result.answers.size() << " (generated " << result.generated
      << ", resumed " << result.resumed << ", failed " << result.failures.size() << ") -> "
      << answers.string() << "\n";
  out << "manifest: " << manifest_path.string() << "\n";
  return kOk;
}

int PipelineAnswer(const PipelineArgs& a, std::ostream& out) {
  if (!a.question_id) throw ValidationError("--question-id is required");
  PreparedRun r = Prepare(a);
  const QARecord* rec = r.corpus.Find(*a.question_id);
  if (rec == nullptr) {
    throw DatasetError("unknown question id " + *a.question_id, {*a.question_id});
  }
  const Providers providers{r.extractor ? *r.extractor : *r.llm, *r.llm, r.umls.client()};
  for (const auto& c : r.systems) {
    out << ToJson(AnswerQuestion(*rec, c, providers, r.options)).dump() << "\n";
  }
  return kOk;
}

// --- metrics ----------------------------------------------------------------

struct MetricsArgs {
  std::optional<std::string> config;
  std::string answers, corpus, format = "normalized-jsonl";
  std::optional<std::string> out;
  std::optional<std::string> embedder;
  std::optional<std::string> embedder_url;
  int workers = 1;
};

int MetricsScore(const MetricsArgs& a, std::ostream& out) {
  Settings s = a.config ? Settings::FromFile(*a.config) : Settings();
  if (a.embedder) s.SetFlag("embedder.type", *a.embedder);
  if (a.embedder_url) s.SetFlag("embedder.base_url", *a.embedder_url);
  auto embedder = MakeEmbedder(s, "embedder");
  const auto answers = LoadAnswerSet(a.answers);
  const Corpus corpus = LoadCorpusArg(a.corpus, a.format);
  const MetricReport report = ScoreAnswerSet(answers, corpus, *embedder, a.workers);
  const std::string table = report.ToTable();
  if (a.out) {
    nlohmann::json j = report.ToJson();
    j["embedder"] = embedder->Identifier();
    WriteFileAtomic(*a.out, j.dump(2) + "\n");
    WriteFileAtomic(*a.out + ".txt", table);
  }
  for (const auto& w : report.warnings) spdlog::warn("{}", w);
  out << table;
  return kOk;
}

// --- review -----------------------------------------------------------------

struct ReviewInitArgs {
  std::vector<std::string> answers;
  std::string corpus, format = "normalized-jsonl", store;
  std::uint64_t seed = 0;
  std::optional<std::string> ids_file;
  size_t reviewers = 0;
};

// "path" or "path::config-name".
std::pair<std::string, std::vector<AugmentedAnswer>> LoadSystemAnswers(const std::string& arg) {
  std::string path = arg, name;
  if (const auto at = arg.rfind("::"); at != std::string::npos) {
    path = arg.substr(0, at);
    name = arg.substr(at + 2);
  }
  auto all = LoadAnswerSet(path);
  std::set<std::string> names;
  for (const auto& a : all) names.insert(a.config.Name());
  if (name.empty()) {
    if (names.size() != 1) {
      std::string msg = path + " holds " + std::to_string(names.size()) +
                        " systems; pick one with " + path + "::<name> from:";
      for (const auto& n : names) msg += " " + n;
      throw ValidationError(msg);
    }
    name = *names.begin();
  }
  std::erase_if(all, [&](const AugmentedAnswer& a) { return a.config.Name() != name; });
  if (all.empty()) throw ValidationError("no answers for system " + name + " in " + path);
  return {name, std::move(all)};
}

int ReviewInit(const ReviewInitArgs& a, std::ostream& out) {
  if (a.answers.size() != 2) {
    throw ValidationError("review init takes exactly two --answers (baseline, then augmented)");
  }
  Corpus corpus = LoadCorpusArg(a.corpus, a.format);
  if (a.ids_file) corpus = SelectSubset(corpus, ReadIdManifest(*a.ids_file));
  auto [base_name, base] = LoadSystemAnswers(a.answers[0]);
  auto [aug_name, aug] = LoadSystemAnswers(a.answers[1]);
  if (base_name == aug_name) throw ValidationError("both --answers name system " + base_name);

  std::map<std::string, std::string> base_by_q, aug_by_q;
  for (const auto& x : base) base_by_q[x.question_id] = x.answer_text;
  for (const auto& x : aug) aug_by_q[x.question_id] = x.answer_text;
  std::vector<PairInput> pairs;
  for (const auto& rec : corpus.records) {
    const auto b = base_by_q.find(rec.id);
    const auto g = aug_by_q.find(rec.id);
    if (b == base_by_q.end() || g == aug_by_q.end()) {
      if (a.ids_file) {
        throw ValidationError("question " + rec.id + " lacks an answer from both systems");
      }
      continue;
    }
    pairs.push_back({rec.id, rec.question_text, b->second, g->second});
  }
  if (pairs.empty()) throw ValidationError("no question has answers from both systems");

  ReviewSet set{base_name, aug_name, a.seed, AssignBlinding(pairs, a.seed)};
  ReviewStore::Create(a.store, set);
  ReviewStore store(a.store);
  if (a.reviewers > 0) store.IssueReviewers(a.reviewers);
  out << "review set: " << set.pairs.size() << " question(s) in " << a.store << "\n";
  if (a.reviewers > 0) {
    out << "reviewer and admin tokens: " << (fs::path(a.store) / "reviewers.json").string()
        << "\n";
  }
  return kOk;
}

int ReviewReport(const std::string& store_dir, const std::optional<std::string>& out_path,
                 std::ostream& out) {
  ReviewStore store(store_dir);
  const WinRateSummary s = store.Summary();
  if (s.questions == 0) {
    out << "insufficient data: no complete judgments\n";
    return kOk;
  }
  if (out_path) {
    nlohmann::json j = s.ToJson();
    j["baseline"] = store.review_set().baseline_label;
    j["augmented"] = store.review_set().augmented_label;
    WriteFileAtomic(*out_path, j.dump(2) + "\n");
  }
  out << "augmented: " << store.review_set().augmented_label
      << "   baseline: " << store.review_set().baseline_label << "\n";
  out << s.ToTable();
  return kOk;
}

int ReviewServe(const std::string& store_dir, const std::string& host, int port,
                const std::optional<std::string>& static_dir, std::ostream& out) {
  ReviewStore store(store_dir);
  ReviewServer server(store, static_dir ? std::optional<fs::path>(*static_dir) : std::nullopt);
  out << "serving " << store.review_set().pairs.size() << " question(s) on " << host << ":"
      << port << "\n"
      << std::flush;
  server.Run(host, port);
  return kOk;
}

int MapException(std::ostream& err) {
  try {
    throw;
  } catch (const CredentialError& e) {
    err << "credential error: " << e.what() << "\n";
    return kProvider;
  } catch (const ProviderError& e) {
    err << "provider error: " << e.what() << "\n";
    return kProvider;
  } catch (const StorageError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kStorage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kValidation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const NotFoundError& e) {
    err << "not found: " << e.what() << "\n";
    return kValidation;
  } catch (const ConsistencyError& e) {
    err << "inconsistent input: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace

int Dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"UMLS-augmented medical question answering and evaluation", "umlsqa"};
  app.require_subcommand(1);
  int verbosity = 0;
  app.add_flag("-v,--verbose", verbosity, "more logging (-vv for debug)");

  // dataset
  auto* dataset = app.add_subcommand("dataset", "corpus conversion and subsets");
  dataset->require_subcommand(1);
  DatasetConvertArgs conv;
  auto* convert = dataset->add_subcommand("convert", "convert a corpus to normalized JSONL");
  convert->add_option("--input", conv.input)->required();
  convert->add_option("--output", conv.output)->required();
  convert->add_option("--from", conv.from, "trec-xml | normalized-jsonl")->capture_default_str();
  convert->add_option("--source-tag", conv.source_tag)->capture_default_str();
  DatasetSubsetArgs sub;
  auto* subset = dataset->add_subcommand("subset", "select records listed in an id manifest");
  subset->add_option("--corpus", sub.corpus)->required();
  subset->add_option("--ids-file", sub.ids_file)->required();
  subset->add_option("--output", sub.output)->required();
  subset->add_option("--format", sub.format)->capture_default_str();
  subset->add_option("--suffix", sub.suffix)->capture_default_str();

  // umls
  auto* umls = app.add_subcommand("umls", "UMLS lookups and fixture recording");
  umls->require_subcommand(1);
  CommonFlags umls_flags;
  std::string term, cui, terms_file, fixtures_out;
  auto* link = umls->add_subcommand("link", "link a term to its top-ranked concept");
  link->add_option("term", term)->required();
  AddCommonFlags(link, umls_flags, false);
  auto* concept_cmd = umls->add_subcommand("concept", "definition and relations for a CUI");
  concept_cmd->add_option("cui", cui)->required();
  AddCommonFlags(concept_cmd, umls_flags, false);
  auto* record = umls->add_subcommand("record-fixtures", "record live responses as fixtures");
  record->add_option("--terms-file", terms_file, "one term per line")->required();
  record->add_option("--out", fixtures_out, "fixture directory")->required();
  AddCommonFlags(record, umls_flags, false);

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "answer generation");
  pipeline->require_subcommand(1);
  PipelineArgs pa;
  auto* run = pipeline->add_subcommand("run", "answer every question with every system");
  run->add_option("--corpus", pa.corpus)->required();
  run->add_option("--format", pa.format)->capture_default_str();
  run->add_option("--out", pa.out, "answer-set file (JSONL)")->required();
  run->add_option("--ids-file", pa.ids_file, "restrict to these question ids");
  run->add_option("--subset", pa.subset, "named subset manifest from the config");
  run->add_option("--system", pa.system, "only this system (<model>/<augmentation>)");
  AddCommonFlags(run, pa.common, true);
  auto* answer = pipeline->add_subcommand("answer", "answer one question, print the records");
  answer->add_option("--corpus", pa.corpus)->required();
  answer->add_option("--format", pa.format)->capture_default_str();
  answer->add_option("--question-id", pa.question_id)->required();
  answer->add_option("--system", pa.system, "only this system (<model>/<augmentation>)");
  AddCommonFlags(answer, pa.common, true);

  // metrics
  auto* metrics = app.add_subcommand("metrics", "automatic scoring");
  metrics->require_subcommand(1);
  MetricsArgs ma;
  auto* score = metrics->add_subcommand("score", "ROUGE and BERTScore report for an answer set");
  score->add_option("--answers", ma.answers)->required();
  score->add_option("--corpus", ma.corpus)->required();
  score->add_option("--format", ma.format)->capture_default_str();
  score->add_option("--out", ma.out, "JSON report (the table also goes to <out>.txt)");
  score->add_option("--config", ma.config, "JSON configuration (embedder block)");
  score->add_option("--embedder", ma.embedder, "stub | http");
  score->add_option("--embedder-url", ma.embedder_url);
  score->add_option("--workers", ma.workers)->check(CLI::PositiveNumber);

  // review
  auto* review = app.add_subcommand("review", "blind pairwise review");
  review->require_subcommand(1);
  ReviewInitArgs ri;
  auto* init = review->add_subcommand("init", "blind two systems' answers into a review set");
  init->add_option("--answers", ri.answers, "baseline first, then augmented; path[::system]")
      ->required();
  init->add_option("--corpus", ri.corpus)->required();
  init->add_option("--format", ri.format)->capture_default_str();
  init->add_option("--seed", ri.seed)->required();
  init->add_option("--store", ri.store, "review store directory")->required();
  init->add_option("--ids-file", ri.ids_file, "only these question ids");
  init->add_option("--reviewers", ri.reviewers, "issue this many reviewer tokens");
  std::string store_dir, host = "127.0.0.1";
  int port = 8080;
  std::optional<std::string> static_dir, report_out;
  auto* serve = review->add_subcommand("serve", "run the review HTTP API");
  serve->add_option("--store", store_dir)->required();
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--static-dir", static_dir, "serve a review UI from here");
  auto* report = review->add_subcommand("report", "win rates per dimension");
  report->add_option("--store", store_dir)->required();
  report->add_option("--out", report_out, "JSON report");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  spdlog::set_level(verbosity >= 2   ? spdlog::level::debug
                    : verbosity == 1 ? spdlog::level::info
                                     : spdlog::level::warn);

  try {
    if (convert->parsed()) return DatasetConvert(conv, out);
    if (subset->parsed()) return DatasetSubset(sub, out);
    if (link->parsed()) return UmlsLink(umls_flags, term, out);
    if (concept_cmd->parsed()) return UmlsConcept(umls_flags, cui, out);
    if (record->parsed()) return UmlsRecordFixtures(umls_flags, terms_file, fixtures_out, out);
    if (run->parsed()) return PipelineRun(pa, out);
    if (answer->parsed()) return PipelineAnswer(pa, out);
    if (score->parsed()) return MetricsScore(ma, out);
    if (init->parsed()) return ReviewInit(ri, out);
    if (serve->parsed()) return ReviewServe(store_dir, host, port, static_dir, out);
    if (report->parsed()) return ReviewReport(store_dir, report_out, out);
  } catch (...) {
    return MapException(err);
  }
  err << app.help();
  return kValidation;
}

}  // namespace umlsqa::cli
