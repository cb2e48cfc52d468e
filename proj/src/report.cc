/*
 * Copyright 2026 The DefVerify Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "defverify/report.h"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <set>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_replace.h"
#include "defverify/corpus.h"
#include "defverify/diagnostic_set.h"
#include "defverify/expectation.h"
#include "defverify/file_util.h"
#include "defverify/prediction.h"
#include "defverify/remote_inference.h"
#include "defverify/spec_format.h"
#include "defverify/status_macros.h"
#include "json.hpp"

namespace defverify {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr absl::string_view kReportJson = "report.json";
constexpr absl::string_view kReportMd = "report.md";
constexpr absl::string_view kFig3Csv = "fig3.csv";
constexpr absl::string_view kFig4Csv = "fig4.csv";

std::string UtcNow() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

Json OptionalNumber(const std::optional<double>& value) {
  return value.has_value() ? Json(*value) : Json(nullptr);
}

Json OptionalString(const std::optional<std::string>& value) {
  return value.has_value() ? Json(*value) : Json(nullptr);
}

// Typed accessors for ParseRunReport. Missing or mistyped fields raise
// nlohmann exceptions that the caller converts into a status.
std::optional<double> GetOptionalNumber(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

std::optional<std::string> GetOptionalString(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

AspectSelector SelectorFromText(const std::string& text) {
  absl::StatusOr<AspectSelector> selector = ParseSelector(text);
  if (!selector.ok()) {
    throw std::runtime_error(std::string(selector.status().message()));
  }
  return *selector;
}

// --- config ---------------------------------------------------------------

Json ConfigToJson(const RunConfig& c) {
  Json j;
  j["spec"] = c.spec_source;
  j["diagnostic"] = c.diagnostic_path;
  j["scheme"] = c.scheme;
  j["predictions"] = c.predictions_path;
  Json endpoints = Json::array();
  for (const EndpointSource& e : c.endpoints) {
    endpoints.push_back({{"seed_id", e.seed_id}, {"url", e.url}});
  }
  j["endpoints"] = std::move(endpoints);
  j["model_id"] = c.model_id;
  j["batch_size"] = c.batch_size;
  j["max_in_flight"] = c.max_in_flight;
  j["threshold"] = c.threshold;
  Json overrides = Json::object();
  for (const auto& [key, value] : c.aspect_thresholds) overrides[key] = value;
  j["aspect_thresholds"] = std::move(overrides);
  j["selectors"] = c.selectors;
  j["out_dir"] = c.out_dir;
  j["include_spelling"] = c.include_spelling;
  j["no_gate"] = c.no_gate;
  j["corpus"] = c.corpus_path;
  j["lexicon"] = c.lexicon_path;
  j["substring_match"] = c.substring_match;
  return j;
}

RunConfig ConfigFromJson(const Json& j) {
  RunConfig c;
  c.spec_source = j.at("spec").get<std::string>();
  c.diagnostic_path = j.at("diagnostic").get<std::string>();
  c.scheme = j.at("scheme").get<std::string>();
  c.predictions_path = j.at("predictions").get<std::string>();
  for (const Json& e : j.at("endpoints")) {
    c.endpoints.push_back(
        {e.at("seed_id").get<std::string>(), e.at("url").get<std::string>()});
  }
  c.model_id = j.at("model_id").get<std::string>();
  c.batch_size = j.at("batch_size").get<size_t>();
  c.max_in_flight = j.at("max_in_flight").get<size_t>();
  c.threshold = j.at("threshold").get<double>();
  for (const auto& [key, value] : j.at("aspect_thresholds").items()) {
    c.aspect_thresholds[key] = value.get<double>();
  }
  c.selectors = j.at("selectors").get<std::vector<std::string>>();
  c.out_dir = j.at("out_dir").get<std::string>();
  c.include_spelling = j.at("include_spelling").get<bool>();
  c.no_gate = j.at("no_gate").get<bool>();
  c.corpus_path = j.at("corpus").get<std::string>();
  c.lexicon_path = j.at("lexicon").get<std::string>();
  c.substring_match = j.at("substring_match").get<bool>();
  return c;
}

// --- sections ---------------------------------------------------------------

Json AspectToJson(const AspectReport& r) {
  Json j;
  j["aspect"] = r.selector.ToString();
  j["n_cases"] = r.n_cases;
  j["n_expected"] = r.n_expected;
  j["n_seeds"] = r.n_seeds;
  j["correct_total"] = r.correct_total;
  j["accuracy_mean"] = OptionalNumber(r.accuracy_mean);
  j["accuracy_std"] = OptionalNumber(r.accuracy_std);
  j["precision_hate"] = OptionalNumber(r.precision_hate);
  j["recall_hate"] = OptionalNumber(r.recall_hate);
  j["confusion"] = {{"tp", r.confusion.tp},
                    {"fp", r.confusion.fp},
                    {"fn", r.confusion.fn},
                    {"tn", r.confusion.tn}};
  Json per_seed = Json::object();
  for (const auto& [seed, accuracy] : r.per_seed_accuracy) per_seed[seed] = accuracy;
  j["per_seed_accuracy"] = std::move(per_seed);
  return j;
}

AspectReport AspectFromJson(const Json& j) {
  AspectReport r;
  r.selector = SelectorFromText(j.at("aspect").get<std::string>());
  r.n_cases = j.at("n_cases").get<size_t>();
  r.n_expected = j.at("n_expected").get<size_t>();
  r.n_seeds = j.at("n_seeds").get<size_t>();
  r.correct_total = j.at("correct_total").get<size_t>();
  r.accuracy_mean = GetOptionalNumber(j, "accuracy_mean");
  r.accuracy_std = GetOptionalNumber(j, "accuracy_std");
  r.precision_hate = GetOptionalNumber(j, "precision_hate");
  r.recall_hate = GetOptionalNumber(j, "recall_hate");
  const Json& confusion = j.at("confusion");
  r.confusion = {confusion.at("tp").get<size_t>(), confusion.at("fp").get<size_t>(),
                 confusion.at("fn").get<size_t>(), confusion.at("tn").get<size_t>()};
  for (const auto& [seed, accuracy] : j.at("per_seed_accuracy").items()) {
    r.per_seed_accuracy.emplace_back(seed, accuracy.get<double>());
  }
  return r;
}

Json VerdictsToJson(const VerdictTable& table) {
  Json j;
  j["threshold"] = table.threshold;
  Json rows = Json::array();
  for (const VerdictRow& row : table.rows) {
    Json r;
    r["aspect"] = row.selector.ToString();
    r["status"] = std::string(AspectStatusName(row.status));
    r["n_cases"] = row.n_cases;
    r["accuracy_mean"] = OptionalNumber(row.accuracy_mean);
    r["threshold"] = row.threshold;
    r["verdict"] = std::string(VerdictName(row.verdict));
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  j["summary"] = {{"FAIL", table.Count(Verdict::kFail)},
                  {"PASS", table.Count(Verdict::kPass)},
                  {"INFO", table.Count(Verdict::kInfo)}};
  return j;
}

Verdict VerdictFromName(const std::string& name) {
  if (name == "PASS") return Verdict::kPass;
  if (name == "FAIL") return Verdict::kFail;
  if (name == "INFO") return Verdict::kInfo;
  throw std::runtime_error(absl::StrCat("unknown verdict \"", name, "\""));
}

VerdictTable VerdictsFromJson(const Json& j) {
  VerdictTable table;
  table.threshold = j.at("threshold").get<double>();
  for (const Json& r : j.at("rows")) {
    VerdictRow row;
    row.selector = SelectorFromText(r.at("aspect").get<std::string>());
    absl::StatusOr<AspectStatus> status =
        ParseAspectStatus(r.at("status").get<std::string>());
    if (!status.ok()) throw std::runtime_error(std::string(status.status().message()));
    row.status = *status;
    row.n_cases = r.at("n_cases").get<size_t>();
    row.accuracy_mean = GetOptionalNumber(r, "accuracy_mean");
    row.threshold = r.at("threshold").get<double>();
    row.verdict = VerdictFromName(r.at("verdict").get<std::string>());
    table.rows.push_back(std::move(row));
  }
  return table;
}

Json DistributionToJson(const DistributionReport& d) {
  Json j;
  j["slice"] = d.slice;
  j["n_cases"] = d.n_cases;
  j["n_predictions"] = d.n_predictions;
  Json counts = Json::object();
  Json fractions = Json::object();
  for (const auto& [label, count] : d.per_label_count) counts[label] = count;
  for (const auto& [label, fraction] : d.per_label_fraction) fractions[label] = fraction;
  j["counts"] = std::move(counts);
  j["fractions"] = std::move(fractions);
  return j;
}

DistributionReport DistributionFromJson(const Json& j) {
  DistributionReport d;
  d.slice = j.at("slice").get<std::string>();
  d.n_cases = j.at("n_cases").get<size_t>();
  d.n_predictions = j.at("n_predictions").get<size_t>();
  for (const auto& [label, count] : j.at("counts").items()) {
    d.per_label_count[label] = count.get<size_t>();
  }
  for (const auto& [label, fraction] : j.at("fractions").items()) {
    d.per_label_fraction[label] = fraction.get<double>();
  }
  return d;
}

Json RootCauseToJson(const RootCauseReport& r) {
  Json j;
  j["aspect"] = r.aspect;
  j["keywords"] = r.query.keywords;
  j["match_mode"] = std::string(MatchModeName(r.query.match_mode));
  j["case_sensitive"] = r.query.case_sensitive;
  j["corpus_size"] = r.corpus_size;
  j["matches"] = r.matches;
  j["coverage"] = r.coverage;
  Json counts = Json::object();
  for (const auto& [label, count] : r.per_label_counts) counts[label] = count;
  j["per_label_counts"] = std::move(counts);
  Json excerpts = Json::array();
  for (const Excerpt& e : r.excerpts) {
    excerpts.push_back({{"record_id", e.record_id}, {"snippet", e.snippet}});
  }
  j["excerpts"] = std::move(excerpts);
  return j;
}

RootCauseReport RootCauseFromJson(const Json& j) {
  RootCauseReport r;
  r.aspect = j.at("aspect").get<std::string>();
  r.query.keywords = j.at("keywords").get<std::vector<std::string>>();
  r.query.match_mode = j.at("match_mode").get<std::string>() == "substring"
                           ? MatchMode::kSubstring
                           : MatchMode::kWholeToken;
  r.query.case_sensitive = j.at("case_sensitive").get<bool>();
  r.corpus_size = j.at("corpus_size").get<size_t>();
  r.matches = j.at("matches").get<size_t>();
  r.coverage = j.at("coverage").get<double>();
  for (const auto& [label, count] : j.at("per_label_counts").items()) {
    r.per_label_counts[label] = count.get<size_t>();
  }
  for (const Json& e : j.at("excerpts")) {
    r.excerpts.push_back(
        {e.at("record_id").get<std::string>(), e.at("snippet").get<std::string>()});
  }
  return r;
}

// --- rendering helpers ------------------------------------------------------

std::string Fixed(double value, int digits) {
  return absl::StrFormat("%.*f", digits, value);
}

std::string OptionalFixed(const std::optional<double>& value, int digits,
                          absl::string_view missing) {
  return value.has_value() ? Fixed(*value, digits) : std::string(missing);
}

std::string Percent(double ratio) { return absl::StrFormat("%.1f%%", 100.0 * ratio); }

// Keeps table cells on one line and pipes from splitting columns.
std::string Cell(absl::string_view text) {
  return absl::StrReplaceAll(text, {{"|", "\\|"}, {"\n", " "}});
}

std::string CsvField(absl::string_view text) {
  if (text.find_first_of(",\"\n") == absl::string_view::npos) {
    return std::string(text);
  }
  return absl::StrCat("\"", absl::StrReplaceAll(text, {{"\"", "\"\""}}), "\"");
}

std::string AspectWithoutPolarity(const AspectSelector& selector) {
  return selector.WithPolarity(Polarity::kAll).ToString();
}

int VerdictRank(Verdict verdict) {
  switch (verdict) {
    case Verdict::kFail:
      return 0;
    case Verdict::kPass:
      return 1;
    case Verdict::kInfo:
      return 2;
  }
  return 2;
}

const VerdictRow* FindVerdict(const VerdictTable& table,
                              const AspectSelector& selector) {
  for (const VerdictRow& row : table.rows) {
    if (row.selector == selector) return &row;
  }
  return nullptr;
}

// --- run stages -------------------------------------------------------------

struct StageFailure {
  std::string stage;
  absl::Status status;
};

absl::StatusOr<PredictionSet> IngestPredictions(
    const RunConfig& config, const DiagnosticSet& evaluated,
    const std::set<std::string>& removed_ids, RunReport* report) {
  const std::vector<std::string> ids = evaluated.Ids();
  if (!config.predictions_path.empty()) {
    ASSIGN_OR_RETURN(std::string text, ReadFileToString(config.predictions_path));
    report->inputs.push_back({"predictions", config.predictions_path, Sha256Hex(text)});
    absl::StatusOr<PredictionSet> set = ParsePredictions(text, ids, removed_ids);
    if (!set.ok()) {
      return absl::Status(set.status().code(), absl::StrCat(config.predictions_path,
                                                            ": ", set.status().message()));
    }
    return set->Restrict(std::set<std::string>(ids.begin(), ids.end()));
  }
  std::vector<CaseText> cases;
  for (const DiagnosticCase& c : evaluated.cases()) cases.push_back({c.case_id, c.text});
  std::vector<PredictionRecord> records;
  for (const EndpointSource& endpoint : config.endpoints) {
    RemoteOptions options;
    options.batch_size = config.batch_size;
    options.max_in_flight = config.max_in_flight;
    options.seed_id = endpoint.seed_id;
    options.model_id = config.model_id;
    absl::StatusOr<PredictionSet> set = InferRemote(endpoint.url, cases, options);
    if (!set.ok()) {
      return absl::Status(set.status().code(),
                          absl::StrCat("endpoint ", endpoint.url, " (seed \"",
                                       endpoint.seed_id, "\"): ", set.status().message()));
    }
    records.insert(records.end(), set->records().begin(), set->records().end());
  }
  ASSIGN_OR_RETURN(PredictionSet set, PredictionSet::Create(std::move(records)));
  RETURN_IF_ERROR(set.CheckCoverage(ids));
  std::vector<std::string> urls;
  for (const EndpointSource& e : config.endpoints) {
    urls.push_back(absl::StrCat(e.seed_id, "=", e.url));
  }
  report->inputs.push_back(
      {"predictions", absl::StrJoin(urls, " "), Sha256Hex(SerializePredictions(set))});
  return set;
}

void RunRootCause(const RunConfig& config, const DiagnosticSet& set,
                  RunReport* report, std::optional<StageFailure>* failure) {
  if (config.corpus_path.empty()) {
    report->root_cause_skipped = "no training corpus given";
    return;
  }
  std::vector<AspectSelector> failing;
  for (const VerdictRow& row : report->verdicts.rows) {
    if (row.verdict == Verdict::kFail) failing.push_back(row.selector);
  }
  if (failing.empty()) {
    report->root_cause_skipped = "no FAIL verdicts";
    return;
  }
  absl::StatusOr<std::string> text = ReadFileToString(config.corpus_path);
  absl::StatusOr<std::vector<CorpusRecord>> corpus =
      text.ok() ? ParseCorpus(*text) : absl::StatusOr<std::vector<CorpusRecord>>(text.status());
  if (!corpus.ok()) {
    *failure = StageFailure{"root cause", absl::Status(corpus.status().code(),
                                                       absl::StrCat(config.corpus_path, ": ",
                                                                    corpus.status().message()))};
    return;
  }
  report->inputs.push_back({"corpus", config.corpus_path, Sha256Hex(*text)});
  Lexicon lexicon = Lexicon::Default();
  if (!config.lexicon_path.empty()) {
    absl::StatusOr<Lexicon> extra = Lexicon::Load(config.lexicon_path);
    if (!extra.ok()) {
      *failure = StageFailure{"root cause", extra.status()};
      return;
    }
    lexicon.Merge(*extra);
  }
  const MatchMode mode =
      config.substring_match ? MatchMode::kSubstring : MatchMode::kWholeToken;
  for (const AspectSelector& selector : failing) {
    absl::StatusOr<KeywordQuery> query =
        AspectKeywords(selector, set, lexicon, GroupVocabulary::Default(), mode);
    if (!query.ok()) {
      report->root_cause_notes.push_back(
          absl::StrCat(selector.ToString(), ": ", query.status().message()));
      continue;
    }
    absl::StatusOr<RootCauseReport> result = Search(*corpus, *query);
    if (!result.ok()) {
      *failure = StageFailure{"root cause", result.status()};
      return;
    }
    result->aspect = selector.ToString();
    report->root_cause.push_back(*std::move(result));
  }
}

RunOutcome Fail(RunOutcome outcome, absl::string_view stage, absl::Status status) {
  outcome.exit_code = 2;
  outcome.failed_stage = std::string(stage);
  outcome.status = std::move(status);
  return outcome;
}

}  // namespace

absl::Status ValidateRunConfig(const RunConfig& config) {
  std::vector<std::string> problems;
  if (config.spec_source.empty()) problems.push_back("no spec given");
  if (config.diagnostic_path.empty()) problems.push_back("no diagnostic set given");
  const bool has_file = !config.predictions_path.empty();
  const bool has_endpoint = !config.endpoints.empty();
  if (has_file == has_endpoint) {
    problems.push_back("give exactly one prediction source (a file or endpoints)");
  }
  if (!(config.threshold > 0.0 && config.threshold <= 1.0)) {
    problems.push_back(absl::StrCat("threshold ", config.threshold, " is not in (0, 1]"));
  }
  for (const auto& [key, value] : config.aspect_thresholds) {
    if (!(value > 0.0 && value <= 1.0)) {
      problems.push_back(absl::StrCat("threshold for \"", key, "\" is not in (0, 1]"));
    }
  }
  if (config.batch_size < 1 || config.max_in_flight < 1) {
    problems.push_back("batch size and max in flight must be at least 1");
  }
  std::set<std::string> seeds;
  for (const EndpointSource& e : config.endpoints) {
    if (e.seed_id.empty() || e.url.empty()) {
      problems.push_back("endpoint entries need a seed id and a URL");
    } else if (!seeds.insert(e.seed_id).second) {
      problems.push_back(absl::StrCat("seed \"", e.seed_id, "\" has two endpoints"));
    }
  }
  if (config.out_dir.empty()) problems.push_back("no output directory given");
  if (problems.empty()) return absl::OkStatus();
  return absl::InvalidArgumentError(absl::StrJoin(problems, "; "));
}

RunOutcome RunVerify(const RunConfig& config) {
  RunOutcome outcome;
  RunReport report;
  report.generated_at = UtcNow();
  report.config = config;
  if (absl::Status s = ValidateRunConfig(config); !s.ok()) {
    return Fail(std::move(outcome), "config", s);
  }
  const auto timed = [&report](absl::string_view stage, const Stopwatch& watch) {
    report.stage_seconds.emplace_back(std::string(stage), watch.Seconds());
  };

  Stopwatch watch;
  absl::StatusOr<DefinitionSpec> spec = ResolveDefinitionSpec(config.spec_source);
  if (!spec.ok()) return Fail(std::move(outcome), "load spec", spec.status());
  report.spec = *spec;
  report.inputs.push_back(
      {"spec", config.spec_source, Sha256Hex(SerializeDefinitionSpec(*spec))});
  const std::string scheme_source =
      config.scheme.empty() ? spec->label_scheme_ref : config.scheme;
  if (scheme_source.empty()) {
    return Fail(std::move(outcome), "load label scheme",
                absl::InvalidArgumentError(
                    "the spec names no label scheme; pass one explicitly"));
  }
  absl::StatusOr<LabelScheme> scheme = ResolveLabelScheme(scheme_source);
  if (!scheme.ok()) return Fail(std::move(outcome), "load label scheme", scheme.status());
  report.scheme_name = scheme->scheme_name;
  report.inputs.push_back(
      {"scheme", scheme_source, Sha256Hex(SerializeLabelSchemeJson(*scheme))});
  timed("load spec", watch);

  watch = Stopwatch();
  absl::StatusOr<LoadedDiagnosticSet> loaded = LoadDiagnosticSet(config.diagnostic_path);
  if (!loaded.ok()) {
    return Fail(std::move(outcome), "load diagnostic set", loaded.status());
  }
  report.inputs.push_back({"diagnostic", config.diagnostic_path,
                           loaded->set.provenance().digest});
  report.warnings = loaded->warnings;
  report.diagnostic_cases = loaded->set.size();
  const DiagnosticSet evaluated =
      config.include_spelling ? loaded->set : FilterSpelling(loaded->set);
  report.evaluated_cases = evaluated.size();
  report.spelling_removed = report.diagnostic_cases - report.evaluated_cases;
  std::set<std::string> removed_ids;
  for (const DiagnosticCase& c : loaded->set.cases()) {
    if (evaluated.Find(c.case_id) == nullptr) removed_ids.insert(c.case_id);
  }
  timed("load diagnostic set", watch);

  watch = Stopwatch();
  absl::StatusOr<ExpectationTable> expectations = DeriveAll(evaluated, *spec, *scheme);
  if (!expectations.ok()) {
    return Fail(std::move(outcome), "derive expectations", expectations.status());
  }
  for (const Expectation& e : expectations->entries()) {
    ++(e.has_expectation() ? report.expect_count : report.no_expectation_count);
  }
  report.expectation_coverage = ExpectationCoverage(*expectations);
  timed("derive expectations", watch);

  watch = Stopwatch();
  absl::StatusOr<PredictionSet> raw =
      IngestPredictions(config, evaluated, removed_ids, &report);
  if (!raw.ok()) return Fail(std::move(outcome), "prediction ingest", raw.status());
  absl::StatusOr<PredictionSet> predictions = MapLabels(*raw, *scheme);
  if (!predictions.ok()) {
    return Fail(std::move(outcome), "prediction ingest", predictions.status());
  }
  report.model_id = predictions->model_id();
  report.seeds.assign(predictions->seeds().begin(), predictions->seeds().end());
  timed("prediction ingest", watch);

  watch = Stopwatch();
  std::vector<AspectSelector> selectors;
  const bool use_defaults = config.selectors.empty() ||
                            (config.selectors.size() == 1 && config.selectors[0] == "all");
  if (use_defaults) {
    selectors = DefaultSelectors(evaluated);
  } else {
    for (const std::string& text : config.selectors) {
      absl::StatusOr<AspectSelector> selector = ParseSelector(text);
      if (!selector.ok()) return Fail(std::move(outcome), "evaluate", selector.status());
      if (absl::StatusOr<std::vector<std::string>> slice =
              SliceByAspect(evaluated, *selector);
          !slice.ok()) {
        return Fail(std::move(outcome), "evaluate", slice.status());
      }
      selectors.push_back(*selector);
    }
  }
  absl::StatusOr<std::vector<AspectReport>> aspects =
      EvaluateAspects(*expectations, *predictions, evaluated, selectors, *scheme);
  if (!aspects.ok()) return Fail(std::move(outcome), "evaluate", aspects.status());
  report.aspects = *std::move(aspects);
  if (report.aspects.empty()) report.aspects_skipped = "no aspect selectors";
  timed("evaluate", watch);

  watch = Stopwatch();
  absl::StatusOr<VerdictTable> verdicts =
      Verdicts(report.aspects, *spec, config.threshold, config.aspect_thresholds);
  if (!verdicts.ok()) return Fail(std::move(outcome), "verdicts", verdicts.status());
  report.verdicts = *std::move(verdicts);
  timed("verdicts", watch);

  watch = Stopwatch();
  const OffensiveSlice offensive = SelectOffensiveSlice(evaluated);
  if (offensive.count == 0) {
    report.offensive_skipped = "no offensive cases in the diagnostic set";
  } else {
    absl::StatusOr<DistributionReport> distribution = Distribution(
        *predictions, offensive.case_ids, scheme->canonical_labels, "offensive");
    if (!distribution.ok()) {
      return Fail(std::move(outcome), "offensive distribution", distribution.status());
    }
    report.offensive = *std::move(distribution);
    if (!offensive.matches_published_count) {
      report.offensive_note = absl::StrCat(
          "the offensive slice has ", offensive.count,
          " cases; the reference set has 285 (265 in some descriptions)");
    }
  }
  timed("offensive distribution", watch);

  watch = Stopwatch();
  std::optional<StageFailure> failure;
  RunRootCause(config, evaluated, &report, &failure);
  if (failure.has_value()) {
    return Fail(std::move(outcome), failure->stage, failure->status);
  }
  timed("root cause", watch);
  report.cross_eval_skipped = "cross-dataset evaluation runs separately (defverify cross-eval)";

  if (absl::Status s = WriteRunArtifacts(report, config.out_dir, &outcome.written_files);
      !s.ok()) {
    return Fail(std::move(outcome), "write outputs", s);
  }
  const bool any_fail = report.verdicts.Count(Verdict::kFail) > 0;
  outcome.exit_code = any_fail && !config.no_gate ? 1 : 0;
  outcome.report = std::move(report);
  return outcome;
}

std::string SerializeRunReport(const RunReport& report, bool include_metadata) {
  Json j;
  j["format"] = std::string(kReportFormat);
  if (include_metadata) {
    Json stages = Json::object();
    for (const auto& [stage, seconds] : report.stage_seconds) stages[stage] = seconds;
    j["metadata"] = {{"generated_at", report.generated_at},
                     {"stage_seconds", std::move(stages)}};
  }
  j["toolkit_version"] = report.toolkit_version;
  j["config"] = ConfigToJson(report.config);
  Json inputs = Json::array();
  for (const InputDigest& input : report.inputs) {
    inputs.push_back(
        {{"name", input.name}, {"source", input.source}, {"sha256", input.sha256}});
  }
  j["inputs"] = std::move(inputs);
  j["dataset"] = report.spec.dataset_name;
  j["spec_document"] = SerializeDefinitionSpec(report.spec);
  j["scheme"] = report.scheme_name;
  j["model_id"] = report.model_id;
  j["seeds"] = report.seeds;
  j["diagnostic"] = {{"cases", report.diagnostic_cases},
                     {"evaluated", report.evaluated_cases},
                     {"spelling_removed", report.spelling_removed},
                     {"warnings", report.warnings}};
  j["expectations"] = {{"expect", report.expect_count},
                       {"no_expectation", report.no_expectation_count},
                       {"coverage", report.expectation_coverage}};
  Json aspects = Json::array();
  for (const AspectReport& a : report.aspects) aspects.push_back(AspectToJson(a));
  j["aspects"] = std::move(aspects);
  j["aspects_skipped"] = OptionalString(report.aspects_skipped);
  j["verdicts"] = VerdictsToJson(report.verdicts);
  j["offensive"] = report.offensive.has_value() ? DistributionToJson(*report.offensive)
                                                : Json(nullptr);
  j["offensive_skipped"] = OptionalString(report.offensive_skipped);
  j["offensive_note"] = OptionalString(report.offensive_note);
  Json root_cause = Json::array();
  for (const RootCauseReport& r : report.root_cause) root_cause.push_back(RootCauseToJson(r));
  j["root_cause"] = std::move(root_cause);
  j["root_cause_notes"] = report.root_cause_notes;
  j["root_cause_skipped"] = OptionalString(report.root_cause_skipped);
  j["cross_eval_skipped"] = OptionalString(report.cross_eval_skipped);
  return j.dump(2) + "\n";
}

absl::StatusOr<RunReport> ParseRunReport(absl::string_view text) {
  const Json j = Json::parse(text.begin(), text.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError("report is not a JSON object");
  }
  if (j.value("format", "") != kReportFormat) {
    return absl::InvalidArgumentError(
        absl::StrCat("report format is not \"", kReportFormat, "\""));
  }
  RunReport report;
  try {
    if (auto metadata = j.find("metadata"); metadata != j.end()) {
      report.generated_at = metadata->at("generated_at").get<std::string>();
      for (const auto& [stage, seconds] : metadata->at("stage_seconds").items()) {
        report.stage_seconds.emplace_back(stage, seconds.get<double>());
      }
    }
    report.toolkit_version = j.at("toolkit_version").get<std::string>();
    report.config = ConfigFromJson(j.at("config"));
    for (const Json& input : j.at("inputs")) {
      report.inputs.push_back({input.at("name").get<std::string>(),
                               input.at("source").get<std::string>(),
                               input.at("sha256").get<std::string>()});
    }
    absl::StatusOr<ParsedDefinitionSpec> spec =
        ParseDefinitionSpec(j.at("spec_document").get<std::string>());
    if (!spec.ok()) return spec.status();
    report.spec = spec->spec;
    report.scheme_name = j.at("scheme").get<std::string>();
    report.model_id = j.at("model_id").get<std::string>();
    report.seeds = j.at("seeds").get<std::vector<std::string>>();
    const Json& diagnostic = j.at("diagnostic");
    report.diagnostic_cases = diagnostic.at("cases").get<size_t>();
    report.evaluated_cases = diagnostic.at("evaluated").get<size_t>();
    report.spelling_removed = diagnostic.at("spelling_removed").get<size_t>();
    report.warnings = diagnostic.at("warnings").get<std::vector<std::string>>();
    const Json& expectations = j.at("expectations");
    report.expect_count = expectations.at("expect").get<size_t>();
    report.no_expectation_count = expectations.at("no_expectation").get<size_t>();
    report.expectation_coverage = expectations.at("coverage").get<double>();
    for (const Json& a : j.at("aspects")) report.aspects.push_back(AspectFromJson(a));
    report.aspects_skipped = GetOptionalString(j, "aspects_skipped");
    report.verdicts = VerdictsFromJson(j.at("verdicts"));
    if (!j.at("offensive").is_null()) {
      report.offensive = DistributionFromJson(j.at("offensive"));
    }
    report.offensive_skipped = GetOptionalString(j, "offensive_skipped");
    report.offensive_note = GetOptionalString(j, "offensive_note");
    for (const Json& r : j.at("root_cause")) {
      report.root_cause.push_back(RootCauseFromJson(r));
    }
    report.root_cause_notes = j.at("root_cause_notes").get<std::vector<std::string>>();
    report.root_cause_skipped = GetOptionalString(j, "root_cause_skipped");
    report.cross_eval_skipped = GetOptionalString(j, "cross_eval_skipped");
  } catch (const std::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("malformed report: ", e.what()));
  }
  return report;
}

std::string RenderMarkdown(const RunReport& report) {
  std::string md;
  const VerdictTable& verdicts = report.verdicts;
  absl::StrAppend(&md, "# Definition verification report: ",
                  report.spec.dataset_name, "\n\n");
  absl::StrAppend(&md, "Model `", report.model_id, "`, label scheme `",
                  report.scheme_name, "`, ", report.seeds.size(),
                  " seed(s), default threshold ", Fixed(verdicts.threshold, 2), ".\n\n");
  absl::StrAppend(&md, "**", verdicts.Count(Verdict::kFail), " FAIL, ",
                  verdicts.Count(Verdict::kPass), " PASS, ",
                  verdicts.Count(Verdict::kInfo), " INFO**\n\n");
  md.append(
      "Spec status: ✓ included, ✗ excluded, ? unspecified. Rows with an "
      "unspecified status are informational.\n\n");

  md.append("## Verdicts\n\n");
  if (verdicts.rows.empty()) {
    md.append("_Skipped: no aspect selectors._\n\n");
  } else {
    md.append("| Verdict | Aspect | Polarity | Spec | n | Accuracy | Threshold |\n");
    md.append("|---|---|---|---|---:|---:|---:|\n");
    std::vector<const VerdictRow*> rows;
    for (const VerdictRow& row : verdicts.rows) rows.push_back(&row);
    std::stable_sort(rows.begin(), rows.end(), [](const VerdictRow* a, const VerdictRow* b) {
      return VerdictRank(a->verdict) < VerdictRank(b->verdict);
    });
    for (const VerdictRow* row : rows) {
      absl::StrAppend(&md, "| ", VerdictName(row->verdict), " | ",
                      Cell(AspectWithoutPolarity(row->selector)), " | ",
                      PolarityName(row->selector.polarity), " | ",
                      AspectStatusSymbol(row->status), " | ", row->n_cases, " | ",
                      OptionalFixed(row->accuracy_mean, 3, "n/a"), " | ",
                      Fixed(row->threshold, 2), " |\n");
    }
    md.append("\n");
  }

  md.append("## Definition\n\n|");
  for (AspectKind kind : kAllAspectKinds) absl::StrAppend(&md, " ", AspectColumnLabel(kind), " |");
  md.append("\n|");
  for (size_t i = 0; i < kAllAspectKinds.size(); ++i) md.append("---|");
  md.append("\n|");
  for (AspectKind kind : kAllAspectKinds) {
    absl::StrAppend(&md, " ", AspectStatusSymbol(report.spec.aspect(kind)), " |");
  }
  md.append("\n\n");
  if (!report.spec.category_status.empty() || !report.spec.target_groups.empty()) {
    md.append("| Target | Status |\n|---|---|\n");
    for (const auto& [category, status] : report.spec.category_status) {
      absl::StrAppend(&md, "| ", TargetCategoryName(category), " (category) | ",
                      AspectStatusSymbol(status), " |\n");
    }
    for (const auto& [group, status] : report.spec.target_groups) {
      absl::StrAppend(&md, "| ", Cell(group.group_name),
                      group.dominant ? " (dominant)" : "", " | ",
                      AspectStatusSymbol(status), " |\n");
    }
    md.append("\n");
  }
  if (!report.spec.notes.empty()) {
    absl::StrAppend(&md, "Notes: ", Cell(report.spec.notes), "\n\n");
  }

  md.append("## Aspect metrics\n\n");
  if (report.aspects.empty()) {
    absl::StrAppend(&md, "_Skipped: ",
                    report.aspects_skipped.value_or("no aspect selectors"), "._\n\n");
  } else {
    md.append(
        "Accuracy is the mean over seeds (± population std). Precision and "
        "recall treat hate-equivalent predictions as positive and are pooled "
        "over seeds.\n\n");
    md.append("| Aspect | Polarity | n | With expectation | Accuracy | Precision | Recall |\n");
    md.append("|---|---|---:|---:|---:|---:|---:|\n");
    for (const AspectReport& a : report.aspects) {
      std::string accuracy = "n/a";
      if (a.accuracy_mean.has_value()) {
        accuracy = absl::StrCat(Fixed(*a.accuracy_mean, 3), " ± ",
                                Fixed(a.accuracy_std.value_or(0.0), 3));
      }
      absl::StrAppend(&md, "| ", Cell(AspectWithoutPolarity(a.selector)), " | ",
                      PolarityName(a.selector.polarity), " | ", a.n_cases, " | ",
                      a.n_expected, " | ", accuracy, " | ",
                      OptionalFixed(a.precision_hate, 3, "n/a"), " | ",
                      OptionalFixed(a.recall_hate, 3, "n/a"), " |\n");
    }
    md.append("\n");
  }

  md.append("## Expectations\n\n");
  absl::StrAppend(&md, "Coverage ", Percent(report.expectation_coverage), ": ",
                  report.expect_count, " of ",
                  report.expect_count + report.no_expectation_count,
                  " evaluated cases have an expectation");
  if (report.spelling_removed > 0) {
    absl::StrAppend(&md, " (", report.spelling_removed,
                    " spelling-variant case(s) excluded)");
  }
  md.append(".\n\n");

  md.append("## Offensive predictions\n\n");
  if (!report.offensive.has_value()) {
    absl::StrAppend(&md, "_Skipped: ",
                    report.offensive_skipped.value_or("not computed"), "._\n\n");
  } else {
    absl::StrAppend(&md, report.offensive->n_cases, " cases, ",
                    report.offensive->n_predictions, " predictions.\n\n");
    md.append("| Label | Count | Share |\n|---|---:|---:|\n");
    for (const auto& [label, count] : report.offensive->per_label_count) {
      absl::StrAppend(&md, "| ", Cell(label), " | ", count, " | ",
                      Percent(report.offensive->per_label_fraction.at(label)), " |\n");
    }
    md.append("\n");
    if (report.offensive_note.has_value()) {
      absl::StrAppend(&md, "Note: ", *report.offensive_note, ".\n\n");
    }
  }

  md.append("## Root cause\n\n");
  if (report.root_cause_skipped.has_value()) {
    absl::StrAppend(&md, "_Skipped: ", *report.root_cause_skipped, "._\n\n");
  }
  for (const RootCauseReport& r : report.root_cause) {
    absl::StrAppend(&md, "### ", Cell(r.aspect), "\n\n");
    absl::StrAppend(&md, "Keywords (", MatchModeName(r.query.match_mode), "): ",
                    Cell(absl::StrJoin(r.query.keywords, ", ")), "\n\n");
    absl::StrAppend(&md, r.matches, " of ", r.corpus_size, " records match (",
                    Percent(r.coverage), ").");
    if (!r.per_label_counts.empty()) {
      std::vector<std::string> parts;
      for (const auto& [label, count] : r.per_label_counts) {
        parts.push_back(absl::StrCat(label, ": ", count));
      }
      absl::StrAppend(&md, " Labels: ", Cell(absl::StrJoin(parts, ", ")), ".");
    }
    md.append("\n\n");
    for (const Excerpt& e : r.excerpts) {
      absl::StrAppend(&md, "- `", e.record_id, "`: ", Cell(e.snippet), "\n");
    }
    if (!r.excerpts.empty()) md.append("\n");
  }
  for (const std::string& note : report.root_cause_notes) {
    absl::StrAppend(&md, "- ", Cell(note), "\n");
  }
  if (!report.root_cause_notes.empty()) md.append("\n");

  md.append("## Cross-dataset evaluation\n\n");
  absl::StrAppend(&md, "_Skipped: ",
                  report.cross_eval_skipped.value_or("not requested"), "._\n\n");

  md.append("## Inputs\n\n| Input | Source | SHA-256 |\n|---|---|---|\n");
  for (const InputDigest& input : report.inputs) {
    absl::StrAppend(&md, "| ", input.name, " | ", Cell(input.source), " | `",
                    input.sha256, "` |\n");
  }
  absl::StrAppend(&md, "\nDiagnostic set: ", report.diagnostic_cases, " cases, ",
                  report.evaluated_cases, " evaluated. Toolkit ",
                  report.toolkit_version, ".\n");
  if (!report.warnings.empty()) {
    absl::StrAppend(&md, "\n", report.warnings.size(), " loader warning(s):\n\n");
    for (const std::string& w : report.warnings) absl::StrAppend(&md, "- ", Cell(w), "\n");
  }
  return md;
}

std::string RenderFig3Csv(const RunReport& report) {
  std::string csv =
      "aspect,polarity,n,accuracy_mean,accuracy_std,precision,recall,status,verdict\n";
  for (const AspectReport& a : report.aspects) {
    const VerdictRow* row = FindVerdict(report.verdicts, a.selector);
    absl::StrAppend(&csv, CsvField(AspectWithoutPolarity(a.selector)), ",",
                    PolarityName(a.selector.polarity), ",", a.n_cases, ",",
                    OptionalFixed(a.accuracy_mean, 6, ""), ",",
                    OptionalFixed(a.accuracy_std, 6, ""), ",",
                    OptionalFixed(a.precision_hate, 6, ""), ",",
                    OptionalFixed(a.recall_hate, 6, ""), ",",
                    row != nullptr ? AspectStatusName(row->status) : "", ",",
                    row != nullptr ? VerdictName(row->verdict) : "", "\n");
  }
  return csv;
}

std::string RenderFig4Csv(const RunReport& report) {
  std::string csv = "slice,label,count,fraction\n";
  if (!report.offensive.has_value()) return csv;
  for (const auto& [label, count] : report.offensive->per_label_count) {
    absl::StrAppend(&csv, CsvField(report.offensive->slice), ",", CsvField(label), ",",
                    count, ",", Fixed(report.offensive->per_label_fraction.at(label), 6),
                    "\n");
  }
  return csv;
}

std::string RenderFig5Csv(const CrossEvalMatrix& matrix) {
  std::string csv = "source,target,n_hate_instances,hate_recall_mean,hate_recall_std\n";
  for (const std::string& source : matrix.sources) {
    for (const std::string& target : matrix.targets) {
      absl::StrAppend(&csv, CsvField(source), ",", CsvField(target), ",");
      if (const CrossEvalCell* cell = matrix.Find(source, target)) {
        absl::StrAppend(&csv, cell->n_hate_instances, ",",
                        OptionalFixed(cell->hate_recall_mean, 6, ""), ",",
                        OptionalFixed(cell->hate_recall_std, 6, ""), "\n");
      } else {
        csv.append(",,\n");
      }
    }
  }
  return csv;
}

absl::Status WriteRunArtifacts(const RunReport& report, const std::string& out_dir,
                               std::vector<std::string>* written) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    return absl::InternalError(
        absl::StrCat("cannot create output directory ", out_dir, ": ", ec.message()));
  }
  const std::vector<std::pair<absl::string_view, std::string>> artifacts = {
      {kReportJson, SerializeRunReport(report)},
      {kReportMd, RenderMarkdown(report)},
      {kFig3Csv, RenderFig3Csv(report)},
      {kFig4Csv, RenderFig4Csv(report)},
  };
  std::vector<std::string> done;
  for (const auto& [name, contents] : artifacts) {
    const std::string path = (fs::path(out_dir) / std::string(name)).string();
    if (absl::Status s = WriteFileAtomically(path, contents); !s.ok()) {
      for (const std::string& p : done) fs::remove(p, ec);
      return s;
    }
    done.push_back(path);
  }
  if (written != nullptr) written->insert(written->end(), done.begin(), done.end());
  return absl::OkStatus();
}

absl::StatusOr<CrossEvalMatrix> RunCrossEval(const std::string& manifest_path) {
  ASSIGN_OR_RETURN(std::string text, ReadFileToString(manifest_path));
  const Json manifest = Json::parse(text, nullptr, false);
  if (manifest.is_discarded() || !manifest.is_object()) {
    return absl::InvalidArgumentError(
        absl::StrCat(manifest_path, ": manifest is not a JSON object"));
  }
  const fs::path base = fs::path(manifest_path).parent_path();
  const auto resolve = [&base](const std::string& path) {
    const fs::path p(path);
    return (p.is_absolute() ? p : base / p).string();
  };

  struct Target {
    std::vector<HateInstance> hate;
  };
  std::map<std::string, Target> targets;
  std::vector<CrossEvalCell> cells;
  try {
    for (const Json& t : manifest.at("targets")) {
      const std::string dataset = t.at("dataset").get<std::string>();
      ASSIGN_OR_RETURN(LabelScheme scheme,
                       ResolveLabelScheme(t.at("scheme").get<std::string>()));
      ASSIGN_OR_RETURN(std::vector<CorpusRecord> corpus,
                       LoadCorpus(resolve(t.at("test_corpus").get<std::string>())));
      Target target;
      for (const CorpusRecord& record : corpus) {
        std::optional<std::string> canonical = scheme.ToCanonical(record.label);
        if (!canonical.has_value()) {
          return absl::InvalidArgumentError(absl::StrCat(
              "target \"", dataset, "\": label \"", record.label,
              "\" is not mapped by scheme \"", scheme.scheme_name, "\""));
        }
        if (scheme.IsHateEquivalent(*canonical)) {
          target.hate.push_back({record.record_id, record.label});
        }
      }
      if (!targets.emplace(dataset, std::move(target)).second) {
        return absl::InvalidArgumentError(
            absl::StrCat("target \"", dataset, "\" is listed twice"));
      }
    }
    for (const Json& s : manifest.at("sources")) {
      const std::string model = s.at("model").get<std::string>();
      ASSIGN_OR_RETURN(LabelScheme scheme,
                       ResolveLabelScheme(s.at("scheme").get<std::string>()));
      for (const auto& [dataset, path] : s.at("predictions").items()) {
        auto target = targets.find(dataset);
        if (target == targets.end()) {
          return absl::InvalidArgumentError(absl::StrCat(
              "source \"", model, "\" has predictions for unknown target \"", dataset,
              "\""));
        }
        ASSIGN_OR_RETURN(std::string predictions_text,
                         ReadFileToString(resolve(path.get<std::string>())));
        ASSIGN_OR_RETURN(PredictionSet predictions,
                         ParsePredictionRecords(predictions_text));
        ASSIGN_OR_RETURN(CrossEvalCell cell,
                         ComputeCrossEvalCell(dataset, target->second.hate,
                                              predictions, scheme));
        cell.source_model = model;
        cells.push_back(std::move(cell));
      }
    }
  } catch (const std::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat(manifest_path, ": malformed manifest: ", e.what()));
  }
  return BuildMatrix(std::move(cells));
}

std::string SerializeCrossEvalMatrix(const CrossEvalMatrix& matrix) {
  Json j;
  j["sources"] = matrix.sources;
  j["targets"] = matrix.targets;
  Json cells = Json::array();
  for (const std::string& source : matrix.sources) {
    for (const std::string& target : matrix.targets) {
      const CrossEvalCell* cell = matrix.Find(source, target);
      if (cell == nullptr) continue;
      Json c;
      c["source"] = source;
      c["target"] = target;
      c["n_hate_instances"] = cell->n_hate_instances;
      c["hate_recall_mean"] = OptionalNumber(cell->hate_recall_mean);
      c["hate_recall_std"] = OptionalNumber(cell->hate_recall_std);
      Json per_seed = Json::object();
      for (const auto& [seed, recall] : cell->per_seed_recall) per_seed[seed] = recall;
      c["per_seed_recall"] = std::move(per_seed);
      cells.push_back(std::move(c));
    }
  }
  j["cells"] = std::move(cells);
  return j.dump(2) + "\n";
}

}  // namespace defverify
