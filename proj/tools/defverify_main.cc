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

// Command-line entry point.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "defverify/corpus.h"
#include "defverify/definition_spec.h"
#include "defverify/diagnostic_set.h"
#include "defverify/expectation.h"
#include "defverify/file_util.h"
#include "defverify/remote_inference.h"
#include "defverify/report.h"
#include "defverify/root_cause.h"
#include "defverify/spec_format.h"
#include "defverify/subsample.h"

namespace defverify {
namespace {

constexpr char kEndpointEnv[] = "DEFVERIFY_ENDPOINT";

struct GlobalOptions {
  uint64_t seed = 0;
  double threshold = 0.8;
  std::string out;
  bool no_gate = false;
  bool include_spelling = false;
};

int Report(const absl::Status& status) {
  std::cerr << "defverify: " << status.message() << "\n";
  return 2;
}

// Writes to `path`, or stdout when `path` is empty.
int Emit(const std::string& path, const std::string& contents) {
  if (path.empty()) {
    std::cout << contents;
    return 0;
  }
  if (absl::Status s = WriteFileAtomically(path, contents); !s.ok()) return Report(s);
  std::cerr << "wrote " << path << "\n";
  return 0;
}

// --- decompose ---------------------------------------------------------------

struct DecomposeOptions {
  bool list_builtin = false;
  std::string export_name;
  std::vector<std::string> diff;
  std::string validate;
};

// Status symbols are one column wide but up to three bytes long.
std::string PadSymbol(absl::string_view symbol) {
  return absl::StrCat(symbol, "   ");
}

std::string SpecRow(const std::string& name, const DefinitionSpec& spec) {
  std::string row = absl::StrFormat("%-12s", name);
  for (AspectKind kind : kAllAspectKinds) {
    absl::StrAppend(&row, " ", PadSymbol(AspectStatusSymbol(spec.aspect(kind))));
  }
  return row;
}

int RunDecompose(const DecomposeOptions& o, const GlobalOptions& g) {
  if (o.list_builtin) {
    std::string header = absl::StrFormat("%-12s", "dataset");
    for (AspectKind kind : kAllAspectKinds) {
      absl::StrAppend(&header, " ", absl::StrFormat("%-4s", AspectCode(kind)));
    }
    std::cout << header << "\n";
    for (const auto& [name, spec] : BuiltinSpecs()) {
      std::cout << SpecRow(name, spec) << "\n";
    }
    return 0;
  }
  if (!o.export_name.empty()) {
    absl::StatusOr<DefinitionSpec> spec = BuiltinSpec(o.export_name);
    if (!spec.ok()) return Report(spec.status());
    return Emit(g.out, SerializeDefinitionSpec(*spec));
  }
  if (!o.diff.empty()) {
    absl::StatusOr<DefinitionSpec> a = ResolveDefinitionSpec(o.diff[0]);
    if (!a.ok()) return Report(a.status());
    absl::StatusOr<DefinitionSpec> b = ResolveDefinitionSpec(o.diff[1]);
    if (!b.ok()) return Report(b.status());
    const std::vector<SpecDifference> diff = SpecDiff(*a, *b);
    for (const SpecDifference& d : diff) {
      std::cout << SpecSubjectName(d.subject) << ": " << AspectStatusName(d.status_a)
                << " -> " << AspectStatusName(d.status_b) << "\n";
    }
    if (diff.empty()) std::cout << "no differences\n";
    return 0;
  }
  if (!o.validate.empty()) {
    absl::StatusOr<ParsedDefinitionSpec> parsed = ReadDefinitionSpecFile(o.validate);
    if (!parsed.ok()) {
      std::cerr << parsed.status().message() << "\n";
      return 1;
    }
    for (const std::string& w : parsed->warnings) std::cerr << "warning: " << w << "\n";
    if (absl::Status s = ValidateDefinitionSpec(parsed->spec); !s.ok()) {
      std::cerr << s.message() << "\n";
      return 1;
    }
    std::cout << o.validate << ": valid\n";
    return 0;
  }
  std::cerr << "decompose: give --list-builtin, --export, --diff or --validate\n";
  return 2;
}

// --- diagnostic set commands -------------------------------------------------

int RunValidateData(const std::string& path) {
  absl::StatusOr<LoadedDiagnosticSet> loaded = LoadDiagnosticSet(path);
  if (!loaded.ok()) {
    std::cerr << loaded.status().message() << "\n";
    return 1;
  }
  for (const std::string& w : loaded->warnings) std::cerr << "warning: " << w << "\n";
  std::cout << path << ": " << loaded->set.size() << " cases, valid\n";
  return 0;
}

int RunSummarize(const std::string& path) {
  absl::StatusOr<LoadedDiagnosticSet> loaded = LoadDiagnosticSet(path);
  if (!loaded.ok()) return Report(loaded.status());
  const DiagnosticSummary s = SummarizeDiagnosticSet(loaded->set);
  std::cout << "cases              " << s.total << "\n";
  for (const auto& [gold, count] : s.by_gold) {
    std::cout << absl::StrFormat("  %-16s %d\n", GoldLabelName(gold), count);
  }
  std::cout << absl::StrFormat("base portion       %d (%.1f%% hateful)\n", s.base_cases,
                               100.0 * s.base_hateful_fraction());
  std::cout << "extension cases    " << s.extension_cases << "\n";
  std::cout << "dominant-group     " << s.dominant_cases << "\n";
  std::cout << "spelling variants  " << s.spelling_variants << "\n";
  std::cout << "offensive slice    " << s.offensive.count << "\n\n";
  std::cout << absl::StrFormat("%-40s %8s %8s %8s\n", "aspect", "hateful", "non-hate",
                               "offens.");
  for (const auto& [aspect, counts] : s.aspect_counts) {
    std::cout << absl::StrFormat("%-40s %8d %8d %8d\n", aspect, counts[0], counts[1],
                                 counts[2]);
  }
  return 0;
}

struct ExpectOptions {
  std::string spec;
  std::string diagnostic;
  std::string scheme;
};

int RunExpect(const ExpectOptions& o, const GlobalOptions& g) {
  absl::StatusOr<DefinitionSpec> spec = ResolveDefinitionSpec(o.spec);
  if (!spec.ok()) return Report(spec.status());
  const std::string scheme_source = o.scheme.empty() ? spec->label_scheme_ref : o.scheme;
  absl::StatusOr<LabelScheme> scheme = ResolveLabelScheme(scheme_source);
  if (!scheme.ok()) return Report(scheme.status());
  absl::StatusOr<LoadedDiagnosticSet> loaded = LoadDiagnosticSet(o.diagnostic);
  if (!loaded.ok()) return Report(loaded.status());
  const DiagnosticSet set =
      g.include_spelling ? loaded->set : FilterSpelling(loaded->set);
  absl::StatusOr<ExpectationTable> table = DeriveAll(set, *spec, *scheme);
  if (!table.ok()) return Report(table.status());
  std::cerr << absl::StrFormat("%d cases, expectation coverage %.1f%%\n", table->size(),
                               100.0 * ExpectationCoverage(*table));
  return Emit(g.out, SerializeExpectationTable(*table));
}

// --- evaluate ------------------------------------------------------------------

struct EvaluateOptions {
  std::string spec;
  std::string diagnostic;
  std::string scheme;
  std::string predictions;
  std::vector<std::string> endpoints;
  std::string model_id = "remote";
  size_t batch_size = 32;
  size_t max_in_flight = 4;
  std::vector<std::string> aspects;
  std::vector<std::string> aspect_thresholds;
  std::string corpus;
  std::string lexicon;
  bool substring = false;
};

// "SEED=URL" or a bare URL; bare URLs get seeds s0, s1, ... in order.
absl::StatusOr<std::vector<EndpointSource>> ParseEndpoints(
    const std::vector<std::string>& values) {
  std::vector<EndpointSource> out;
  for (size_t i = 0; i < values.size(); ++i) {
    const std::string& v = values[i];
    const size_t eq = v.find('=');
    const size_t scheme = v.find("://");
    if (eq != std::string::npos && (scheme == std::string::npos || eq < scheme)) {
      out.push_back({v.substr(0, eq), v.substr(eq + 1)});
    } else {
      out.push_back({absl::StrCat("s", i), v});
    }
  }
  return out;
}

absl::StatusOr<ThresholdOverrides> ParseThresholds(const std::vector<std::string>& values) {
  ThresholdOverrides out;
  for (const std::string& v : values) {
    // Selectors contain '=', so the value follows the last one.
    const size_t eq = v.rfind('=');
    double value = 0.0;
    if (eq == std::string::npos || eq == 0 ||
        !absl::SimpleAtod(absl::string_view(v).substr(eq + 1), &value)) {
      return absl::InvalidArgumentError(
          absl::StrCat("--aspect-threshold \"", v, "\" is not SELECTOR=VALUE"));
    }
    out[v.substr(0, eq)] = value;
  }
  return out;
}

int RunEvaluate(const EvaluateOptions& o, const GlobalOptions& g) {
  RunConfig config;
  config.spec_source = o.spec;
  config.diagnostic_path = o.diagnostic;
  config.scheme = o.scheme;
  config.predictions_path = o.predictions;
  std::vector<std::string> endpoint_values = o.endpoints;
  if (o.predictions.empty() && endpoint_values.empty()) {
    if (const char* env = std::getenv(kEndpointEnv); env != nullptr && *env != '\0') {
      endpoint_values.push_back(env);
    }
  }
  absl::StatusOr<std::vector<EndpointSource>> endpoints = ParseEndpoints(endpoint_values);
  if (!endpoints.ok()) return Report(endpoints.status());
  config.endpoints = *endpoints;
  config.model_id = o.model_id;
  config.batch_size = o.batch_size;
  config.max_in_flight = o.max_in_flight;
  config.threshold = g.threshold;
  absl::StatusOr<ThresholdOverrides> overrides = ParseThresholds(o.aspect_thresholds);
  if (!overrides.ok()) return Report(overrides.status());
  config.aspect_thresholds = *overrides;
  config.selectors = o.aspects;
  config.out_dir = g.out.empty() ? "defverify-out" : g.out;
  config.include_spelling = g.include_spelling;
  config.no_gate = g.no_gate;
  config.corpus_path = o.corpus;
  config.lexicon_path = o.lexicon;
  config.substring_match = o.substring;

  const RunOutcome outcome = RunVerify(config);
  if (outcome.exit_code == 2) {
    std::cerr << "defverify: stage \"" << outcome.failed_stage
              << "\" failed: " << outcome.status.message() << "\n";
    return 2;
  }
  const VerdictTable& verdicts = outcome.report->verdicts;
  for (const VerdictRow& row : verdicts.rows) {
    if (row.verdict != Verdict::kFail) continue;
    std::cout << absl::StrFormat("FAIL %-40s accuracy %.3f < %.2f\n",
                                 row.selector.ToString(), row.accuracy_mean.value_or(0.0),
                                 row.threshold);
  }
  std::cout << verdicts.Count(Verdict::kFail) << " FAIL, "
            << verdicts.Count(Verdict::kPass) << " PASS, "
            << verdicts.Count(Verdict::kInfo) << " INFO\n";
  for (const std::string& path : outcome.written_files) std::cerr << "wrote " << path << "\n";
  return outcome.exit_code;
}

// --- cross-eval, report ---------------------------------------------------------

int RunCrossEvalCommand(const std::string& manifest, const GlobalOptions& g) {
  absl::StatusOr<CrossEvalMatrix> matrix = RunCrossEval(manifest);
  if (!matrix.ok()) return Report(matrix.status());
  const std::string out_dir = g.out.empty() ? "." : g.out;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const std::filesystem::path dir(out_dir);
  for (const auto& [name, contents] :
       {std::pair<std::string, std::string>{"cross_eval.json",
                                            SerializeCrossEvalMatrix(*matrix)},
        std::pair<std::string, std::string>{"fig5.csv", RenderFig5Csv(*matrix)}}) {
    if (int rc = Emit((dir / name).string(), contents); rc != 0) return rc;
  }
  std::cout << absl::StrFormat("%-16s", "source \\ target");
  for (const std::string& t : matrix->targets) std::cout << absl::StrFormat(" %12s", t);
  std::cout << "\n";
  for (const std::string& s : matrix->sources) {
    std::cout << absl::StrFormat("%-16s", s);
    for (const std::string& t : matrix->targets) {
      const CrossEvalCell* cell = matrix->Find(s, t);
      std::cout << absl::StrFormat(
          " %12s", cell != nullptr && cell->hate_recall_mean.has_value()
                       ? absl::StrFormat("%.3f", *cell->hate_recall_mean)
                       : std::string("-"));
    }
    std::cout << "\n";
  }
  return 0;
}

int RunReportCommand(const std::string& in, const GlobalOptions& g) {
  absl::StatusOr<std::string> text = ReadFileToString(in);
  if (!text.ok()) return Report(text.status());
  absl::StatusOr<RunReport> report = ParseRunReport(*text);
  if (!report.ok()) return Report(report.status());
  const std::filesystem::path dir =
      g.out.empty() ? std::filesystem::path(in).parent_path() : std::filesystem::path(g.out);
  std::error_code ec;
  if (!dir.empty()) std::filesystem::create_directories(dir, ec);
  for (const auto& [name, contents] :
       {std::pair<std::string, std::string>{"report.md", RenderMarkdown(*report)},
        std::pair<std::string, std::string>{"fig3.csv", RenderFig3Csv(*report)},
        std::pair<std::string, std::string>{"fig4.csv", RenderFig4Csv(*report)}}) {
    if (int rc = Emit((dir / name).string(), contents); rc != 0) return rc;
  }
  return 0;
}

// --- root-cause ------------------------------------------------------------------

struct RootCauseOptions {
  std::string corpus;
  std::string aspect;
  std::vector<std::string> keywords;
  bool substring = false;
  bool case_sensitive = false;
  std::string lexicon;
  std::string diagnostic;
};

int RunRootCauseCommand(const RootCauseOptions& o) {
  absl::StatusOr<std::vector<CorpusRecord>> corpus = LoadCorpus(o.corpus);
  if (!corpus.ok()) return Report(corpus.status());
  const MatchMode mode = o.substring ? MatchMode::kSubstring : MatchMode::kWholeToken;
  absl::StatusOr<KeywordQuery> query;
  if (!o.keywords.empty()) {
    query = MakeKeywordQuery(o.keywords, mode, o.case_sensitive);
  } else if (!o.aspect.empty()) {
    absl::StatusOr<AspectSelector> selector = ParseSelector(o.aspect);
    if (!selector.ok()) return Report(selector.status());
    DiagnosticSet set;
    if (!o.diagnostic.empty()) {
      absl::StatusOr<LoadedDiagnosticSet> loaded = LoadDiagnosticSet(o.diagnostic);
      if (!loaded.ok()) return Report(loaded.status());
      set = loaded->set;
    }
    Lexicon lexicon = Lexicon::Default();
    if (!o.lexicon.empty()) {
      absl::StatusOr<Lexicon> extra = Lexicon::Load(o.lexicon);
      if (!extra.ok()) return Report(extra.status());
      lexicon.Merge(*extra);
    }
    query = AspectKeywords(*selector, set, lexicon, GroupVocabulary::Default(), mode);
    if (query.ok()) query->case_sensitive = o.case_sensitive;
  } else {
    return Report(absl::InvalidArgumentError("give --aspect or --keywords"));
  }
  if (!query.ok()) return Report(query.status());
  absl::StatusOr<RootCauseReport> result = Search(*corpus, *query);
  if (!result.ok()) return Report(result.status());
  if (!o.aspect.empty()) std::cout << "aspect:   " << o.aspect << "\n";
  std::cout << "keywords: " << absl::StrJoin(result->query.keywords, ", ") << " ("
            << MatchModeName(result->query.match_mode) << ")\n";
  std::cout << absl::StrFormat("matches:  %d of %d records (%.1f%%)\n", result->matches,
                               result->corpus_size, 100.0 * result->coverage);
  for (const auto& [label, count] : result->per_label_counts) {
    std::cout << "  " << label << ": " << count << "\n";
  }
  for (const Excerpt& e : result->excerpts) {
    std::cout << "- " << e.record_id << ": " << e.snippet << "\n";
  }
  return 0;
}

// --- subsample, check-endpoint -------------------------------------------------------

struct SubsampleOptions {
  std::string corpus;
  std::string mode = "preserve-ratio";
  size_t total = 0;
  std::string minority;
  double fraction = 0.0;
};

int RunSubsample(const SubsampleOptions& o, const GlobalOptions& g) {
  absl::StatusOr<std::vector<CorpusRecord>> corpus = LoadCorpus(o.corpus);
  if (!corpus.ok()) return Report(corpus.status());
  std::vector<std::string> labels;
  for (const CorpusRecord& r : *corpus) labels.push_back(r.label);
  absl::StatusOr<std::vector<size_t>> picked;
  if (o.mode == "preserve-ratio") {
    picked = SubsamplePreserveRatio(labels, o.total, g.seed);
  } else if (o.mode == "fix-minority") {
    picked = SubsampleFixMinorityFraction(labels, o.minority, o.fraction, g.seed);
  } else {
    return Report(absl::InvalidArgumentError(
        absl::StrCat("unknown mode \"", o.mode, "\"; use preserve-ratio or fix-minority")));
  }
  if (!picked.ok()) return Report(picked.status());
  std::vector<CorpusRecord> out;
  for (size_t i : *picked) out.push_back((*corpus)[i]);
  std::cerr << out.size() << " of " << corpus->size() << " records kept\n";
  return Emit(g.out, SerializeCorpus(out));
}

int RunCheckEndpoint(const std::string& endpoint, const std::optional<size_t>& max_batch) {
  ContractOptions options;
  options.max_batch = max_batch;
  const ContractReport report = CheckClassifyContract(endpoint, options);
  for (const ContractCheck& check : report.checks) {
    std::cout << CheckOutcomeName(check.outcome) << " " << check.name;
    if (!check.detail.empty()) std::cout << ": " << check.detail;
    std::cout << "\n";
  }
  return report.passed() ? 0 : 1;
}

int Main(int argc, char** argv) {
  CLI::App app{"Verify a hate-speech classifier against its dataset's definition."};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Random seed for subsampling")->capture_default_str();
  app.add_option("--threshold", g.threshold, "Accuracy threshold for PASS, in (0, 1]")
      ->capture_default_str();
  app.add_option("--out", g.out, "Output file or directory");
  app.add_flag("--no-gate", g.no_gate, "Exit 0 even when verdicts FAIL");
  app.add_flag("--include-spelling", g.include_spelling,
               "Keep spelling-variation cases in the evaluation");

  DecomposeOptions decompose;
  CLI::App* decompose_cmd = app.add_subcommand("decompose", "Work with definition specs");
  decompose_cmd->add_flag("--list-builtin", decompose.list_builtin,
                          "Print the built-in specs as a status table");
  decompose_cmd->add_option("--export", decompose.export_name,
                            "Write a built-in spec (to --out or stdout)");
  decompose_cmd->add_option("--diff", decompose.diff, "Compare two specs")->expected(2);
  decompose_cmd->add_option("--validate", decompose.validate, "Validate a .defspec file");

  std::string data_path;
  CLI::App* validate_cmd =
      app.add_subcommand("validate-data", "Validate a diagnostic set file");
  validate_cmd->add_option("file", data_path)->required();

  CLI::App* summarize_cmd = app.add_subcommand("summarize", "Count labels and aspects");
  summarize_cmd->add_option("file", data_path)->required();

  ExpectOptions expect;
  CLI::App* expect_cmd = app.add_subcommand("expect", "Derive expected labels");
  expect_cmd->add_option("--spec", expect.spec, "Built-in name or .defspec file")
      ->required();
  expect_cmd->add_option("--diagnostic", expect.diagnostic)->required();
  expect_cmd->add_option("--scheme", expect.scheme, "Label scheme (default: the spec's)");

  EvaluateOptions evaluate;
  CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "Run the full verification");
  evaluate_cmd->add_option("--spec", evaluate.spec, "Built-in name or .defspec file")
      ->required();
  evaluate_cmd->add_option("--diagnostic", evaluate.diagnostic)->required();
  evaluate_cmd->add_option("--scheme", evaluate.scheme, "Label scheme (default: the spec's)");
  evaluate_cmd->add_option("--predictions", evaluate.predictions, "Prediction file");
  evaluate_cmd->add_option("--endpoint", evaluate.endpoints,
                           "Classify endpoint, SEED=URL or URL (repeatable); defaults to $" +
                               std::string(kEndpointEnv));
  evaluate_cmd->add_option("--model-id", evaluate.model_id)->capture_default_str();
  evaluate_cmd->add_option("--batch-size", evaluate.batch_size)->capture_default_str();
  evaluate_cmd->add_option("--max-in-flight", evaluate.max_in_flight)->capture_default_str();
  evaluate_cmd->add_option("--aspects", evaluate.aspects,
                           "Selectors to evaluate (default: all)");
  evaluate_cmd->add_option("--aspect-threshold", evaluate.aspect_thresholds,
                           "Per-aspect threshold, SELECTOR=VALUE (repeatable)");
  evaluate_cmd->add_option("--corpus", evaluate.corpus,
                           "Training corpus for root-cause search on FAIL rows");
  evaluate_cmd->add_option("--lexicon", evaluate.lexicon, "Extra search terms (JSON)");
  evaluate_cmd->add_flag("--substring", evaluate.substring,
                         "Match keywords as substrings");

  std::string manifest;
  CLI::App* cross_cmd = app.add_subcommand("cross-eval", "Cross-dataset hate recall matrix");
  cross_cmd->add_option("--manifest", manifest)->required();

  RootCauseOptions root;
  CLI::App* root_cmd = app.add_subcommand("root-cause", "Search a corpus for an aspect");
  root_cmd->add_option("--corpus", root.corpus)->required();
  root_cmd->add_option("--aspect", root.aspect, "Selector to derive keywords from");
  root_cmd->add_option("--keywords", root.keywords, "Explicit keywords");
  root_cmd->add_flag("--substring", root.substring);
  root_cmd->add_flag("--case-sensitive", root.case_sensitive);
  root_cmd->add_option("--lexicon", root.lexicon, "Extra search terms (JSON)");
  root_cmd->add_option("--diagnostic", root.diagnostic,
                       "Diagnostic set used to find the groups an aspect covers");

  std::string report_in;
  CLI::App* report_cmd = app.add_subcommand("report", "Re-render report.md and CSVs");
  report_cmd->add_option("--in", report_in, "report.json")->required();

  SubsampleOptions subsample;
  CLI::App* subsample_cmd = app.add_subcommand("subsample", "Subsample a training corpus");
  subsample_cmd->add_option("--corpus", subsample.corpus)->required();
  subsample_cmd->add_option("--mode", subsample.mode)
      ->check(CLI::IsMember({"preserve-ratio", "fix-minority"}))
      ->capture_default_str();
  subsample_cmd->add_option("--total", subsample.total, "Target size (preserve-ratio)");
  subsample_cmd->add_option("--minority", subsample.minority,
                            "Minority label (fix-minority)");
  subsample_cmd->add_option("--fraction", subsample.fraction,
                            "Minority fraction (fix-minority)");

  std::string endpoint;
  std::optional<size_t> max_batch;
  CLI::App* check_cmd =
      app.add_subcommand("check-endpoint", "Run the classify contract checks");
  check_cmd->add_option("--endpoint", endpoint, "Defaults to $" + std::string(kEndpointEnv));
  check_cmd->add_option("--max-batch", max_batch,
                        "Server batch limit; enables the oversized batch check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (decompose_cmd->parsed()) return RunDecompose(decompose, g);
  if (validate_cmd->parsed()) return RunValidateData(data_path);
  if (summarize_cmd->parsed()) return RunSummarize(data_path);
  if (expect_cmd->parsed()) return RunExpect(expect, g);
  if (evaluate_cmd->parsed()) return RunEvaluate(evaluate, g);
  if (cross_cmd->parsed()) return RunCrossEvalCommand(manifest, g);
  if (root_cmd->parsed()) return RunRootCauseCommand(root);
  if (report_cmd->parsed()) return RunReportCommand(report_in, g);
  if (subsample_cmd->parsed()) return RunSubsample(subsample, g);
  if (check_cmd->parsed()) {
    if (endpoint.empty()) {
      if (const char* env = std::getenv(kEndpointEnv); env != nullptr) endpoint = env;
    }
    if (endpoint.empty()) return Report(absl::InvalidArgumentError("no endpoint given"));
    return RunCheckEndpoint(endpoint, max_batch);
  }
  return 2;
}

}  // namespace
}  // namespace defverify

int main(int argc, char** argv) { return defverify::Main(argc, argv); }
