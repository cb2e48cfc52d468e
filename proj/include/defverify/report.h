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

// End-to-end verification runs and their artifacts: report.json, report.md,
// fig3.csv (per-aspect metrics), fig4.csv (offensive-slice distribution)
// and, for cross-dataset runs, fig5.csv.

#ifndef DEFVERIFY_REPORT_H_
#define DEFVERIFY_REPORT_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "defverify/definition_spec.h"
#include "defverify/evaluation.h"
#include "defverify/root_cause.h"

namespace defverify {

inline constexpr absl::string_view kToolkitVersion = "0.1.0";
inline constexpr absl::string_view kReportFormat = "defverify-report/1";

struct EndpointSource {
  std::string seed_id;
  std::string url;
};

struct RunConfig {
  // Built-in dataset name or .defspec path.
  std::string spec_source;
  std::string diagnostic_path;
  // Built-in scheme name or JSON path; empty means the spec's scheme.
  std::string scheme;
  // Exactly one prediction source: a prediction file or endpoints.
  std::string predictions_path;
  std::vector<EndpointSource> endpoints;
  std::string model_id = "remote";
  size_t batch_size = 32;
  size_t max_in_flight = 4;
  double threshold = 0.8;
  ThresholdOverrides aspect_thresholds;
  // Selector texts; empty or {"all"} selects the default set.
  std::vector<std::string> selectors;
  std::string out_dir;
  bool include_spelling = false;
  bool no_gate = false;
  // Optional root-cause search over a training corpus for FAIL rows.
  std::string corpus_path;
  std::string lexicon_path;
  bool substring_match = false;
};

absl::Status ValidateRunConfig(const RunConfig& config);

struct InputDigest {
  std::string name;
  std::string source;
  std::string sha256;
};

struct RunReport {
  // Metadata, excluded from determinism comparisons.
  std::string generated_at;
  std::vector<std::pair<std::string, double>> stage_seconds;

  std::string toolkit_version = std::string(kToolkitVersion);
  RunConfig config;
  std::vector<InputDigest> inputs;
  DefinitionSpec spec;
  std::string scheme_name;
  std::string model_id;
  std::vector<std::string> seeds;

  size_t diagnostic_cases = 0;
  size_t evaluated_cases = 0;
  size_t spelling_removed = 0;
  std::vector<std::string> warnings;

  size_t expect_count = 0;
  size_t no_expectation_count = 0;
  double expectation_coverage = 0.0;

  std::vector<AspectReport> aspects;
  std::optional<std::string> aspects_skipped;
  VerdictTable verdicts;

  std::optional<DistributionReport> offensive;
  std::optional<std::string> offensive_skipped;
  // Published slice sizes disagree; set when the slice matches neither.
  std::optional<std::string> offensive_note;

  std::vector<RootCauseReport> root_cause;
  std::vector<std::string> root_cause_notes;
  std::optional<std::string> root_cause_skipped;

  std::optional<std::string> cross_eval_skipped;
};

struct RunOutcome {
  // 0: no FAIL (or gating disabled); 1: FAIL verdicts; 2: stage error.
  int exit_code = 2;
  std::string failed_stage;
  absl::Status status;
  std::optional<RunReport> report;
  std::vector<std::string> written_files;
};

// load spec -> label scheme -> diagnostic set (spelling filter) ->
// expectations -> prediction ingest -> evaluate -> verdicts -> offensive
// distribution -> root cause -> write outputs. A failing stage aborts the run
// and removes any artifact written by it.
RunOutcome RunVerify(const RunConfig& config);

// Serialized report; `include_metadata=false` drops the metadata object so
// two runs can be compared byte for byte.
std::string SerializeRunReport(const RunReport& report, bool include_metadata = true);
absl::StatusOr<RunReport> ParseRunReport(absl::string_view text);

// Human-readable summary. Deterministic and free of timestamps.
std::string RenderMarkdown(const RunReport& report);

// aspect,polarity,n,accuracy_mean,accuracy_std,precision,recall,status,verdict
std::string RenderFig3Csv(const RunReport& report);
// slice,label,count,fraction
std::string RenderFig4Csv(const RunReport& report);
// source,target,n_hate_instances,hate_recall_mean,hate_recall_std; every
// source x target pair, absent cells with empty fields.
std::string RenderFig5Csv(const CrossEvalMatrix& matrix);

// Writes report.json, report.md, fig3.csv and fig4.csv into `out_dir`
// atomically. On failure the files written so far are removed.
absl::Status WriteRunArtifacts(const RunReport& report, const std::string& out_dir,
                               std::vector<std::string>* written);

// Cross-dataset manifest (docs/cross-eval-manifest.md):
// {"targets": [{"dataset", "test_corpus", "scheme"}],
//  "sources": [{"model", "scheme", "predictions": {dataset: path}}]}
// Paths are relative to the manifest's directory.
absl::StatusOr<CrossEvalMatrix> RunCrossEval(const std::string& manifest_path);
std::string SerializeCrossEvalMatrix(const CrossEvalMatrix& matrix);

}  // namespace defverify

#endif  // DEFVERIFY_REPORT_H_
