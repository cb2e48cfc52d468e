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

// Per-aspect metrics, verdicts, prediction distributions and cross-dataset
// hate recall.

#ifndef DEFVERIFY_EVALUATION_H_
#define DEFVERIFY_EVALUATION_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "defverify/definition_spec.h"
#include "defverify/diagnostic_set.h"
#include "defverify/expectation.h"
#include "defverify/prediction.h"
#include "defverify/selector.h"

namespace defverify {

struct ConfusionCounts {
  // Positive = hate-equivalent prediction; condition = gold hateful.
  size_t tp = 0;
  size_t fp = 0;
  size_t fn = 0;
  size_t tn = 0;

  bool operator==(const ConfusionCounts&) const = default;
};

struct AspectReport {
  AspectSelector selector;
  size_t n_cases = 0;
  // Cases of the slice that have an expectation.
  size_t n_expected = 0;
  size_t n_seeds = 0;
  // Correct predictions summed over seeds.
  size_t correct_total = 0;
  // Undefined (empty) for an empty slice.
  std::optional<double> accuracy_mean;
  // Population standard deviation across seeds.
  std::optional<double> accuracy_std;
  // Pooled over seeds; undefined when the denominator is zero.
  std::optional<double> precision_hate;
  std::optional<double> recall_hate;
  ConfusionCounts confusion;
  std::vector<std::pair<std::string, double>> per_seed_accuracy;
};

// Evaluates each selector over `set`. `predictions` must carry canonical
// labels and cover every case of `set` in every seed; `expectations` must
// cover every case. Correctness follows JudgePrediction.
absl::StatusOr<std::vector<AspectReport>> EvaluateAspects(
    const ExpectationTable& expectations, const PredictionSet& predictions,
    const DiagnosticSet& set, const std::vector<AspectSelector>& selectors,
    const LabelScheme& scheme);

enum class Verdict { kPass, kFail, kInfo };
// "PASS" | "FAIL" | "INFO".
absl::string_view VerdictName(Verdict verdict);

// Spec status that governs a selector (see the decisions in the README):
// target groups resolve group entry, category entry, then the TG column;
// dominant groups resolve group entry, then Do; flags and references use
// their column; all/in_group/functionality are unspecified.
AspectStatus SelectorStatus(const AspectSelector& selector,
                            const DefinitionSpec& spec,
                            const GroupVocabulary& vocabulary = GroupVocabulary::Default());

struct VerdictRow {
  AspectSelector selector;
  AspectStatus status = AspectStatus::kUnspecified;
  std::optional<double> accuracy_mean;
  size_t n_cases = 0;
  double threshold = 0.0;
  Verdict verdict = Verdict::kInfo;
};

struct VerdictTable {
  double threshold = 0.8;
  std::vector<VerdictRow> rows;

  size_t Count(Verdict verdict) const;
};

// Threshold overrides are keyed by the selector text, with or without the
// polarity suffix ("target=women/h" wins over "target=women").
using ThresholdOverrides = std::map<std::string, double>;

Verdict JudgeRow(AspectStatus status, std::optional<double> accuracy,
                 double threshold);

absl::StatusOr<VerdictTable> Verdicts(
    const std::vector<AspectReport>& reports, const DefinitionSpec& spec,
    double threshold, const ThresholdOverrides& overrides = {},
    const GroupVocabulary& vocabulary = GroupVocabulary::Default());

struct DistributionReport {
  std::string slice;
  size_t n_cases = 0;
  size_t n_predictions = 0;
  std::map<std::string, size_t> per_label_count;
  std::map<std::string, double> per_label_fraction;
};

// Label shares of the canonical predictions over `slice` x seeds. Labels in
// `labels` are always listed (possibly with zero count).
absl::StatusOr<DistributionReport> Distribution(
    const PredictionSet& predictions, const std::vector<std::string>& slice,
    const std::vector<std::string>& labels = {},
    absl::string_view slice_name = "");

struct CrossEvalCell {
  std::string source_model;
  std::string target_dataset;
  std::optional<double> hate_recall_mean;
  std::optional<double> hate_recall_std;
  size_t n_hate_instances = 0;
  std::vector<std::pair<std::string, double>> per_seed_recall;
};

struct HateInstance {
  std::string case_id;
  std::string raw_gold;
};

// Recall of `target_hate_cases` per seed, counting a prediction as
// recognized when its canonical label (mapped by `source_scheme` if needed)
// is hate-equivalent. Predictions for other ids are ignored; a target case
// without a prediction in some seed is an error.
absl::StatusOr<CrossEvalCell> ComputeCrossEvalCell(
    absl::string_view target_dataset,
    const std::vector<HateInstance>& target_hate_cases,
    const PredictionSet& predictions, const LabelScheme& source_scheme);

struct CrossEvalMatrix {
  // In order of first appearance.
  std::vector<std::string> sources;
  std::vector<std::string> targets;
  std::map<std::pair<std::string, std::string>, CrossEvalCell> cells;

  const CrossEvalCell* Find(absl::string_view source,
                            absl::string_view target) const;
};

absl::StatusOr<CrossEvalMatrix> BuildMatrix(std::vector<CrossEvalCell> cells);

}  // namespace defverify

#endif  // DEFVERIFY_EVALUATION_H_
