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

#include "defverify/evaluation.h"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "defverify/status_macros.h"

namespace defverify {
namespace {

struct SeedStats {
  std::optional<double> mean;
  std::optional<double> std;
  std::vector<std::pair<std::string, double>> per_seed;
};

// Mean and population std of hits[s] / n over seeds, from integer sums so
// the mean equals the pooled ratio exactly and a constant sequence has std 0.
SeedStats SummarizeSeeds(const std::vector<std::string>& seeds,
                         const std::vector<uint64_t>& hits, uint64_t n) {
  SeedStats stats;
  if (n == 0 || seeds.empty()) return stats;
  const uint64_t s = seeds.size();
  uint64_t sum = 0;
  unsigned __int128 sum_sq = 0;
  for (size_t i = 0; i < seeds.size(); ++i) {
    sum += hits[i];
    sum_sq += static_cast<unsigned __int128>(hits[i]) * hits[i];
    stats.per_seed.emplace_back(seeds[i], static_cast<double>(hits[i]) /
                                              static_cast<double>(n));
  }
  stats.mean = static_cast<double>(sum) / static_cast<double>(s * n);
  const unsigned __int128 numerator =
      static_cast<unsigned __int128>(s) * sum_sq -
      static_cast<unsigned __int128>(sum) * sum;
  const double denominator = static_cast<double>(s) * static_cast<double>(s) *
                             static_cast<double>(n) * static_cast<double>(n);
  stats.std = std::sqrt(static_cast<double>(numerator) / denominator);
  return stats;
}

std::optional<double> Ratio(size_t numerator, size_t denominator) {
  if (denominator == 0) return std::nullopt;
  return static_cast<double>(numerator) / static_cast<double>(denominator);
}

absl::StatusOr<std::string> CanonicalLabel(const PredictionRecord& record,
                                           const LabelScheme* scheme) {
  if (record.canonical_label.has_value()) return *record.canonical_label;
  if (scheme != nullptr) {
    if (std::optional<std::string> label = scheme->ToCanonical(record.raw_label)) {
      return *label;
    }
    return absl::InvalidArgumentError(
        absl::StrCat("raw label \"", record.raw_label, "\" of case \"",
                     record.case_id, "\" is not mapped by scheme \"",
                     scheme->scheme_name, "\""));
  }
  return absl::FailedPreconditionError(absl::StrCat(
      "prediction for case \"", record.case_id, "\" has no canonical label"));
}

std::string WithoutPolarity(const AspectSelector& selector) {
  return selector.WithPolarity(Polarity::kAll).ToString();
}

absl::Status CheckThreshold(double threshold, absl::string_view what) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat(what, " ", threshold, " is not in (0, 1]"));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<std::vector<AspectReport>> EvaluateAspects(
    const ExpectationTable& expectations, const PredictionSet& predictions,
    const DiagnosticSet& set, const std::vector<AspectSelector>& selectors,
    const LabelScheme& scheme) {
  const std::vector<std::string> seeds(predictions.seeds().begin(),
                                       predictions.seeds().end());
  const size_t n = set.size();
  const size_t s = seeds.size();
  if (n > 0 && s == 0) {
    return absl::InvalidArgumentError("no predictions to evaluate");
  }
  // Row-major [case][seed].
  std::vector<uint8_t> correct(n * s);
  std::vector<uint8_t> predicted_hate(n * s);
  std::vector<uint8_t> has_expectation(n);
  for (size_t i = 0; i < n; ++i) {
    const DiagnosticCase& c = set.cases()[i];
    const Expectation* e = expectations.Find(c.case_id);
    if (e == nullptr) {
      return absl::InvalidArgumentError(
          absl::StrCat("no expectation for case \"", c.case_id, "\""));
    }
    has_expectation[i] = e->has_expectation();
    for (size_t j = 0; j < s; ++j) {
      const PredictionRecord* record = predictions.Find(c.case_id, seeds[j]);
      if (record == nullptr) {
        return absl::InvalidArgumentError(absl::StrCat(
            "seed \"", seeds[j], "\" has no prediction for case \"", c.case_id, "\""));
      }
      ASSIGN_OR_RETURN(std::string label, CanonicalLabel(*record, nullptr));
      correct[i * s + j] = JudgePrediction(label, *e, scheme).correct;
      predicted_hate[i * s + j] = scheme.IsHateEquivalent(label);
    }
  }

  std::vector<AspectReport> reports;
  reports.reserve(selectors.size());
  std::vector<uint64_t> hits(s);
  for (const AspectSelector& selector : selectors) {
    AspectReport report;
    report.selector = selector;
    report.n_seeds = s;
    std::fill(hits.begin(), hits.end(), 0);
    for (size_t i = 0; i < n; ++i) {
      const DiagnosticCase& c = set.cases()[i];
      if (!selector.Matches(c)) continue;
      ++report.n_cases;
      report.n_expected += has_expectation[i];
      const bool gold_hate = c.gold == GoldLabel::kHateful;
      for (size_t j = 0; j < s; ++j) {
        hits[j] += correct[i * s + j];
        const bool hate = predicted_hate[i * s + j];
        if (hate && gold_hate) {
          ++report.confusion.tp;
        } else if (hate) {
          ++report.confusion.fp;
        } else if (gold_hate) {
          ++report.confusion.fn;
        } else {
          ++report.confusion.tn;
        }
      }
    }
    for (uint64_t h : hits) report.correct_total += h;
    SeedStats stats = SummarizeSeeds(seeds, hits, report.n_cases);
    report.accuracy_mean = stats.mean;
    report.accuracy_std = stats.std;
    report.per_seed_accuracy = std::move(stats.per_seed);
    report.precision_hate =
        Ratio(report.confusion.tp, report.confusion.tp + report.confusion.fp);
    report.recall_hate =
        Ratio(report.confusion.tp, report.confusion.tp + report.confusion.fn);
    reports.push_back(std::move(report));
  }
  return reports;
}

absl::string_view VerdictName(Verdict verdict) {
  switch (verdict) {
    case Verdict::kPass:
      return "PASS";
    case Verdict::kFail:
      return "FAIL";
    case Verdict::kInfo:
      return "INFO";
  }
  return "INFO";
}

AspectStatus SelectorStatus(const AspectSelector& selector,
                            const DefinitionSpec& spec,
                            const GroupVocabulary& vocabulary) {
  const bool tg_excluded =
      spec.aspect(AspectKind::kTargetGroups) == AspectStatus::kExcluded;
  switch (selector.kind) {
    case SelectorKind::kAll:
    case SelectorKind::kInGroup:
    case SelectorKind::kFunctionality:
      return AspectStatus::kUnspecified;
    case SelectorKind::kTargetGroup: {
      if (std::optional<AspectStatus> status = spec.GroupStatus(selector.value)) {
        return *status;
      }
      std::optional<TargetGroupId> group = vocabulary.Find(selector.value);
      if (!group.has_value()) return AspectStatus::kUnspecified;
      if (tg_excluded) return AspectStatus::kExcluded;
      if (group->dominant) return spec.aspect(AspectKind::kDominance);
      return spec.CategoryStatus(group->category).value_or(AspectStatus::kUnspecified);
    }
    case SelectorKind::kCategory: {
      if (tg_excluded) return AspectStatus::kExcluded;
      absl::StatusOr<TargetCategory> category = ParseTargetCategory(selector.value);
      if (!category.ok()) return AspectStatus::kUnspecified;
      return spec.CategoryStatus(*category).value_or(AspectStatus::kUnspecified);
    }
    case SelectorKind::kDominance:
      return selector.value == "true" ? spec.aspect(AspectKind::kDominance)
                                      : AspectStatus::kUnspecified;
    case SelectorKind::kExplicitReference: {
      absl::StatusOr<ExplicitReference> ref = ParseExplicitReference(selector.value);
      return ref.ok() ? spec.aspect(AspectFor(*ref)) : AspectStatus::kUnspecified;
    }
    case SelectorKind::kIncitement: {
      absl::StatusOr<Incitement> incitement = ParseIncitement(selector.value);
      return incitement.ok() ? spec.aspect(AspectFor(*incitement))
                             : AspectStatus::kUnspecified;
    }
    case SelectorKind::kGroupInsult:
      return selector.value == "true" ? spec.aspect(AspectKind::kGroupInsult)
                                      : AspectStatus::kUnspecified;
  }
  return AspectStatus::kUnspecified;
}

size_t VerdictTable::Count(Verdict verdict) const {
  return std::count_if(rows.begin(), rows.end(),
                       [verdict](const VerdictRow& r) { return r.verdict == verdict; });
}

Verdict JudgeRow(AspectStatus status, std::optional<double> accuracy,
                 double threshold) {
  if (status == AspectStatus::kUnspecified || !accuracy.has_value()) {
    return Verdict::kInfo;
  }
  return *accuracy >= threshold ? Verdict::kPass : Verdict::kFail;
}

absl::StatusOr<VerdictTable> Verdicts(const std::vector<AspectReport>& reports,
                                      const DefinitionSpec& spec, double threshold,
                                      const ThresholdOverrides& overrides,
                                      const GroupVocabulary& vocabulary) {
  RETURN_IF_ERROR(CheckThreshold(threshold, "threshold"));
  for (const auto& [key, value] : overrides) {
    RETURN_IF_ERROR(CheckThreshold(value, absl::StrCat("threshold for \"", key, "\"")));
  }
  VerdictTable table;
  table.threshold = threshold;
  for (const AspectReport& report : reports) {
    VerdictRow row;
    row.selector = report.selector;
    row.status = SelectorStatus(report.selector, spec, vocabulary);
    row.accuracy_mean = report.accuracy_mean;
    row.n_cases = report.n_cases;
    row.threshold = threshold;
    if (auto it = overrides.find(report.selector.ToString()); it != overrides.end()) {
      row.threshold = it->second;
    } else if (auto base = overrides.find(WithoutPolarity(report.selector));
               base != overrides.end()) {
      row.threshold = base->second;
    }
    row.verdict = JudgeRow(row.status, row.accuracy_mean, row.threshold);
    table.rows.push_back(std::move(row));
  }
  return table;
}

absl::StatusOr<DistributionReport> Distribution(
    const PredictionSet& predictions, const std::vector<std::string>& slice,
    const std::vector<std::string>& labels, absl::string_view slice_name) {
  if (slice.empty()) {
    return absl::InvalidArgumentError("distribution over an empty slice");
  }
  DistributionReport report;
  report.slice = std::string(slice_name);
  report.n_cases = slice.size();
  for (const std::string& label : labels) report.per_label_count[label] = 0;
  for (const std::string& seed : predictions.seeds()) {
    for (const std::string& id : slice) {
      const PredictionRecord* record = predictions.Find(id, seed);
      if (record == nullptr) {
        return absl::InvalidArgumentError(absl::StrCat(
            "seed \"", seed, "\" has no prediction for case \"", id, "\""));
      }
      ASSIGN_OR_RETURN(std::string label, CanonicalLabel(*record, nullptr));
      ++report.per_label_count[label];
      ++report.n_predictions;
    }
  }
  if (report.n_predictions == 0) {
    return absl::InvalidArgumentError("distribution without predictions");
  }
  for (const auto& [label, count] : report.per_label_count) {
    report.per_label_fraction[label] =
        static_cast<double>(count) / static_cast<double>(report.n_predictions);
  }
  return report;
}

absl::StatusOr<CrossEvalCell> ComputeCrossEvalCell(
    absl::string_view target_dataset,
    const std::vector<HateInstance>& target_hate_cases,
    const PredictionSet& predictions, const LabelScheme& source_scheme) {
  if (target_hate_cases.empty()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "target \"", target_dataset, "\" has no hate instances"));
  }
  if (predictions.seeds().empty()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "no predictions for target \"", target_dataset, "\""));
  }
  const std::vector<std::string> seeds(predictions.seeds().begin(),
                                       predictions.seeds().end());
  std::vector<uint64_t> recognized(seeds.size());
  std::vector<std::string> missing;
  for (size_t j = 0; j < seeds.size(); ++j) {
    for (const HateInstance& instance : target_hate_cases) {
      const PredictionRecord* record = predictions.Find(instance.case_id, seeds[j]);
      if (record == nullptr) {
        if (missing.size() < 10) {
          missing.push_back(absl::StrCat(seeds[j], "/", instance.case_id));
        }
        continue;
      }
      ASSIGN_OR_RETURN(std::string label, CanonicalLabel(*record, &source_scheme));
      recognized[j] += source_scheme.IsHateEquivalent(label);
    }
  }
  if (!missing.empty()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "coverage gap for target \"", target_dataset, "\": no prediction for ",
        absl::StrJoin(missing, ", ")));
  }
  CrossEvalCell cell;
  cell.source_model = predictions.model_id();
  cell.target_dataset = std::string(target_dataset);
  cell.n_hate_instances = target_hate_cases.size();
  SeedStats stats = SummarizeSeeds(seeds, recognized, target_hate_cases.size());
  cell.hate_recall_mean = stats.mean;
  cell.hate_recall_std = stats.std;
  cell.per_seed_recall = std::move(stats.per_seed);
  return cell;
}

const CrossEvalCell* CrossEvalMatrix::Find(absl::string_view source,
                                           absl::string_view target) const {
  auto it = cells.find({std::string(source), std::string(target)});
  return it == cells.end() ? nullptr : &it->second;
}

absl::StatusOr<CrossEvalMatrix> BuildMatrix(std::vector<CrossEvalCell> cells) {
  CrossEvalMatrix matrix;
  for (CrossEvalCell& cell : cells) {
    const auto key = std::make_pair(cell.source_model, cell.target_dataset);
    if (matrix.cells.contains(key)) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate cross-eval cell (source \"", cell.source_model,
                       "\", target \"", cell.target_dataset, "\")"));
    }
    if (std::find(matrix.sources.begin(), matrix.sources.end(), key.first) ==
        matrix.sources.end()) {
      matrix.sources.push_back(key.first);
    }
    if (std::find(matrix.targets.begin(), matrix.targets.end(), key.second) ==
        matrix.targets.end()) {
      matrix.targets.push_back(key.second);
    }
    matrix.cells.emplace(key, std::move(cell));
  }
  return matrix;
}

}  // namespace defverify
