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

#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace defverify {
namespace {

using ::testing::HasSubstr;
using testing::MakeCase;

constexpr double kTol = 1e-12;

const LabelScheme& Scheme(absl::string_view name) {
  return BuiltinSchemes().at(std::string(name));
}

const DefinitionSpec& Builtin(absl::string_view name) {
  return BuiltinSpecs().at(std::string(name));
}

AspectSelector Sel(absl::string_view text) {
  absl::StatusOr<AspectSelector> s = ParseSelector(text);
  if (!s.ok()) ADD_FAILURE() << s.status();
  return *s;
}

std::vector<AspectReport> Evaluate(const DiagnosticSet& set, const DefinitionSpec& spec,
                                   const PredictionSet& raw,
                                   const std::vector<AspectSelector>& selectors) {
  const LabelScheme& scheme = Scheme(spec.label_scheme_ref);
  const ExpectationTable table = *DeriveAll(set, spec, scheme);
  absl::StatusOr<std::vector<AspectReport>> reports =
      EvaluateAspects(table, *MapLabels(raw, scheme), set, selectors, scheme);
  if (!reports.ok()) ADD_FAILURE() << reports.status();
  return *reports;
}

TEST(EvaluateAspects, AllCorrectGivesOne) {
  std::vector<DiagnosticCase> cases;
  std::vector<std::string> labels;
  for (int i = 0; i < 6; ++i) {
    cases.push_back(MakeCase(absl::StrCat("w", i), GoldLabel::kHateful, "women"));
    labels.push_back("hate");
  }
  const DiagnosticSet set = testing::MakeSet(cases);
  const std::vector<AspectReport> reports =
      Evaluate(set, Builtin("DGHS"), testing::MakePredictions(set.Ids(), {labels, labels, labels}),
               {Sel("target=women")});
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(reports[0].n_cases, 6u);
  EXPECT_EQ(reports[0].n_seeds, 3u);
  EXPECT_EQ(reports[0].accuracy_mean, 1.0);
  EXPECT_EQ(reports[0].accuracy_std, 0.0);
  EXPECT_EQ(reports[0].precision_hate, 1.0);
  EXPECT_EQ(reports[0].recall_hate, 1.0);
  EXPECT_EQ(reports[0].confusion, (ConfusionCounts{18, 0, 0, 0}));
}

TEST(EvaluateAspects, SevenOfTenInEverySeed) {
  std::vector<DiagnosticCase> cases;
  std::vector<std::string> labels;
  for (int i = 0; i < 10; ++i) {
    cases.push_back(MakeCase(absl::StrCat("c", i), GoldLabel::kHateful, "women"));
    labels.push_back(i < 7 ? "hate" : "neutral");
  }
  const DiagnosticSet set = testing::MakeSet(cases);
  const std::vector<std::vector<std::string>> seeds(5, labels);
  const AspectReport r = Evaluate(set, Builtin("DGHS"), testing::MakePredictions(set.Ids(), seeds),
                                  {Sel("target=women/h")})[0];
  EXPECT_NEAR(*r.accuracy_mean, 0.7, kTol);
  EXPECT_EQ(*r.accuracy_std, 0.0);
  EXPECT_EQ(r.correct_total, 35u);
  EXPECT_EQ(r.per_seed_accuracy.size(), 5u);
  EXPECT_NEAR(*r.recall_hate, 0.7, kTol);
  EXPECT_FALSE(r.precision_hate == std::nullopt);
}

TEST(EvaluateAspects, EmptySliceAndUndefinedRatios) {
  const DiagnosticSet set = testing::MakeSet({MakeCase("a", GoldLabel::kNonHateful)});
  const std::vector<AspectReport> reports =
      Evaluate(set, Builtin("DGHS"), testing::MakePredictions({"a"}, {{"neutral"}}),
               {Sel("target=women"), Sel("all")});
  EXPECT_EQ(reports[0].n_cases, 0u);
  EXPECT_FALSE(reports[0].accuracy_mean.has_value());
  EXPECT_FALSE(reports[0].accuracy_std.has_value());
  EXPECT_FALSE(reports[1].precision_hate.has_value());
  EXPECT_FALSE(reports[1].recall_hate.has_value());
  EXPECT_EQ(reports[1].accuracy_mean, 1.0);
}

TEST(EvaluateAspects, RejectsIncompleteInputs) {
  const DiagnosticSet set = testing::MakeSet(
      {MakeCase("a", GoldLabel::kNonHateful), MakeCase("b", GoldLabel::kNonHateful)});
  const LabelScheme& scheme = Scheme("binary");
  const ExpectationTable table = *DeriveAll(set, Builtin("DGHS"), scheme);
  const PredictionSet partial = *MapLabels(testing::MakePredictions({"a"}, {{"hate"}}), scheme);
  absl::StatusOr<std::vector<AspectReport>> r =
      EvaluateAspects(table, partial, set, {Sel("all")}, scheme);
  ASSERT_FALSE(r.ok());
  EXPECT_THAT(r.status().message(), HasSubstr("\"b\""));
  EXPECT_FALSE(EvaluateAspects(table, PredictionSet(), set, {Sel("all")}, scheme).ok());
  const PredictionSet raw = testing::MakePredictions({"a", "b"}, {{"hate", "hate"}});
  EXPECT_FALSE(EvaluateAspects(table, raw, set, {Sel("all")}, scheme).ok());
}

// Brute-force oracle: per-seed accuracy in floating point, mean of those,
// two-pass population std, pooled precision and recall.
struct OracleRow {
  size_t n = 0;
  std::optional<double> mean, std, precision, recall;
};

OracleRow Oracle(const DiagnosticSet& set, const ExpectationTable& table,
                 const PredictionSet& predictions, const AspectSelector& selector,
                 const LabelScheme& scheme) {
  OracleRow row;
  std::vector<const DiagnosticCase*> slice;
  for (const DiagnosticCase& c : set.cases()) {
    if (selector.Matches(c)) slice.push_back(&c);
  }
  row.n = slice.size();
  if (slice.empty()) return row;
  std::vector<double> per_seed;
  double tp = 0, fp = 0, fn = 0;
  for (const std::string& seed : predictions.seeds()) {
    double hits = 0;
    for (const DiagnosticCase* c : slice) {
      const std::string& label = *predictions.Find(c->case_id, seed)->canonical_label;
      const Expectation& e = *table.Find(c->case_id);
      const bool hate = scheme.IsHateEquivalent(label);
      const bool gold = c->gold == GoldLabel::kHateful;
      bool ok;
      if (e.has_expectation()) {
        ok = false;
        for (const std::string& l : e.labels) ok = ok || l == label;
      } else {
        ok = hate == gold;
      }
      hits += ok ? 1 : 0;
      tp += hate && gold;
      fp += hate && !gold;
      fn += !hate && gold;
    }
    per_seed.push_back(hits / slice.size());
  }
  double mean = std::accumulate(per_seed.begin(), per_seed.end(), 0.0) / per_seed.size();
  double var = 0;
  for (double a : per_seed) var += (a - mean) * (a - mean);
  row.mean = mean;
  row.std = std::sqrt(var / per_seed.size());
  if (tp + fp > 0) row.precision = tp / (tp + fp);
  if (tp + fn > 0) row.recall = tp / (tp + fn);
  return row;
}

void ExpectClose(std::optional<double> actual, std::optional<double> expected,
                 const std::string& what) {
  ASSERT_EQ(actual.has_value(), expected.has_value()) << what;
  if (actual.has_value()) ASSERT_NEAR(*actual, *expected, kTol) << what;
}

TEST(EvaluateAspects, MatchesBruteForceOracle) {
  testing::Rng rng(9);
  for (int trial = 0; trial < 150; ++trial) {
    const DiagnosticSet set = testing::RandomSet(rng, testing::Uniform(rng, 1, 80));
    const DefinitionSpec spec = testing::RandomValidSpec(rng);
    const LabelScheme& scheme = Scheme(spec.label_scheme_ref);
    const ExpectationTable table = *DeriveAll(set, spec, scheme);
    const PredictionSet predictions = *MapLabels(
        testing::RandomPredictions(rng, set.Ids(), testing::Uniform(rng, 1, 6),
                                   scheme.canonical_labels),
        scheme);
    std::vector<AspectSelector> selectors = DefaultSelectors(set);
    selectors.push_back(Sel("all"));
    selectors.push_back(Sel("all/off"));
    const std::vector<AspectReport> reports =
        *EvaluateAspects(table, predictions, set, selectors, scheme);
    ASSERT_EQ(reports.size(), selectors.size());
    for (size_t i = 0; i < selectors.size(); ++i) {
      const std::string what = selectors[i].ToString();
      const OracleRow oracle = Oracle(set, table, predictions, selectors[i], scheme);
      ASSERT_EQ(reports[i].selector, selectors[i]);
      ASSERT_EQ(reports[i].n_cases, oracle.n) << what;
      ExpectClose(reports[i].accuracy_mean, oracle.mean, what);
      ExpectClose(reports[i].accuracy_std, oracle.std, what);
      ExpectClose(reports[i].precision_hate, oracle.precision, what);
      ExpectClose(reports[i].recall_hate, oracle.recall, what);
      const ConfusionCounts& c = reports[i].confusion;
      ASSERT_EQ(c.tp + c.fp + c.fn + c.tn, oracle.n * predictions.seeds().size());
    }
  }
}

TEST(EvaluateAspects, SeedOrderDoesNotMatter) {
  testing::Rng rng(10);
  const DiagnosticSet set = testing::RandomSet(rng, 50);
  const DefinitionSpec& spec = Builtin("DGHS");
  std::vector<std::vector<std::string>> labels(4);
  for (auto& seed : labels) {
    for (size_t i = 0; i < set.size(); ++i) {
      seed.push_back(testing::Pick(rng, std::vector<std::string>{"hate", "neutral"}));
    }
  }
  auto reversed = labels;
  std::reverse(reversed.begin(), reversed.end());
  const auto a = Evaluate(set, spec, testing::MakePredictions(set.Ids(), labels), {Sel("all")});
  const auto b = Evaluate(set, spec, testing::MakePredictions(set.Ids(), reversed), {Sel("all")});
  EXPECT_EQ(a[0].accuracy_mean, b[0].accuracy_mean);
  EXPECT_NEAR(*a[0].accuracy_std, *b[0].accuracy_std, kTol);
}

TEST(SelectorStatus, Resolution) {
  const DefinitionSpec& dghs = Builtin("DGHS");
  EXPECT_EQ(SelectorStatus(Sel("target=women"), dghs), AspectStatus::kIncluded);
  EXPECT_EQ(SelectorStatus(Sel("target=white people/h"), dghs), AspectStatus::kExcluded);
  EXPECT_EQ(SelectorStatus(Sel("dominance"), dghs), AspectStatus::kExcluded);
  EXPECT_EQ(SelectorStatus(Sel("dominance=false"), dghs), AspectStatus::kUnspecified);
  EXPECT_EQ(SelectorStatus(Sel("category=race"), dghs), AspectStatus::kIncluded);
  EXPECT_EQ(SelectorStatus(Sel("all"), dghs), AspectStatus::kUnspecified);
  EXPECT_EQ(SelectorStatus(Sel("in_group"), dghs), AspectStatus::kUnspecified);
  const DefinitionSpec& davidson = Builtin("Davidson");
  EXPECT_EQ(SelectorStatus(Sel("target=gay people"), davidson), AspectStatus::kUnspecified);
  EXPECT_EQ(SelectorStatus(Sel("incites=violence"), davidson), AspectStatus::kIncluded);
  EXPECT_EQ(SelectorStatus(Sel("ref=slur"), davidson), AspectStatus::kUnspecified);
  EXPECT_EQ(SelectorStatus(Sel("group_insult"), davidson), AspectStatus::kIncluded);
  const DefinitionSpec& th = Builtin("TalatHovy");
  EXPECT_EQ(SelectorStatus(Sel("target=gay people"), th), AspectStatus::kExcluded);
}

TEST(JudgeRow, Examples) {
  EXPECT_EQ(JudgeRow(AspectStatus::kIncluded, 0.9, 0.8), Verdict::kPass);
  EXPECT_EQ(JudgeRow(AspectStatus::kIncluded, 0.8, 0.8), Verdict::kPass);
  EXPECT_EQ(JudgeRow(AspectStatus::kExcluded, 0.79, 0.8), Verdict::kFail);
  EXPECT_EQ(JudgeRow(AspectStatus::kUnspecified, 0.1, 0.8), Verdict::kInfo);
  EXPECT_EQ(JudgeRow(AspectStatus::kIncluded, std::nullopt, 0.8), Verdict::kInfo);
  EXPECT_EQ(VerdictName(Verdict::kFail), "FAIL");
}

TEST(JudgeRow, MonotoneInAccuracyAndThreshold) {
  testing::Rng rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 5000; ++i) {
    const AspectStatus status = testing::RandomStatus(rng);
    const double a1 = unit(rng), a2 = unit(rng);
    const double t1 = std::max(1e-9, unit(rng)), t2 = std::max(1e-9, unit(rng));
    const double lo_a = std::min(a1, a2), hi_a = std::max(a1, a2);
    const double lo_t = std::min(t1, t2), hi_t = std::max(t1, t2);
    if (JudgeRow(status, lo_a, t1) == Verdict::kPass) {
      ASSERT_EQ(JudgeRow(status, hi_a, t1), Verdict::kPass);
    }
    if (JudgeRow(status, a1, hi_t) == Verdict::kPass) {
      ASSERT_EQ(JudgeRow(status, a1, lo_t), Verdict::kPass);
    }
    ASSERT_EQ(JudgeRow(status, a1, t1) == Verdict::kInfo, status == AspectStatus::kUnspecified);
  }
}

TEST(Verdicts, ThresholdsAndOverrides) {
  std::vector<AspectReport> reports(3);
  reports[0].selector = Sel("target=women/h");
  reports[0].accuracy_mean = 0.75;
  reports[1].selector = Sel("target=women/nh");
  reports[1].accuracy_mean = 0.75;
  reports[2].selector = Sel("target=gay people");
  const DefinitionSpec& dghs = Builtin("DGHS");

  VerdictTable t = *Verdicts(reports, dghs, 0.8);
  EXPECT_EQ(t.rows[0].verdict, Verdict::kFail);
  EXPECT_EQ(t.rows[1].verdict, Verdict::kFail);
  EXPECT_EQ(t.rows[2].verdict, Verdict::kInfo);
  EXPECT_EQ(t.Count(Verdict::kFail), 2u);

  t = *Verdicts(reports, dghs, 0.8, {{"target=women", 0.7}, {"target=women/h", 0.9}});
  EXPECT_EQ(t.rows[0].threshold, 0.9);
  EXPECT_EQ(t.rows[0].verdict, Verdict::kFail);
  EXPECT_EQ(t.rows[1].threshold, 0.7);
  EXPECT_EQ(t.rows[1].verdict, Verdict::kPass);

  EXPECT_FALSE(Verdicts(reports, dghs, 0.0).ok());
  EXPECT_FALSE(Verdicts(reports, dghs, 1.5).ok());
  EXPECT_FALSE(Verdicts(reports, dghs, 0.8, {{"all", -1.0}}).ok());
}

TEST(Verdicts, PropertiesOverRandomSets) {
  testing::Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const DiagnosticSet set = testing::RandomSet(rng, 40);
    const DefinitionSpec spec = testing::RandomValidSpec(rng);
    const LabelScheme& scheme = Scheme(spec.label_scheme_ref);
    const std::vector<AspectReport> reports =
        Evaluate(set, spec,
                 testing::RandomPredictions(rng, set.Ids(), 3, scheme.canonical_labels),
                 DefaultSelectors(set));
    const double lo = 0.3 + 0.4 * std::uniform_real_distribution<double>(0, 1)(rng);
    const VerdictTable low = *Verdicts(reports, spec, lo);
    const VerdictTable high = *Verdicts(reports, spec, lo + 0.2);
    ASSERT_EQ(low.rows.size(), reports.size());
    for (size_t i = 0; i < reports.size(); ++i) {
      const VerdictRow& row = low.rows[i];
      ASSERT_EQ(row.status, SelectorStatus(reports[i].selector, spec));
      if (row.status == AspectStatus::kUnspecified || reports[i].n_cases == 0) {
        ASSERT_EQ(row.verdict, Verdict::kInfo);
      } else {
        ASSERT_EQ(row.verdict == Verdict::kPass, *row.accuracy_mean >= lo);
      }
      if (high.rows[i].verdict == Verdict::kPass) ASSERT_EQ(row.verdict, Verdict::kPass);
    }
    ASSERT_EQ(low.Count(Verdict::kPass) + low.Count(Verdict::kFail) + low.Count(Verdict::kInfo),
              low.rows.size());
  }
}

TEST(Distribution, Example) {
  const PredictionSet predictions = *MapLabels(
      testing::MakePredictions({"a", "b", "c", "d"}, {{"hate", "offensive", "offensive", "neither"}}),
      Scheme("ternary"));
  absl::StatusOr<DistributionReport> d =
      Distribution(predictions, {"a", "b", "c", "d"}, {"hate", "offensive", "neutral"}, "off");
  ASSERT_TRUE(d.ok()) << d.status();
  EXPECT_EQ(d->slice, "off");
  EXPECT_EQ(d->n_cases, 4u);
  EXPECT_EQ(d->n_predictions, 4u);
  EXPECT_DOUBLE_EQ(d->per_label_fraction.at("hate"), 0.25);
  EXPECT_DOUBLE_EQ(d->per_label_fraction.at("offensive"), 0.5);
  EXPECT_DOUBLE_EQ(d->per_label_fraction.at("neutral"), 0.25);

  d = Distribution(predictions, {"a"}, {"hate", "offensive", "neutral"});
  EXPECT_EQ(d->per_label_count.at("offensive"), 0u);
  EXPECT_FALSE(Distribution(predictions, {}).ok());
  EXPECT_FALSE(Distribution(predictions, {"zzz"}).ok());
}

TEST(Distribution, FractionsSumToOne) {
  testing::Rng rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    const std::vector<std::string> ids = [&] {
      std::vector<std::string> out;
      for (size_t i = 0; i < testing::Uniform(rng, 1, 40); ++i) out.push_back(absl::StrCat("x", i));
      return out;
    }();
    const LabelScheme& scheme = Scheme(testing::Pick(
        rng, std::vector<std::string>{"binary", "ternary", "founta", "talathovy"}));
    const PredictionSet predictions = *MapLabels(
        testing::RandomPredictions(rng, ids, testing::Uniform(rng, 1, 5), scheme.canonical_labels),
        scheme);
    const DistributionReport d = *Distribution(predictions, ids, scheme.canonical_labels);
    double sum = 0;
    size_t count = 0;
    for (const auto& [label, fraction] : d.per_label_fraction) {
      sum += fraction;
      count += d.per_label_count.at(label);
    }
    ASSERT_NEAR(sum, 1.0, 1e-12);
    ASSERT_EQ(count, d.n_predictions);
    ASSERT_EQ(d.n_predictions, ids.size() * predictions.seeds().size());
  }
}

std::vector<HateInstance> HateInstances(size_t n) {
  std::vector<HateInstance> out;
  for (size_t i = 0; i < n; ++i) out.push_back({absl::StrCat("t", i), "hate"});
  return out;
}

std::vector<std::string> InstanceIds(const std::vector<HateInstance>& instances) {
  std::vector<std::string> ids;
  for (const HateInstance& h : instances) ids.push_back(h.case_id);
  return ids;
}

TEST(CrossEval, ThirteenOfTwenty) {
  const std::vector<HateInstance> hate = HateInstances(20);
  std::vector<std::string> labels;
  for (int i = 0; i < 20; ++i) labels.push_back(i < 13 ? "hateful" : "normal");
  const PredictionSet predictions =
      testing::MakePredictions(InstanceIds(hate), {labels, labels}, "dghs-bert");
  absl::StatusOr<CrossEvalCell> cell =
      ComputeCrossEvalCell("Founta", hate, predictions, Scheme("ternary"));
  ASSERT_TRUE(cell.ok()) << cell.status();
  EXPECT_EQ(cell->source_model, "dghs-bert");
  EXPECT_EQ(cell->target_dataset, "Founta");
  EXPECT_EQ(cell->n_hate_instances, 20u);
  EXPECT_NEAR(*cell->hate_recall_mean, 0.65, kTol);
  EXPECT_EQ(*cell->hate_recall_std, 0.0);
}

TEST(CrossEval, AnyHateClassCountsAsRecognized) {
  const std::vector<HateInstance> hate = HateInstances(4);
  const PredictionSet raw = testing::MakePredictions(
      InstanceIds(hate), {{"sexism", "racism", "neither", "sexism"}}, "th");
  const CrossEvalCell a = *ComputeCrossEvalCell("HX", hate, raw, Scheme("talathovy"));
  EXPECT_NEAR(*a.hate_recall_mean, 0.75, kTol);
  // Already-canonical predictions give the same recall.
  const CrossEvalCell b =
      *ComputeCrossEvalCell("HX", hate, *MapLabels(raw, Scheme("talathovy")), Scheme("talathovy"));
  EXPECT_EQ(a.hate_recall_mean, b.hate_recall_mean);
}

TEST(CrossEval, InvariantUnderRawRelabeling) {
  testing::Rng rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<HateInstance> hate = HateInstances(testing::Uniform(rng, 1, 30));
    const LabelScheme& scheme = Scheme("ternary");
    std::vector<std::string> raw;
    for (const auto& [label, canonical] : scheme.raw_to_canonical) raw.push_back(label);
    const PredictionSet predictions =
        testing::RandomPredictions(rng, InstanceIds(hate), testing::Uniform(rng, 1, 5), raw);
    // Swap each raw label for another raw label with the same canonical label.
    std::vector<PredictionRecord> relabeled = predictions.records();
    for (PredictionRecord& r : relabeled) {
      const std::string canonical = *scheme.ToCanonical(r.raw_label);
      std::vector<std::string> same;
      for (const auto& [label, c] : scheme.raw_to_canonical) {
        if (c == canonical) same.push_back(label);
      }
      r.raw_label = testing::Pick(rng, same);
    }
    const CrossEvalCell a = *ComputeCrossEvalCell("T", hate, predictions, scheme);
    const CrossEvalCell b =
        *ComputeCrossEvalCell("T", hate, *PredictionSet::Create(relabeled), scheme);
    ASSERT_EQ(a.hate_recall_mean, b.hate_recall_mean);
    ASSERT_EQ(a.per_seed_recall, b.per_seed_recall);
  }
}

TEST(CrossEval, Errors) {
  const std::vector<HateInstance> hate = HateInstances(3);
  const PredictionSet partial = testing::MakePredictions({"t0", "t1"}, {{"hate", "hate"}});
  absl::StatusOr<CrossEvalCell> cell =
      ComputeCrossEvalCell("X", hate, partial, Scheme("binary"));
  ASSERT_FALSE(cell.ok());
  EXPECT_THAT(cell.status().message(), HasSubstr("s0/t2"));
  EXPECT_FALSE(ComputeCrossEvalCell("X", {}, partial, Scheme("binary")).ok());
  EXPECT_FALSE(ComputeCrossEvalCell("X", hate, PredictionSet(), Scheme("binary")).ok());
  const PredictionSet odd = testing::MakePredictions({"t0", "t1", "t2"}, {{"hate", "toxic", "hate"}});
  EXPECT_FALSE(ComputeCrossEvalCell("X", hate, odd, Scheme("binary")).ok());
}

CrossEvalCell Cell(std::string source, std::string target, double recall) {
  CrossEvalCell cell;
  cell.source_model = std::move(source);
  cell.target_dataset = std::move(target);
  cell.hate_recall_mean = recall;
  return cell;
}

TEST(BuildMatrix, FiveByFiveWithExtraTarget) {
  const std::vector<std::string> sources = {"DGHS", "Davidson", "Founta", "HX", "MHSC"};
  const std::vector<std::string> targets = {"DGHS", "Davidson", "Founta", "HX", "MHSC",
                                            "TalatHovy"};
  std::vector<CrossEvalCell> cells;
  for (const std::string& s : sources) {
    for (const std::string& t : targets) cells.push_back(Cell(s, t, 0.5));
  }
  absl::StatusOr<CrossEvalMatrix> m = BuildMatrix(cells);
  ASSERT_TRUE(m.ok());
  EXPECT_EQ(m->cells.size(), 30u);
  EXPECT_EQ(m->sources, sources);
  EXPECT_EQ(m->targets, targets);
  ASSERT_NE(m->Find("HX", "TalatHovy"), nullptr);
  EXPECT_EQ(m->Find("TalatHovy", "HX"), nullptr);
}

TEST(BuildMatrix, SingleCellAndDuplicates) {
  absl::StatusOr<CrossEvalMatrix> m = BuildMatrix({Cell("a", "b", 0.1)});
  ASSERT_TRUE(m.ok());
  EXPECT_EQ(m->cells.size(), 1u);
  absl::StatusOr<CrossEvalMatrix> dup = BuildMatrix({Cell("a", "b", 0.1), Cell("a", "b", 0.2)});
  ASSERT_FALSE(dup.ok());
  EXPECT_THAT(dup.status().message(), HasSubstr("duplicate"));
  EXPECT_TRUE(BuildMatrix({})->cells.empty());
}

}  // namespace
}  // namespace defverify
