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

#include "defverify/prediction.h"

#include <map>
#include <set>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace defverify {
namespace {

using ::testing::HasSubstr;
using ::testing::Not;

const LabelScheme& Scheme(absl::string_view name) {
  return BuiltinSchemes().at(std::string(name));
}

std::vector<std::string> Ids(size_t n) {
  std::vector<std::string> ids;
  for (size_t i = 0; i < n; ++i) ids.push_back(absl::StrCat("id", i));
  return ids;
}

std::string Line(absl::string_view id, absl::string_view label, absl::string_view seed) {
  return absl::StrCat("{\"case_id\":\"", id, "\",\"raw_label\":\"", label,
                      "\",\"seed_id\":\"", seed, "\",\"model_id\":\"bert\"}\n");
}

TEST(ParsePredictions, FiveSeedsOverTwentyCases) {
  const std::vector<std::string> ids = Ids(20);
  std::string text;
  for (int s = 0; s < 5; ++s) {
    for (const std::string& id : ids) text += Line(id, "hate", absl::StrCat("s", s));
  }
  absl::StatusOr<PredictionSet> set = ParsePredictions(text, ids);
  ASSERT_TRUE(set.ok()) << set.status();
  EXPECT_EQ(set->size(), 100u);
  EXPECT_EQ(set->seeds(), (std::set<std::string>{"s0", "s1", "s2", "s3", "s4"}));
  EXPECT_EQ(set->model_id(), "bert");
  EXPECT_FALSE(set->canonical());
  ASSERT_NE(set->Find("id7", "s2"), nullptr);
  EXPECT_EQ(set->Find("id7", "s9"), nullptr);
}

TEST(ParsePredictions, IncompleteSeedNamesSeedAndCase) {
  const std::vector<std::string> ids = Ids(20);
  std::string text;
  for (int s = 0; s < 5; ++s) {
    for (const std::string& id : ids) {
      if (s == 3 && id == "id11") continue;
      text += Line(id, "hate", absl::StrCat("s", s));
    }
  }
  absl::StatusOr<PredictionSet> set = ParsePredictions(text, ids);
  ASSERT_FALSE(set.ok());
  EXPECT_THAT(set.status().message(), HasSubstr("\"s3\""));
  EXPECT_THAT(set.status().message(), HasSubstr("id11"));
  EXPECT_THAT(set.status().message(), Not(HasSubstr("\"s2\"")));
}

TEST(ParsePredictions, UnexpectedIdsUnlessIgnorable) {
  const std::string text = Line("a", "hate", "s0") + Line("spell1", "hate", "s0");
  EXPECT_FALSE(ParsePredictions(text, {"a"}).ok());
  absl::StatusOr<PredictionSet> set = ParsePredictions(text, {"a"}, {"spell1"});
  ASSERT_TRUE(set.ok());
  EXPECT_EQ(set->Restrict({"a"}).size(), 1u);
}

TEST(ParsePredictions, EmptyInput) {
  absl::StatusOr<PredictionSet> none = ParsePredictions("", {});
  ASSERT_TRUE(none.ok());
  EXPECT_TRUE(none->empty());
  EXPECT_TRUE(none->model_id().empty());
  EXPECT_FALSE(ParsePredictions("\n\n", {"a"}).ok());
}

TEST(ParsePredictions, MalformedRecords) {
  const std::vector<std::string> bad = {
      "not json\n",
      "{\"case_id\":\"a\",\"seed_id\":\"s0\",\"model_id\":\"m\"}\n",
      "{\"case_id\":\"a\",\"raw_label\":\"hate\",\"seed_id\":\"s0\",\"model_id\":\"m\",\"x\":1}\n",
      "{\"case_id\":\"a\",\"raw_label\":\"hate\",\"seed_id\":\"s0\",\"model_id\":\"m\","
      "\"scores\":{\"hate\":0.3,\"neutral\":0.7}}\n",
      "{\"case_id\":\"a\",\"raw_label\":\"hate\",\"seed_id\":\"s0\",\"model_id\":\"m\","
      "\"scores\":{\"hate\":0.9,\"neutral\":0.3}}\n",
  };
  for (const std::string& text : bad) {
    absl::StatusOr<PredictionSet> set = ParsePredictionRecords(text);
    EXPECT_FALSE(set.ok()) << text;
    if (!set.ok()) EXPECT_THAT(set.status().message(), HasSubstr("line 1")) << text;
  }
  absl::StatusOr<PredictionSet> dup =
      ParsePredictionRecords(Line("a", "hate", "s0") + "\n" + Line("a", "neutral", "s0"));
  ASSERT_FALSE(dup.ok());
  EXPECT_THAT(dup.status().message(), HasSubstr("line 3"));
  EXPECT_THAT(dup.status().message(), HasSubstr("line 1"));
}

TEST(PredictionSet, MixedModelsRejected) {
  std::vector<PredictionRecord> records(2);
  records[0] = {"a", "hate", std::nullopt, "s0", "m1", std::nullopt};
  records[1] = {"b", "hate", std::nullopt, "s0", "m2", std::nullopt};
  EXPECT_FALSE(PredictionSet::Create(records).ok());
}

TEST(SerializePredictions, RoundTripsRandomSets) {
  testing::Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<std::string> ids = Ids(testing::Uniform(rng, 0, 30));
    std::vector<PredictionRecord> records;
    for (size_t s = 0; s < testing::Uniform(rng, 1, 4); ++s) {
      for (const std::string& id : ids) {
        PredictionRecord r;
        r.case_id = id;
        r.seed_id = absl::StrCat("seed-", s);
        r.model_id = "model \"x\"";
        if (testing::Coin(rng)) {
          const double p = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
          r.scores = std::map<std::string, double>{{"hate", p}, {"neutral", 1.0 - p}};
          r.raw_label = p >= 0.5 ? "hate" : "neutral";
        } else {
          r.raw_label = testing::Pick(rng, std::vector<std::string>{"hate", "neutral", "ü"});
        }
        records.push_back(std::move(r));
      }
    }
    absl::StatusOr<PredictionSet> set = PredictionSet::Create(records);
    ASSERT_TRUE(set.ok()) << set.status();
    const std::string text = SerializePredictions(*set);
    absl::StatusOr<PredictionSet> again = ParsePredictions(text, ids);
    ASSERT_TRUE(again.ok()) << again.status();
    ASSERT_EQ(*again, *set);
    ASSERT_EQ(SerializePredictions(*again), text);
  }
}

TEST(LoadPredictions, ErrorsCarryThePath) {
  testing::TempDir dir;
  const std::string path = dir.Write("p.jsonl", "{");
  absl::StatusOr<PredictionSet> set = LoadPredictions(path, {});
  ASSERT_FALSE(set.ok());
  EXPECT_THAT(set.status().message(), HasSubstr(path));
  EXPECT_FALSE(LoadPredictions(dir.File("missing.jsonl"), {}).ok());
}

TEST(MapLabels, SchemeMappings) {
  const PredictionSet founta = testing::MakePredictions({"a", "b", "c"},
                                                        {{"abusive", "spam", "hateful"}});
  absl::StatusOr<PredictionSet> mapped = MapLabels(founta, Scheme("founta"));
  ASSERT_TRUE(mapped.ok()) << mapped.status();
  EXPECT_TRUE(mapped->canonical());
  EXPECT_EQ(mapped->Find("a", "s0")->canonical_label, "offensive");
  EXPECT_EQ(mapped->Find("b", "s0")->canonical_label, "neutral");
  EXPECT_EQ(mapped->Find("c", "s0")->canonical_label, "hate");

  const PredictionSet th = testing::MakePredictions({"a", "b"}, {{"neither", "sexism"}});
  mapped = MapLabels(th, Scheme("talathovy"));
  ASSERT_TRUE(mapped.ok());
  EXPECT_EQ(mapped->Find("a", "s0")->canonical_label, "neutral");
  EXPECT_EQ(mapped->Find("b", "s0")->canonical_label, "sexist");
}

TEST(MapLabels, UnmappedLabelsListedWithCounts) {
  const PredictionSet set =
      testing::MakePredictions({"a", "b", "c"}, {{"toxic", "hate", "toxic"}});
  absl::StatusOr<PredictionSet> mapped = MapLabels(set, Scheme("binary"));
  ASSERT_FALSE(mapped.ok());
  EXPECT_THAT(mapped.status().message(), HasSubstr("\"toxic\" (2)"));
}

TEST(MapLabels, KeysAndRawLabelsPreserved) {
  testing::Rng rng(12);
  for (const auto& [name, scheme] : BuiltinSchemes()) {
    std::vector<std::string> raw;
    for (const auto& [label, canonical] : scheme.raw_to_canonical) raw.push_back(label);
    const std::vector<std::string> ids = Ids(50);
    const PredictionSet set = testing::RandomPredictions(rng, ids, 3, raw);
    absl::StatusOr<PredictionSet> mapped = MapLabels(set, scheme);
    ASSERT_TRUE(mapped.ok()) << name;
    ASSERT_EQ(mapped->size(), set.size());
    for (size_t i = 0; i < set.size(); ++i) {
      const PredictionRecord& before = set.records()[i];
      const PredictionRecord& after = mapped->records()[i];
      ASSERT_EQ(after.case_id, before.case_id);
      ASSERT_EQ(after.seed_id, before.seed_id);
      ASSERT_EQ(after.raw_label, before.raw_label);
      ASSERT_TRUE(scheme.HasCanonical(*after.canonical_label));
    }
  }
}

TEST(JudgePrediction, Examples) {
  const LabelScheme& ternary = Scheme("ternary");
  Expectation nh;
  nh.gold = GoldLabel::kNonHateful;
  nh.labels = {"offensive", "neutral"};
  EXPECT_EQ(JudgePrediction("offensive", nh, ternary), (Correctness{true, false}));
  EXPECT_EQ(JudgePrediction("hate", nh, ternary), (Correctness{false, false}));

  Expectation sexist;
  sexist.gold = GoldLabel::kHateful;
  sexist.labels = {"sexist"};
  EXPECT_EQ(JudgePrediction("racist", sexist, Scheme("talathovy")), (Correctness{false, false}));

  Expectation unknown;
  unknown.gold = GoldLabel::kHateful;
  unknown.no_expectation = NoExpectationReason::kAspectUnspecified;
  EXPECT_EQ(JudgePrediction("hate", unknown, ternary), (Correctness{true, true}));
  EXPECT_EQ(JudgePrediction("offensive", unknown, ternary), (Correctness{false, true}));
}

TEST(PooledCorrectness, TotalOverCasesAndSeeds) {
  testing::Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const DiagnosticSet set = testing::RandomSet(rng, 30);
    const DefinitionSpec spec = testing::RandomValidSpec(rng);
    const LabelScheme& scheme = Scheme(spec.label_scheme_ref);
    const ExpectationTable table = *DeriveAll(set, spec, scheme);
    const size_t n_seeds = testing::Uniform(rng, 1, 5);
    const PredictionSet predictions =
        *MapLabels(testing::RandomPredictions(rng, set.Ids(), n_seeds, scheme.canonical_labels),
                   scheme);
    absl::StatusOr<std::map<std::pair<std::string, std::string>, Correctness>> pooled =
        PooledCorrectness(predictions, table, scheme);
    ASSERT_TRUE(pooled.ok()) << pooled.status();
    ASSERT_EQ(pooled->size(), set.size() * n_seeds);
    for (const auto& [key, correctness] : *pooled) {
      const Expectation& e = *table.Find(key.first);
      ASSERT_EQ(correctness.informational, !e.has_expectation());
    }
  }
}

TEST(PooledCorrectness, RequiresCanonicalAndCompletePredictions) {
  const DiagnosticSet set = testing::MakeSet(
      {testing::MakeCase("a", GoldLabel::kNonHateful), testing::MakeCase("b", GoldLabel::kOffensive)});
  const ExpectationTable table = *DeriveAll(set, BuiltinSpecs().at("DGHS"), Scheme("binary"));
  const PredictionSet raw = testing::MakePredictions({"a", "b"}, {{"hate", "neutral"}});
  EXPECT_FALSE(PooledCorrectness(raw, table, Scheme("binary")).ok());
  const PredictionSet partial = *MapLabels(testing::MakePredictions({"a"}, {{"hate"}}),
                                           Scheme("binary"));
  EXPECT_FALSE(PooledCorrectness(partial, table, Scheme("binary")).ok());
}

}  // namespace
}  // namespace defverify
