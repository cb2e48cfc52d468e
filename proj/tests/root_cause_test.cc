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

#include "defverify/root_cause.h"

#include <set>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "defverify/file_util.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace defverify {
namespace {

using ::testing::Contains;
using ::testing::ElementsAre;
using ::testing::HasSubstr;
using testing::MakeCase;

std::vector<CorpusRecord> FiveRecords() {
  return {
      {"r1", "What a lovely afternoon.", "none"},
      {"r2", "Women, honestly, should stay home!", "sexism"},
      {"r3", "The womens team won again", "none"},
      {"r4", "I told that WOMAN to leave.", "sexism"},
      {"r5", "Nothing to see here", "none"},
  };
}

AspectSelector Sel(absl::string_view text) { return *ParseSelector(text); }

TEST(Normalize, Examples) {
  EXPECT_EQ(Normalize("Hello,   WORLD!!"), "hello world");
  EXPECT_EQ(Normalize("don't  'quote'"), "don't quote");
  EXPECT_EQ(Normalize("Case Kept", true), "Case Kept");
  EXPECT_EQ(Normalize("  --  "), "");
  EXPECT_EQ(Normalize("naïve café"), "naïve café");
}

TEST(Search, FiveRecordExample) {
  const KeywordQuery query = *MakeKeywordQuery({"women", "woman"});
  absl::StatusOr<RootCauseReport> report = Search(FiveRecords(), query);
  ASSERT_TRUE(report.ok()) << report.status();
  EXPECT_EQ(report->corpus_size, 5u);
  EXPECT_EQ(report->matches, 2u);
  EXPECT_DOUBLE_EQ(report->coverage, 0.4);
  EXPECT_EQ(report->per_label_counts, (std::map<std::string, size_t>{{"sexism", 2}}));
  ASSERT_EQ(report->excerpts.size(), 2u);
  EXPECT_EQ(report->excerpts[0].record_id, "r2");
  EXPECT_EQ(report->excerpts[1].record_id, "r4");
  EXPECT_THAT(report->excerpts[1].snippet, HasSubstr("WOMAN"));
}

TEST(Search, SubstringAndCaseModes) {
  const std::vector<CorpusRecord> corpus = FiveRecords();
  EXPECT_EQ(Search(corpus, *MakeKeywordQuery({"women"}, MatchMode::kSubstring))->matches, 2u);
  EXPECT_EQ(Search(corpus, *MakeKeywordQuery({"woman"}, MatchMode::kWholeToken, true))->matches,
            0u);
  EXPECT_EQ(Search(corpus, *MakeKeywordQuery({"WOMAN"}, MatchMode::kWholeToken, true))->matches,
            1u);
}

TEST(Search, AbsentKeywordAndErrors) {
  const RootCauseReport report = *Search(FiveRecords(), *MakeKeywordQuery({"immigrants"}));
  EXPECT_EQ(report.matches, 0u);
  EXPECT_EQ(report.coverage, 0.0);
  EXPECT_TRUE(report.per_label_counts.empty());
  EXPECT_TRUE(report.excerpts.empty());
  EXPECT_FALSE(Search({}, *MakeKeywordQuery({"a"})).ok());
  EXPECT_FALSE(MakeKeywordQuery({}).ok());
  EXPECT_FALSE(MakeKeywordQuery({" ", "!!"}).ok());
  EXPECT_THAT(MakeKeywordQuery({"Gay", "gay", "  GAY "})->keywords, ElementsAre("gay"));
}

TEST(Search, SnippetsAndExcerptCap) {
  std::vector<CorpusRecord> corpus;
  const std::string padding(100, 'x');
  for (int i = 0; i < 30; ++i) {
    corpus.push_back({absl::StrCat("r", i), absl::StrCat(padding, " the\tmigrants ", padding),
                      "hate"});
  }
  SearchOptions options;
  options.excerpt_cap = 5;
  options.snippet_radius = 10;
  const RootCauseReport report = *Search(corpus, *MakeKeywordQuery({"migrants"}), options);
  EXPECT_EQ(report.matches, 30u);
  ASSERT_EQ(report.excerpts.size(), 5u);
  EXPECT_EQ(report.excerpts[0].snippet, "...xxxxx the migrants xxxxxxxxx...");
}

// Independent matcher: pads with spaces and uses plain find.
bool OracleMatch(const std::string& text, const std::vector<std::string>& keywords,
                 MatchMode mode) {
  const std::string padded = absl::StrCat(" ", Normalize(text), " ");
  for (const std::string& k : keywords) {
    const std::string needle = mode == MatchMode::kWholeToken ? absl::StrCat(" ", k, " ") : k;
    if (padded.find(needle) != std::string::npos) return true;
  }
  return false;
}

std::vector<CorpusRecord> RandomCorpus(testing::Rng& rng, size_t n) {
  const std::vector<std::string> words = {"women", "Woman", "gay",   "GAYS",  "black",
                                          "blackbird", "trans", "the",  "of",    "migrants!",
                                          "don't", "muslim's", "white", "whitewash", "café"};
  const std::vector<std::string> seps = {" ", "  ", ", ", "\n", "-", "...", "'"};
  std::vector<CorpusRecord> corpus;
  for (size_t i = 0; i < n; ++i) {
    std::string text;
    for (size_t w = 0; w < testing::Uniform(rng, 1, 12); ++w) {
      absl::StrAppend(&text, w == 0 ? "" : testing::Pick(rng, seps), testing::Pick(rng, words));
    }
    corpus.push_back({absl::StrCat("r", i), text,
                      testing::Pick(rng, std::vector<std::string>{"hate", "none", "sexism"})});
  }
  return corpus;
}

TEST(SearchProperties, MatchesOracleOverRandomCorpora) {
  testing::Rng rng(15);
  const std::vector<std::string> pool = {"women", "woman", "gay", "black", "white",
                                         "trans", "migrants", "don't", "the women", "caf"};
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<CorpusRecord> corpus = RandomCorpus(rng, testing::Uniform(rng, 1, 40));
    std::vector<std::string> keywords;
    for (size_t k = 0; k < testing::Uniform(rng, 1, 3); ++k) {
      keywords.push_back(testing::Pick(rng, pool));
    }
    for (MatchMode mode : {MatchMode::kWholeToken, MatchMode::kSubstring}) {
      const KeywordQuery query = *MakeKeywordQuery(keywords, mode);
      const RootCauseReport report = *Search(corpus, query);
      size_t expected = 0;
      std::map<std::string, size_t> labels;
      for (const CorpusRecord& r : corpus) {
        if (OracleMatch(r.text, query.keywords, mode)) {
          ++expected;
          ++labels[r.label];
        }
      }
      ASSERT_EQ(report.matches, expected) << absl::StrJoin(keywords, "|");
      ASSERT_EQ(report.per_label_counts, labels);
      ASSERT_DOUBLE_EQ(report.coverage, static_cast<double>(expected) / corpus.size());
      ASSERT_EQ(report.excerpts.size(), std::min<size_t>(expected, 20));
    }
  }
}

TEST(SearchProperties, ContainmentIdempotenceCompositionality) {
  testing::Rng rng(16);
  const std::vector<std::string> pool = {"women", "gay", "black", "white", "trans", "of"};
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<CorpusRecord> corpus = RandomCorpus(rng, 30);
    const std::string a = testing::Pick(rng, pool);
    const std::string b = testing::Pick(rng, pool);
    auto matched = [&](const std::vector<std::string>& keywords, MatchMode mode) {
      const KeywordQuery query = *MakeKeywordQuery(keywords, mode);
      std::set<std::string> ids;
      for (const CorpusRecord& r : corpus) {
        if (MatchNormalized(Normalize(r.text), query)) ids.insert(r.record_id);
      }
      return ids;
    };
    const std::set<std::string> token = matched({a}, MatchMode::kWholeToken);
    const std::set<std::string> sub = matched({a}, MatchMode::kSubstring);
    ASSERT_TRUE(std::includes(sub.begin(), sub.end(), token.begin(), token.end()));

    std::set<std::string> both = matched({a}, MatchMode::kWholeToken);
    const std::set<std::string> only_b = matched({b}, MatchMode::kWholeToken);
    both.insert(only_b.begin(), only_b.end());
    ASSERT_EQ(matched({a, b}, MatchMode::kWholeToken), both);

    for (const CorpusRecord& r : corpus) {
      const std::string once = Normalize(r.text);
      ASSERT_EQ(Normalize(once), once);
      const NormalizedText with = NormalizeWithOffsets(r.text, false);
      ASSERT_EQ(with.text.size(), with.source_offset.size());
    }
  }
}

TEST(AspectKeywords, GroupTerms) {
  const DiagnosticSet set = testing::MakeSet({MakeCase("a", GoldLabel::kHateful, "black people"),
                                              MakeCase("b", GoldLabel::kHateful, "white people")});
  const KeywordQuery black = *AspectKeywords(Sel("target=black people/h"), set);
  EXPECT_THAT(black.keywords, Contains("black"));
  EXPECT_THAT(black.keywords, Contains("black people"));
  const KeywordQuery dom = *AspectKeywords(Sel("dominance"), set);
  EXPECT_THAT(dom.keywords, Contains("white"));
  EXPECT_THAT(dom.keywords, ::testing::Not(Contains("men")));
  const KeywordQuery race = *AspectKeywords(Sel("category=race"), set);
  EXPECT_THAT(race.keywords, Contains("blacks"));

  absl::StatusOr<KeywordQuery> none = AspectKeywords(Sel("group_insult"), set);
  ASSERT_FALSE(none.ok());
  EXPECT_THAT(none.status().message(), HasSubstr("explicit keywords"));
  EXPECT_FALSE(AspectKeywords(Sel("target=vegans"), set).ok());
}

TEST(AspectKeywords, LexiconAspectEntries) {
  const DiagnosticSet set = testing::MakeSet({MakeCase("a", GoldLabel::kHateful, "women")});
  Lexicon lexicon = Lexicon::Default();
  lexicon.Merge(*Lexicon::FromJson(R"({"aspects": {"group_insult": ["vermin", "scum"]}})"));
  const KeywordQuery q = *AspectKeywords(Sel("group_insult/h"), set, lexicon);
  EXPECT_THAT(q.keywords, ElementsAre("vermin", "scum"));
}

TEST(AspectKeywords, SlurTermsComeFromTheLexicon) {
  const DiagnosticSet set = testing::MakeSet({MakeCase("a", GoldLabel::kHateful, "women")});
  EXPECT_FALSE(AspectKeywords(Sel("ref=slur/h"), set).ok());
  Lexicon lexicon = Lexicon::Default();
  lexicon.Merge(*Lexicon::FromJson(R"({"slurs": {"women": ["xslur"], "men": ["yslur"]}})"));
  EXPECT_THAT(AspectKeywords(Sel("ref=slur/h"), set, lexicon)->keywords,
              ::testing::UnorderedElementsAre("xslur", "yslur"));
}

TEST(Lexicon, ShippedFileIsTheDefault) {
  absl::StatusOr<Lexicon> loaded = Lexicon::Load(absl::StrCat(DEFVERIFY_DATA_DIR, "/lexicon.json"));
  ASSERT_TRUE(loaded.ok()) << loaded.status();
  EXPECT_EQ(*loaded, Lexicon::Default());
  // No slur terms are shipped; they come from user lexicons.
  EXPECT_TRUE(Lexicon::Default().SlurTerms().empty());
  EXPECT_EQ(*Lexicon::FromJson(Lexicon::Default().ToJson()), Lexicon::Default());
}

TEST(Lexicon, MergeAppendsAndRejectsBadInput) {
  Lexicon base = *Lexicon::FromJson(R"({"groups": {"women": ["women", "girls"]}})");
  base.Merge(*Lexicon::FromJson(R"({"groups": {"women": ["girls", "gals"]}})"));
  EXPECT_THAT(base.GroupTerms("women"), ElementsAre("women", "girls", "gals"));
  EXPECT_TRUE(base.GroupTerms("men").empty());
  EXPECT_FALSE(Lexicon::FromJson("[]").ok());
  EXPECT_FALSE(Lexicon::FromJson(R"({"groups": {"women": "girls"}})").ok());
  EXPECT_FALSE(Lexicon::FromJson(R"({"groups": {"women": [1]}})").ok());
}

TEST(RootCauseBatch, OneReportPerSelector) {
  const DiagnosticSet set = testing::MakeSet({MakeCase("a", GoldLabel::kHateful, "women")});
  absl::StatusOr<std::vector<RootCauseReport>> reports =
      RootCauseBatch(FiveRecords(), {Sel("target=women/h"), Sel("category=gender")}, set);
  ASSERT_TRUE(reports.ok()) << reports.status();
  ASSERT_EQ(reports->size(), 2u);
  EXPECT_EQ((*reports)[0].aspect, "target=women/h");
  EXPECT_EQ((*reports)[0].matches, 2u);
  EXPECT_GE((*reports)[1].matches, 2u);
  EXPECT_FALSE(RootCauseBatch(FiveRecords(), {Sel("in_group")}, set).ok());
}

TEST(Corpus, RoundTripAndErrors) {
  const std::vector<CorpusRecord> records = FiveRecords();
  absl::StatusOr<std::vector<CorpusRecord>> parsed = ParseCorpus(SerializeCorpus(records));
  ASSERT_TRUE(parsed.ok()) << parsed.status();
  EXPECT_EQ(*parsed, records);
  absl::StatusOr<std::vector<CorpusRecord>> dup = ParseCorpus(
      "{\"record_id\":\"a\",\"text\":\"x\",\"label\":\"l\"}\n"
      "{\"record_id\":\"a\",\"text\":\"y\",\"label\":\"l\"}\n");
  ASSERT_FALSE(dup.ok());
  EXPECT_THAT(dup.status().message(), HasSubstr("line 2"));
  EXPECT_FALSE(ParseCorpus("{\"record_id\":\"a\",\"text\":\"\",\"label\":\"l\"}\n").ok());
  EXPECT_FALSE(ParseCorpus("{\"record_id\":\"a\",\"text\":\"x\",\"label\":\"l\",\"z\":1}\n").ok());
}

}  // namespace
}  // namespace defverify
