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

#include "defverify/definition_spec.h"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "defverify/spec_format.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace defverify {
namespace {

using ::testing::HasSubstr;
using ::testing::IsEmpty;

// Rows of the published decomposition table, columns TG Do ID IV IH GI St GC Sl.
const std::vector<std::pair<std::string, std::string>>& PublishedGrid() {
  static const auto* const kGrid = new std::vector<std::pair<std::string, std::string>>{
      {"DGHS", "✓✗?✓✓✓✓✓✓"},   {"TalatHovy", "✓✗?✓✓✓✓✓✓"},
      {"MHSC", "✓✓✓✓✓??✓?"},   {"Davidson", "???✓✓✓???"},
      {"Founta", "✓???✓✓???"}, {"HX", "✓✓???????"},
  };
  return *kGrid;
}

std::vector<std::string> SplitSymbols(const std::string& row) {
  std::vector<std::string> out;
  for (size_t i = 0; i < row.size();) {
    const size_t len = static_cast<unsigned char>(row[i]) < 0x80 ? 1 : 3;
    out.push_back(row.substr(i, len));
    i += len;
  }
  return out;
}

TEST(BuiltinSpecs, ReproduceTheDecompositionGrid) {
  ASSERT_EQ(BuiltinSpecs().size(), 6u);
  size_t cells = 0;
  for (const auto& [name, row] : PublishedGrid()) {
    absl::StatusOr<DefinitionSpec> spec = BuiltinSpec(name);
    ASSERT_TRUE(spec.ok()) << name;
    const std::vector<std::string> symbols = SplitSymbols(row);
    ASSERT_EQ(symbols.size(), kAllAspectKinds.size());
    for (size_t i = 0; i < kAllAspectKinds.size(); ++i) {
      EXPECT_EQ(std::string(AspectStatusSymbol(spec->aspect(kAllAspectKinds[i]))),
                symbols[i])
          << name << " " << AspectCode(kAllAspectKinds[i]);
      ++cells;
    }
  }
  EXPECT_EQ(cells, 54u);
}

TEST(BuiltinSpecs, SpotChecks) {
  const auto& specs = BuiltinSpecs();
  EXPECT_EQ(specs.at("HX").aspect(AspectKind::kTargetGroups), AspectStatus::kIncluded);
  EXPECT_EQ(specs.at("HX").aspect(AspectKind::kDominance), AspectStatus::kIncluded);
  EXPECT_EQ(specs.at("TalatHovy").aspect(AspectKind::kDominance), AspectStatus::kExcluded);
  EXPECT_EQ(specs.at("MHSC").aspect(AspectKind::kSlur), AspectStatus::kUnspecified);
  EXPECT_THAT(specs.at("Davidson").target_groups, IsEmpty());
  EXPECT_THAT(specs.at("Davidson").category_status, IsEmpty());
  EXPECT_THAT(specs.at("TalatHovy").notes, HasSubstr("eligion"));
}

TEST(BuiltinSpecs, AreValidAndNameKnownSchemes) {
  for (const auto& [name, spec] : BuiltinSpecs()) {
    EXPECT_TRUE(ValidateDefinitionSpec(spec).ok()) << name;
    EXPECT_TRUE(BuiltinScheme(spec.label_scheme_ref).ok()) << name;
  }
}

TEST(BuiltinSpecs, UnknownNameIsNotFound) {
  EXPECT_EQ(BuiltinSpec("nope").status().code(), absl::StatusCode::kNotFound);
}

TEST(BuiltinSchemes, MatchTheDatasetLabelSets) {
  const LabelScheme founta = *BuiltinScheme("founta");
  EXPECT_EQ(founta.ToCanonical("abusive"), "offensive");
  EXPECT_EQ(founta.ToCanonical("spam"), "neutral");
  const LabelScheme talat = *BuiltinScheme("talathovy");
  EXPECT_EQ(talat.ToCanonical("neither"), "neutral");
  EXPECT_TRUE(talat.IsHateEquivalent("sexist"));
  EXPECT_TRUE(talat.IsHateEquivalent("racist"));
  EXPECT_FALSE(talat.IsHateEquivalent("neutral"));
  EXPECT_EQ(BuiltinScheme("binary")->canonical_labels,
            (std::vector<std::string>{"hate", "neutral"}));
  EXPECT_EQ(BuiltinScheme("ternary")->canonical_labels,
            (std::vector<std::string>{"hate", "offensive", "neutral"}));
  for (const auto& [name, scheme] : BuiltinSchemes()) {
    EXPECT_TRUE(ValidateLabelScheme(scheme).ok()) << name;
    absl::StatusOr<LabelScheme> again =
        ParseLabelSchemeJson(SerializeLabelSchemeJson(scheme));
    ASSERT_TRUE(again.ok()) << again.status();
    EXPECT_EQ(*again, scheme);
  }
}

TEST(ParseDefinitionSpec, DghsDocument) {
  const char* text = R"(format = "defspec/1"
dataset = "DGHS"
label_scheme = "binary"

[aspects]
tg = "included"
do = "excluded"
id = "unspecified"
iv = "included"
ih = "included"
gi = "included"
st = "included"
gc = "included"
sl = "included"
)";
  absl::StatusOr<ParsedDefinitionSpec> parsed = ParseDefinitionSpec(text);
  ASSERT_TRUE(parsed.ok()) << parsed.status();
  EXPECT_THAT(parsed->warnings, IsEmpty());
  const DefinitionSpec& builtin = BuiltinSpecs().at("DGHS");
  for (AspectKind kind : kAllAspectKinds) {
    EXPECT_EQ(parsed->spec.aspect(kind), builtin.aspect(kind)) << AspectCode(kind);
  }
}

TEST(ParseDefinitionSpec, OmittedAspectsDefaultWithWarnings) {
  absl::StatusOr<ParsedDefinitionSpec> parsed =
      ParseDefinitionSpec("format = \"defspec/1\"\ndataset = \"x\"\n");
  ASSERT_TRUE(parsed.ok()) << parsed.status();
  EXPECT_EQ(parsed->warnings.size(), 9u);
  for (AspectKind kind : kAllAspectKinds) {
    EXPECT_EQ(parsed->spec.aspect(kind), AspectStatus::kUnspecified);
  }
}

TEST(ParseDefinitionSpec, DominanceConflictNamesBothFields) {
  const char* text = R"(format = "defspec/1"
dataset = "x"
[aspects]
do = "excluded"
[[target_groups]]
name = "men"
category = "gender"
dominant = true
status = "included"
)";
  absl::StatusOr<ParsedDefinitionSpec> parsed = ParseDefinitionSpec(text);
  ASSERT_FALSE(parsed.ok());
  EXPECT_THAT(parsed.status().message(), HasSubstr("aspects.do"));
  EXPECT_THAT(parsed.status().message(), HasSubstr("\"men\""));
}

TEST(ParseDefinitionSpec, SyntaxErrorsCarryLineNumbers) {
  absl::StatusOr<ParsedDefinitionSpec> parsed =
      ParseDefinitionSpec("format = \"defspec/1\"\ndataset = \"x\n");
  ASSERT_FALSE(parsed.ok());
  EXPECT_THAT(parsed.status().message(), HasSubstr("line 2"));
  EXPECT_FALSE(ParseDefinitionSpec("format = \"defspec/1\"\n[aspects]\ntg = \"maybe\"\n").ok());
}

TEST(SpecFormat, BuiltinsRoundTrip) {
  for (const auto& [name, spec] : BuiltinSpecs()) {
    absl::StatusOr<ParsedDefinitionSpec> parsed =
        ParseDefinitionSpec(SerializeDefinitionSpec(spec));
    ASSERT_TRUE(parsed.ok()) << name << ": " << parsed.status();
    EXPECT_EQ(parsed->spec, spec) << name;
    EXPECT_THAT(parsed->warnings, IsEmpty());
  }
}

TEST(SpecFormat, ShippedSpecFilesMatchBuiltins) {
  for (const auto& [name, spec] : BuiltinSpecs()) {
    absl::StatusOr<ParsedDefinitionSpec> parsed = ReadDefinitionSpecFile(
        absl::StrCat(DEFVERIFY_DATA_DIR, "/specs/", name, ".defspec"));
    ASSERT_TRUE(parsed.ok()) << parsed.status();
    EXPECT_EQ(parsed->spec, spec) << name;
  }
}

TEST(SpecFormat, RandomSpecsRoundTrip) {
  testing::Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const DefinitionSpec spec = testing::RandomValidSpec(rng);
    const std::string text = SerializeDefinitionSpec(spec);
    absl::StatusOr<ParsedDefinitionSpec> parsed = ParseDefinitionSpec(text);
    ASSERT_TRUE(parsed.ok()) << parsed.status() << "\n" << text;
    ASSERT_EQ(parsed->spec, spec) << text;
  }
}

TEST(ResolveDefinitionSpec, BuiltinOrFile) {
  EXPECT_TRUE(ResolveDefinitionSpec("HX").ok());
  testing::TempDir dir;
  const std::string path =
      dir.Write("x.defspec", SerializeDefinitionSpec(BuiltinSpecs().at("Founta")));
  absl::StatusOr<DefinitionSpec> spec = ResolveDefinitionSpec(path);
  ASSERT_TRUE(spec.ok()) << spec.status();
  EXPECT_EQ(*spec, BuiltinSpecs().at("Founta"));
  EXPECT_FALSE(ResolveDefinitionSpec(dir.File("missing.defspec")).ok());
}

// --- spec_diff --------------------------------------------------------------

std::string Key(const SpecDifference& d) {
  return absl::StrCat(SpecSubjectName(d.subject), "|", AspectStatusName(d.status_a), "|",
                      AspectStatusName(d.status_b));
}

std::multiset<std::string> Keys(const std::vector<SpecDifference>& diff) {
  std::multiset<std::string> out;
  for (const SpecDifference& d : diff) out.insert(Key(d));
  return out;
}

// Cell-by-cell comparison over the nine aspects, every category and every
// group named by either spec; absent entries read as unspecified.
std::multiset<std::string> DiffOracle(const DefinitionSpec& a, const DefinitionSpec& b) {
  std::multiset<std::string> out;
  const auto add = [&out](const SpecSubject& subject, AspectStatus x, AspectStatus y) {
    if (x != y) out.insert(Key({subject, x, y}));
  };
  for (AspectKind kind : kAllAspectKinds) add(kind, a.aspect(kind), b.aspect(kind));
  for (TargetCategory category : kAllTargetCategories) {
    const auto get = [category](const DefinitionSpec& s) {
      auto it = s.category_status.find(category);
      return it == s.category_status.end() ? AspectStatus::kUnspecified : it->second;
    };
    add(category, get(a), get(b));
  }
  std::set<TargetGroupId> groups;
  for (const auto& [g, s] : a.target_groups) groups.insert(g);
  for (const auto& [g, s] : b.target_groups) groups.insert(g);
  for (const TargetGroupId& group : groups) {
    const auto get = [&group](const DefinitionSpec& s) {
      auto it = s.target_groups.find(group);
      return it == s.target_groups.end() ? AspectStatus::kUnspecified : it->second;
    };
    add(group, get(a), get(b));
  }
  return out;
}

TEST(SpecDiff, IdentityIsEmpty) {
  EXPECT_THAT(SpecDiff(BuiltinSpecs().at("DGHS"), BuiltinSpecs().at("DGHS")), IsEmpty());
}

TEST(SpecDiff, DghsVersusHxDominance) {
  const std::vector<SpecDifference> diff =
      SpecDiff(BuiltinSpecs().at("DGHS"), BuiltinSpecs().at("HX"));
  EXPECT_NE(std::find(diff.begin(), diff.end(),
                      SpecDifference{AspectKind::kDominance, AspectStatus::kExcluded,
                                     AspectStatus::kIncluded}),
            diff.end());
}

TEST(SpecDiff, MatchesCellOracleAndIsSymmetric) {
  testing::Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const DefinitionSpec a = testing::RandomValidSpec(rng);
    const DefinitionSpec b = testing::RandomValidSpec(rng);
    const std::vector<SpecDifference> ab = SpecDiff(a, b);
    ASSERT_EQ(Keys(ab), DiffOracle(a, b));
    const std::vector<SpecDifference> ba = SpecDiff(b, a);
    ASSERT_EQ(ab.size(), ba.size());
    for (const SpecDifference& d : ab) {
      ASSERT_NE(std::find(ba.begin(), ba.end(),
                          SpecDifference{d.subject, d.status_b, d.status_a}),
                ba.end());
    }
    ASSERT_THAT(SpecDiff(a, a), IsEmpty());
  }
}

// --- validation ---------------------------------------------------------------

// Breaks exactly one invariant of a valid spec.
DefinitionSpec Corrupt(testing::Rng& rng, DefinitionSpec spec, std::string* what) {
  const GroupVocabulary& vocab = GroupVocabulary::Default();
  switch (testing::Uniform(rng, 0, 6)) {
    case 0: {
      const AspectKind kind = testing::Pick(
          rng, std::vector<AspectKind>(kAllAspectKinds.begin(), kAllAspectKinds.end()));
      spec.aspect_status.erase(kind);
      *what = "missing aspect";
      break;
    }
    case 1: {
      TargetGroupId group = testing::Pick(rng, vocab.groups());
      spec.target_groups.erase(group);
      group.dominant = !group.dominant;
      spec.target_groups[group] = AspectStatus::kExcluded;
      *what = "dominant flag disagrees with the vocabulary";
      break;
    }
    case 2: {
      TargetGroupId group = testing::Pick(rng, vocab.groups());
      spec.target_groups.erase(group);
      group.category = group.category == TargetCategory::kDisability
                           ? TargetCategory::kGender
                           : TargetCategory::kDisability;
      spec.target_groups[group] = AspectStatus::kExcluded;
      *what = "category disagrees with the vocabulary";
      break;
    }
    case 3: {
      spec.aspect_status[AspectKind::kTargetGroups] = AspectStatus::kExcluded;
      spec.target_groups[*vocab.Find("women")] = AspectStatus::kIncluded;
      *what = "tg excluded with an included group";
      break;
    }
    case 4: {
      spec.aspect_status[AspectKind::kDominance] = AspectStatus::kExcluded;
      const TargetGroupId men = *vocab.Find("men");
      spec.target_groups[men] = testing::Coin(rng) ? AspectStatus::kIncluded
                                                   : AspectStatus::kUnspecified;
      if (spec.aspect(AspectKind::kTargetGroups) == AspectStatus::kExcluded) {
        spec.aspect_status[AspectKind::kTargetGroups] = AspectStatus::kIncluded;
        for (auto& [c, s] : spec.category_status) s = AspectStatus::kIncluded;
        for (auto& [g, s] : spec.target_groups) {
          if (!g.dominant) s = AspectStatus::kIncluded;
        }
      }
      *what = "do excluded with a non-excluded dominant group";
      break;
    }
    case 5: {
      spec.target_groups[TargetGroupId{TargetCategory::kRace, "Black People", false}] =
          AspectStatus::kExcluded;
      *what = "group name not normalized";
      break;
    }
    default:
      spec.dataset_name.clear();
      *what = "empty dataset name";
      break;
  }
  return spec;
}

TEST(ValidateDefinitionSpec, AcceptsValidAndRejectsCorruptedSpecs) {
  testing::Rng rng(23);
  for (int i = 0; i < 1000; ++i) {
    const DefinitionSpec valid = testing::RandomValidSpec(rng);
    ASSERT_TRUE(ValidateDefinitionSpec(valid).ok())
        << ValidateDefinitionSpec(valid) << "\n" << SerializeDefinitionSpec(valid);
    std::string what;
    const DefinitionSpec broken = Corrupt(rng, valid, &what);
    ASSERT_FALSE(ValidateDefinitionSpec(broken).ok()) << what;
  }
}

TEST(ValidateDefinitionSpec, UnknownNonDominantGroupsAreAllowed) {
  DefinitionSpec spec = BuiltinSpecs().at("HX");
  spec.target_groups[TargetGroupId{TargetCategory::kNationality, "refugees", false}] =
      AspectStatus::kIncluded;
  EXPECT_TRUE(ValidateDefinitionSpec(spec).ok());
  spec.target_groups[TargetGroupId{TargetCategory::kRace, "elves", true}] =
      AspectStatus::kIncluded;
  EXPECT_FALSE(ValidateDefinitionSpec(spec).ok());
}

}  // namespace
}  // namespace defverify
