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

// The aspect-annotated diagnostic set: data model, line-delimited loader,
// validation and slicing.

#ifndef DEFVERIFY_DIAGNOSTIC_SET_H_
#define DEFVERIFY_DIAGNOSTIC_SET_H_

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "defverify/aspects.h"

namespace defverify {

enum class GoldLabel { kHateful, kNonHateful, kOffensive };
enum class ExplicitReference { kGroupCharacteristic, kStereotype, kSlur };
enum class Incitement { kHate, kViolence, kDiscrimination };

// "hateful" | "non-hateful" | "offensive".
absl::string_view GoldLabelName(GoldLabel gold);
absl::StatusOr<GoldLabel> ParseGoldLabel(absl::string_view name);
// "group_characteristic" | "stereotype" | "slur" (gc/st/sl also accepted).
absl::string_view ExplicitReferenceName(ExplicitReference ref);
absl::StatusOr<ExplicitReference> ParseExplicitReference(absl::string_view name);
// "hate" | "violence" | "discrimination".
absl::string_view IncitementName(Incitement incitement);
absl::StatusOr<Incitement> ParseIncitement(absl::string_view name);

AspectKind AspectFor(ExplicitReference ref);
AspectKind AspectFor(Incitement incitement);

struct DiagnosticCase {
  std::string case_id;
  std::string text;
  // HateCheck functionality (e.g. "profanity_nh"), or "ext_*" for the
  // offensive extension.
  std::string functionality;
  GoldLabel gold = GoldLabel::kNonHateful;
  std::optional<TargetGroupId> target_group;
  bool dominance = false;
  std::set<ExplicitReference> explicit_reference;
  std::set<Incitement> incites;
  bool group_insult = false;
  // Reclaimed slurs.
  bool in_group = false;
  bool spelling_variant = false;

  bool operator==(const DiagnosticCase&) const = default;
};

// Cases of the offensive extension carry this functionality prefix.
inline constexpr absl::string_view kExtensionPrefix = "ext_";

bool IsExtensionCase(const DiagnosticCase& c);
// Part of the original, unenriched diagnostic set: neither an extension case
// nor one of the added dominant-group cases.
bool IsBasePortionCase(const DiagnosticCase& c);

// Functionality names and groups the loader checks records against.
struct DiagnosticConfig {
  // Functionalities whose cases are spelling variants; used when a record
  // does not carry an explicit "spelling" field.
  std::set<std::string> spelling_functionalities;
  // Anything else triggers a warning, not an error.
  std::set<std::string> known_functionalities;
  GroupVocabulary vocabulary = GroupVocabulary::Default();

  static const DiagnosticConfig& Default();
};

// Reads a functionality list: one name per line, '#' comments.
absl::StatusOr<std::set<std::string>> ParseFunctionalityList(
    absl::string_view text);

struct Provenance {
  // SHA-256 of the source file contents.
  std::string digest;
  std::string version;

  bool operator==(const Provenance&) const = default;
};

inline constexpr absl::string_view kDiagnosticFormatVersion = "diagnostic/1";

// Immutable, validated collection of cases with unique ids.
class DiagnosticSet {
 public:
  DiagnosticSet() = default;

  // Validates every case invariant and id uniqueness; the error lists every
  // violation. Recoverable issues are appended to `warnings` when non-null.
  static absl::StatusOr<DiagnosticSet> Create(
      std::vector<DiagnosticCase> cases, Provenance provenance,
      const DiagnosticConfig& config = DiagnosticConfig::Default(),
      std::vector<std::string>* warnings = nullptr);

  const std::vector<DiagnosticCase>& cases() const { return cases_; }
  const Provenance& provenance() const { return provenance_; }
  size_t size() const { return cases_.size(); }
  bool empty() const { return cases_.empty(); }
  const DiagnosticCase* Find(absl::string_view case_id) const;
  std::vector<std::string> Ids() const;
  // Cases satisfying `keep`, in order, with the same provenance.
  DiagnosticSet Subset(
      const std::function<bool(const DiagnosticCase&)>& keep) const;

  bool operator==(const DiagnosticSet& other) const {
    return cases_ == other.cases_ && provenance_ == other.provenance_;
  }

 private:
  DiagnosticSet(std::vector<DiagnosticCase> cases, Provenance provenance);

  std::vector<DiagnosticCase> cases_;
  Provenance provenance_;
  std::unordered_map<std::string, size_t> index_;
};

// Invariant violations of a single case, without id-uniqueness checks.
std::vector<std::string> FindCaseViolations(const DiagnosticCase& c,
                                            const DiagnosticConfig& config);

struct LoadedDiagnosticSet {
  DiagnosticSet set;
  std::vector<std::string> warnings;
};

// Parses the line-delimited record format (docs/diagnostic-format.md).
// Malformed records report their line number; duplicate ids and invariant
// violations are all listed in a single error.
absl::StatusOr<LoadedDiagnosticSet> ParseDiagnosticSet(
    absl::string_view text,
    const DiagnosticConfig& config = DiagnosticConfig::Default());
absl::StatusOr<LoadedDiagnosticSet> LoadDiagnosticSet(
    const std::string& path,
    const DiagnosticConfig& config = DiagnosticConfig::Default());

std::string SerializeDiagnosticCase(const DiagnosticCase& c);
std::string SerializeDiagnosticSet(const DiagnosticSet& set);

// Cases with spelling_variant=false, in the original order.
DiagnosticSet FilterSpelling(const DiagnosticSet& set);

// Both sizes are quoted for the offensive evaluation slice of the released
// data, so either is accepted.
inline constexpr size_t kPublishedOffensiveSliceSizes[] = {285, 265};

struct OffensiveSlice {
  std::vector<std::string> case_ids;
  size_t count = 0;
  // True when `count` equals one of the published slice sizes.
  bool matches_published_count = false;
};

OffensiveSlice SelectOffensiveSlice(const DiagnosticSet& set);

struct DiagnosticSummary {
  size_t total = 0;
  std::map<GoldLabel, size_t> by_gold;
  size_t base_cases = 0;
  size_t base_hateful = 0;
  size_t extension_cases = 0;
  size_t dominant_cases = 0;
  size_t spelling_variants = 0;
  OffensiveSlice offensive;
  // Selector string -> (hateful, non-hateful, offensive) counts.
  std::map<std::string, std::array<size_t, 3>> aspect_counts;

  double base_hateful_fraction() const {
    return base_cases == 0 ? 0.0
                           : static_cast<double>(base_hateful) /
                                 static_cast<double>(base_cases);
  }
};

DiagnosticSummary SummarizeDiagnosticSet(const DiagnosticSet& set);

}  // namespace defverify

#endif  // DEFVERIFY_DIAGNOSTIC_SET_H_
