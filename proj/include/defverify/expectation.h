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

// Expected labels for diagnostic cases under a definition spec.
//
// Rules, first match wins:
//   1. offensive gold -> {offensive}, or the non-hate labels when the scheme
//      has no offensive class;
//   2. non-hateful gold -> the non-hate labels;
//   3. dominant-group cases -> decided by the Dominance column and the
//      group's own entry;
//   4. other hateful cases -> decided by the target group (group entry, then
//      category, then the TG column).
// An excluded explicit reference, incitement or group insult on the case
// turns a hate (or unknown) decision from rules 3-4 into non-hate. Hate
// decisions are narrowed for schemes with several hate classes (women and
// trans people -> sexist; black people, muslims and immigrants -> racist).

#ifndef DEFVERIFY_EXPECTATION_H_
#define DEFVERIFY_EXPECTATION_H_

#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "defverify/aspects.h"
#include "defverify/definition_spec.h"
#include "defverify/diagnostic_set.h"

namespace defverify {

enum class NoExpectationReason { kAspectUnspecified, kConflictingAspects };

// "aspect_unspecified" | "conflicting_aspects".
absl::string_view NoExpectationReasonName(NoExpectationReason reason);

using RationaleSubject =
    std::variant<AspectKind, TargetCategory, TargetGroupId, GoldLabel>;

// One input to a decision: a spec entry and its status, or the gold label
// (status empty).
struct RationaleEntry {
  RationaleSubject subject;
  std::optional<AspectStatus> status;

  bool operator==(const RationaleEntry&) const = default;
};

// "aspect:do", "category:gender", "group:white people", "gold:hateful".
std::string RationaleSubjectName(const RationaleSubject& subject);

struct Expectation {
  std::string case_id;
  GoldLabel gold = GoldLabel::kNonHateful;
  // Canonical labels a correct prediction may take, in scheme order. Empty
  // exactly when `no_expectation` is set.
  std::vector<std::string> labels;
  std::optional<NoExpectationReason> no_expectation;
  std::vector<RationaleEntry> rationale;

  bool has_expectation() const { return !no_expectation.has_value(); }
  bool operator==(const Expectation&) const = default;
};

absl::StatusOr<Expectation> DeriveExpectation(
    const DiagnosticCase& c, const DefinitionSpec& spec,
    const LabelScheme& scheme,
    const GroupVocabulary& vocabulary = GroupVocabulary::Default());

class ExpectationTable {
 public:
  ExpectationTable() = default;
  ExpectationTable(std::string spec_name, std::string scheme_name,
                   std::vector<Expectation> entries);

  const std::string& spec_name() const { return spec_name_; }
  const std::string& scheme_name() const { return scheme_name_; }
  // In diagnostic-set order.
  const std::vector<Expectation>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  const Expectation* Find(absl::string_view case_id) const;

  bool operator==(const ExpectationTable& other) const {
    return spec_name_ == other.spec_name_ &&
           scheme_name_ == other.scheme_name_ && entries_ == other.entries_;
  }

 private:
  std::string spec_name_;
  std::string scheme_name_;
  std::vector<Expectation> entries_;
  std::unordered_map<std::string, size_t> index_;
};

// Errors carry the offending case id.
absl::StatusOr<ExpectationTable> DeriveAll(
    const DiagnosticSet& set, const DefinitionSpec& spec,
    const LabelScheme& scheme,
    const GroupVocabulary& vocabulary = GroupVocabulary::Default());

// Fraction of entries with an expectation; 0 for an empty table.
double ExpectationCoverage(const ExpectationTable& table);

// A header line {"format", "spec", "scheme"} followed by one object per
// case: {"case_id", "gold", "status", "labels" | "reason", "rationale"}.
std::string SerializeExpectationTable(const ExpectationTable& table);

}  // namespace defverify

#endif  // DEFVERIFY_EXPECTATION_H_
