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

// Vocabulary shared by every module: aspect kinds, three-valued aspect
// statuses, target-group categories and the group vocabulary of the
// diagnostic set.

#ifndef DEFVERIFY_ASPECTS_H_
#define DEFVERIFY_ASPECTS_H_

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace defverify {

// Whether a definition mentions an aspect: included (✓), explicitly
// excluded (✗) or not mentioned (?).
enum class AspectStatus { kIncluded, kExcluded, kUnspecified };

// Columns of the decomposition table, in table order.
enum class AspectKind {
  kTargetGroups,
  kDominance,
  kIncitesDiscrimination,
  kIncitesViolence,
  kIncitesHate,
  kGroupInsult,
  kStereotype,
  kGroupCharacteristic,
  kSlur,
};

inline constexpr std::array<AspectKind, 9> kAllAspectKinds = {
    AspectKind::kTargetGroups,         AspectKind::kDominance,
    AspectKind::kIncitesDiscrimination, AspectKind::kIncitesViolence,
    AspectKind::kIncitesHate,          AspectKind::kGroupInsult,
    AspectKind::kStereotype,           AspectKind::kGroupCharacteristic,
    AspectKind::kSlur,
};

enum class TargetCategory {
  kGender,
  kSexualOrientation,
  kRace,
  kReligion,
  kNationality,
  kDisability,
};

inline constexpr std::array<TargetCategory, 6> kAllTargetCategories = {
    TargetCategory::kGender,      TargetCategory::kSexualOrientation,
    TargetCategory::kRace,        TargetCategory::kReligion,
    TargetCategory::kNationality, TargetCategory::kDisability,
};

// "included" | "excluded" | "unspecified".
absl::string_view AspectStatusName(AspectStatus status);
absl::StatusOr<AspectStatus> ParseAspectStatus(absl::string_view name);
// ✓ / ✗ / ? as used in decomposition tables.
absl::string_view AspectStatusSymbol(AspectStatus status);

// Short lowercase code: tg, do, id, iv, ih, gi, st, gc, sl.
absl::string_view AspectCode(AspectKind kind);
absl::StatusOr<AspectKind> ParseAspectCode(absl::string_view code);
// Column header as printed in tables: TG, Do, ID, ...
absl::string_view AspectColumnLabel(AspectKind kind);

// snake_case: gender, sexual_orientation, race, religion, nationality,
// disability.
absl::string_view TargetCategoryName(TargetCategory category);
absl::StatusOr<TargetCategory> ParseTargetCategory(absl::string_view name);

// Lowercases ASCII, trims and collapses internal whitespace.
std::string NormalizeGroupName(absl::string_view name);

struct TargetGroupId {
  TargetCategory category = TargetCategory::kGender;
  std::string group_name;
  bool dominant = false;

  auto operator<=>(const TargetGroupId&) const = default;
};

// Known target groups of the diagnostic set. Group names are unique.
class GroupVocabulary {
 public:
  GroupVocabulary() = default;
  explicit GroupVocabulary(std::vector<TargetGroupId> groups);

  // women, trans people, gay people, black people, disabled people, muslims,
  // immigrants, plus the dominant groups men and white people.
  static const GroupVocabulary& Default();

  std::optional<TargetGroupId> Find(absl::string_view group_name) const;
  bool Contains(absl::string_view group_name) const {
    return Find(group_name).has_value();
  }
  const std::vector<TargetGroupId>& groups() const { return groups_; }

 private:
  std::vector<TargetGroupId> groups_;
};

}  // namespace defverify

#endif  // DEFVERIFY_ASPECTS_H_
