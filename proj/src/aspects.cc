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

#include "defverify/aspects.h"

#include <cctype>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"

namespace defverify {

absl::string_view AspectStatusName(AspectStatus status) {
  switch (status) {
    case AspectStatus::kIncluded:
      return "included";
    case AspectStatus::kExcluded:
      return "excluded";
    case AspectStatus::kUnspecified:
      return "unspecified";
  }
  return "unspecified";
}

absl::StatusOr<AspectStatus> ParseAspectStatus(absl::string_view name) {
  if (name == "included") return AspectStatus::kIncluded;
  if (name == "excluded") return AspectStatus::kExcluded;
  if (name == "unspecified") return AspectStatus::kUnspecified;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown aspect status \"", name,
      "\" (expected included, excluded or unspecified)"));
}

absl::string_view AspectStatusSymbol(AspectStatus status) {
  switch (status) {
    case AspectStatus::kIncluded:
      return "✓";
    case AspectStatus::kExcluded:
      return "✗";
    case AspectStatus::kUnspecified:
      return "?";
  }
  return "?";
}

absl::string_view AspectCode(AspectKind kind) {
  switch (kind) {
    case AspectKind::kTargetGroups:
      return "tg";
    case AspectKind::kDominance:
      return "do";
    case AspectKind::kIncitesDiscrimination:
      return "id";
    case AspectKind::kIncitesViolence:
      return "iv";
    case AspectKind::kIncitesHate:
      return "ih";
    case AspectKind::kGroupInsult:
      return "gi";
    case AspectKind::kStereotype:
      return "st";
    case AspectKind::kGroupCharacteristic:
      return "gc";
    case AspectKind::kSlur:
      return "sl";
  }
  return "";
}

absl::StatusOr<AspectKind> ParseAspectCode(absl::string_view code) {
  for (AspectKind kind : kAllAspectKinds) {
    if (AspectCode(kind) == code) return kind;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown aspect \"", code,
                   "\" (expected one of tg, do, id, iv, ih, gi, st, gc, sl)"));
}

absl::string_view AspectColumnLabel(AspectKind kind) {
  switch (kind) {
    case AspectKind::kTargetGroups:
      return "TG";
    case AspectKind::kDominance:
      return "Do";
    case AspectKind::kIncitesDiscrimination:
      return "ID";
    case AspectKind::kIncitesViolence:
      return "IV";
    case AspectKind::kIncitesHate:
      return "IH";
    case AspectKind::kGroupInsult:
      return "GI";
    case AspectKind::kStereotype:
      return "St";
    case AspectKind::kGroupCharacteristic:
      return "GC";
    case AspectKind::kSlur:
      return "Sl";
  }
  return "";
}

absl::string_view TargetCategoryName(TargetCategory category) {
  switch (category) {
    case TargetCategory::kGender:
      return "gender";
    case TargetCategory::kSexualOrientation:
      return "sexual_orientation";
    case TargetCategory::kRace:
      return "race";
    case TargetCategory::kReligion:
      return "religion";
    case TargetCategory::kNationality:
      return "nationality";
    case TargetCategory::kDisability:
      return "disability";
  }
  return "";
}

absl::StatusOr<TargetCategory> ParseTargetCategory(absl::string_view name) {
  for (TargetCategory category : kAllTargetCategories) {
    if (TargetCategoryName(category) == name) return category;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown target category \"", name,
      "\" (expected gender, sexual_orientation, race, religion, nationality "
      "or disability)"));
}

std::string NormalizeGroupName(absl::string_view name) {
  std::string out;
  out.reserve(name.size());
  bool pending_space = false;
  for (char c : name) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(absl::ascii_tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

GroupVocabulary::GroupVocabulary(std::vector<TargetGroupId> groups)
    : groups_(std::move(groups)) {}

const GroupVocabulary& GroupVocabulary::Default() {
  static const GroupVocabulary* const kDefault = new GroupVocabulary({
      {TargetCategory::kGender, "women", false},
      {TargetCategory::kGender, "trans people", false},
      {TargetCategory::kSexualOrientation, "gay people", false},
      {TargetCategory::kRace, "black people", false},
      {TargetCategory::kDisability, "disabled people", false},
      {TargetCategory::kReligion, "muslims", false},
      {TargetCategory::kNationality, "immigrants", false},
      {TargetCategory::kGender, "men", true},
      {TargetCategory::kRace, "white people", true},
  });
  return *kDefault;
}

std::optional<TargetGroupId> GroupVocabulary::Find(
    absl::string_view group_name) const {
  for (const TargetGroupId& group : groups_) {
    if (group.group_name == group_name) return group;
  }
  return std::nullopt;
}

}  // namespace defverify
