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

#include "defverify/selector.h"

#include <algorithm>
#include <set>

#include "absl/strings/str_cat.h"
#include "absl/strings/strip.h"
#include "defverify/status_macros.h"

namespace defverify {
namespace {

bool MatchesPolarity(Polarity polarity, GoldLabel gold) {
  switch (polarity) {
    case Polarity::kAll:
      return true;
    case Polarity::kHateful:
      return gold == GoldLabel::kHateful;
    case Polarity::kNonHateful:
      return gold == GoldLabel::kNonHateful;
    case Polarity::kOffensive:
      return gold == GoldLabel::kOffensive;
  }
  return false;
}

absl::string_view KindKey(SelectorKind kind) {
  switch (kind) {
    case SelectorKind::kAll:
      return "all";
    case SelectorKind::kTargetGroup:
      return "target";
    case SelectorKind::kCategory:
      return "category";
    case SelectorKind::kDominance:
      return "dominance";
    case SelectorKind::kExplicitReference:
      return "ref";
    case SelectorKind::kIncitement:
      return "incites";
    case SelectorKind::kGroupInsult:
      return "group_insult";
    case SelectorKind::kInGroup:
      return "in_group";
    case SelectorKind::kFunctionality:
      return "functionality";
  }
  return "";
}

bool IsFlagKind(SelectorKind kind) {
  return kind == SelectorKind::kDominance || kind == SelectorKind::kGroupInsult ||
         kind == SelectorKind::kInGroup;
}

absl::Status BadSelector(absl::string_view text, absl::string_view why) {
  return absl::InvalidArgumentError(
      absl::StrCat("invalid selector \"", text, "\": ", why));
}

}  // namespace

absl::string_view PolarityName(Polarity polarity) {
  switch (polarity) {
    case Polarity::kAll:
      return "all";
    case Polarity::kHateful:
      return "h";
    case Polarity::kNonHateful:
      return "nh";
    case Polarity::kOffensive:
      return "off";
  }
  return "all";
}

std::string AspectSelector::ToString() const {
  std::string out(KindKey(kind));
  if (IsFlagKind(kind)) {
    if (value == "false") out.append("=false");
  } else if (kind != SelectorKind::kAll) {
    absl::StrAppend(&out, "=", value);
  }
  if (polarity != Polarity::kAll) absl::StrAppend(&out, "/", PolarityName(polarity));
  return out;
}

bool AspectSelector::MatchesAspect(const DiagnosticCase& c) const {
  switch (kind) {
    case SelectorKind::kAll:
      return true;
    case SelectorKind::kTargetGroup:
      return c.target_group.has_value() && c.target_group->group_name == value;
    case SelectorKind::kCategory:
      return c.target_group.has_value() &&
             TargetCategoryName(c.target_group->category) == value;
    case SelectorKind::kDominance:
      return c.target_group.has_value() && c.dominance == (value == "true");
    case SelectorKind::kExplicitReference:
      for (ExplicitReference ref : c.explicit_reference) {
        if (ExplicitReferenceName(ref) == value) return true;
      }
      return false;
    case SelectorKind::kIncitement:
      for (Incitement incitement : c.incites) {
        if (IncitementName(incitement) == value) return true;
      }
      return false;
    case SelectorKind::kGroupInsult:
      return c.group_insult == (value == "true");
    case SelectorKind::kInGroup:
      return c.in_group == (value == "true");
    case SelectorKind::kFunctionality:
      return c.functionality == value;
  }
  return false;
}

bool AspectSelector::Matches(const DiagnosticCase& c) const {
  return MatchesPolarity(polarity, c.gold) && MatchesAspect(c);
}

absl::StatusOr<AspectSelector> ParseSelector(absl::string_view text) {
  AspectSelector selector;
  absl::string_view body = text;
  const size_t slash = body.rfind('/');
  if (slash != absl::string_view::npos) {
    const absl::string_view polarity = body.substr(slash + 1);
    if (polarity == "h") {
      selector.polarity = Polarity::kHateful;
    } else if (polarity == "nh") {
      selector.polarity = Polarity::kNonHateful;
    } else if (polarity == "off" || polarity == "offensive") {
      selector.polarity = Polarity::kOffensive;
    } else if (polarity == "all") {
      selector.polarity = Polarity::kAll;
    } else {
      return BadSelector(text, absl::StrCat("unknown polarity \"", polarity,
                                            "\" (expected h, nh, off or all)"));
    }
    body = body.substr(0, slash);
  }
  absl::string_view key = body;
  absl::string_view value;
  bool has_value = false;
  if (const size_t eq = body.find('='); eq != absl::string_view::npos) {
    key = body.substr(0, eq);
    value = body.substr(eq + 1);
    has_value = true;
  }

  if (key == "all") {
    if (has_value) return BadSelector(text, "\"all\" takes no value");
    selector.kind = SelectorKind::kAll;
    return selector;
  }
  if (key == "dominance" || key == "group_insult" || key == "in_group") {
    selector.kind = key == "dominance"      ? SelectorKind::kDominance
                    : key == "group_insult" ? SelectorKind::kGroupInsult
                                            : SelectorKind::kInGroup;
    if (!has_value || value == "true") {
      selector.value = "true";
    } else if (value == "false") {
      selector.value = "false";
    } else {
      return BadSelector(text, "flag value must be true or false");
    }
    return selector;
  }
  if (!has_value || value.empty()) {
    return BadSelector(text, absl::StrCat("\"", key, "\" needs a value"));
  }
  if (key == "target") {
    selector.kind = SelectorKind::kTargetGroup;
    selector.value = NormalizeGroupName(value);
    if (selector.value.empty()) return BadSelector(text, "empty group name");
    return selector;
  }
  if (key == "category") {
    absl::StatusOr<TargetCategory> category = ParseTargetCategory(value);
    if (!category.ok()) return BadSelector(text, category.status().message());
    selector.kind = SelectorKind::kCategory;
    selector.value = std::string(TargetCategoryName(*category));
    return selector;
  }
  if (key == "ref") {
    absl::StatusOr<ExplicitReference> ref = ParseExplicitReference(value);
    if (!ref.ok()) return BadSelector(text, ref.status().message());
    selector.kind = SelectorKind::kExplicitReference;
    selector.value = std::string(ExplicitReferenceName(*ref));
    return selector;
  }
  if (key == "incites") {
    absl::StatusOr<Incitement> incitement = ParseIncitement(value);
    if (!incitement.ok()) return BadSelector(text, incitement.status().message());
    selector.kind = SelectorKind::kIncitement;
    selector.value = std::string(IncitementName(*incitement));
    return selector;
  }
  if (key == "functionality") {
    selector.kind = SelectorKind::kFunctionality;
    selector.value = std::string(value);
    return selector;
  }
  return BadSelector(
      text, absl::StrCat("unknown aspect \"", key,
                         "\" (expected all, target, category, dominance, ref, "
                         "incites, group_insult, in_group or functionality)"));
}

absl::StatusOr<std::vector<std::string>> SliceByAspect(
    const DiagnosticSet& set, const AspectSelector& selector,
    const GroupVocabulary& vocabulary) {
  if (selector.kind == SelectorKind::kTargetGroup &&
      !vocabulary.Contains(selector.value)) {
    const bool in_set =
        std::any_of(set.cases().begin(), set.cases().end(),
                    [&](const DiagnosticCase& c) {
                      return c.target_group.has_value() &&
                             c.target_group->group_name == selector.value;
                    });
    if (!in_set) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown target group \"", selector.value, "\""));
    }
  }
  std::vector<std::string> ids;
  for (const DiagnosticCase& c : set.cases()) {
    if (selector.Matches(c)) ids.push_back(c.case_id);
  }
  return ids;
}

std::vector<AspectSelector> DefaultSelectors(const DiagnosticSet& set,
                                             const GroupVocabulary& vocabulary) {
  std::vector<AspectSelector> candidates;
  for (const TargetGroupId& group : vocabulary.groups()) {
    candidates.push_back({SelectorKind::kTargetGroup, group.group_name});
  }
  std::set<std::string> unknown_groups;
  for (const DiagnosticCase& c : set.cases()) {
    if (c.target_group.has_value() &&
        !vocabulary.Contains(c.target_group->group_name)) {
      unknown_groups.insert(c.target_group->group_name);
    }
  }
  for (const std::string& name : unknown_groups) {
    candidates.push_back({SelectorKind::kTargetGroup, name});
  }
  candidates.push_back({SelectorKind::kDominance, "true"});
  for (ExplicitReference ref :
       {ExplicitReference::kGroupCharacteristic, ExplicitReference::kStereotype,
        ExplicitReference::kSlur}) {
    candidates.push_back(
        {SelectorKind::kExplicitReference, std::string(ExplicitReferenceName(ref))});
  }
  for (Incitement incitement :
       {Incitement::kHate, Incitement::kViolence, Incitement::kDiscrimination}) {
    candidates.push_back(
        {SelectorKind::kIncitement, std::string(IncitementName(incitement))});
  }
  candidates.push_back({SelectorKind::kGroupInsult, "true"});
  candidates.push_back({SelectorKind::kInGroup, "true"});

  std::vector<AspectSelector> selectors;
  for (const AspectSelector& candidate : candidates) {
    bool hateful = false;
    bool non_hateful = false;
    bool offensive = false;
    for (const DiagnosticCase& c : set.cases()) {
      if (!candidate.MatchesAspect(c)) continue;
      hateful |= c.gold == GoldLabel::kHateful;
      non_hateful |= c.gold == GoldLabel::kNonHateful;
      offensive |= c.gold == GoldLabel::kOffensive;
    }
    const int polarities = hateful + non_hateful + offensive;
    if (polarities == 0) continue;
    if (hateful && non_hateful) {
      selectors.push_back(candidate.WithPolarity(Polarity::kHateful));
      selectors.push_back(candidate.WithPolarity(Polarity::kNonHateful));
      if (offensive) {
        selectors.push_back(candidate.WithPolarity(Polarity::kOffensive));
      }
    } else if (polarities == 1) {
      selectors.push_back(candidate.WithPolarity(
          hateful ? Polarity::kHateful
                  : (non_hateful ? Polarity::kNonHateful : Polarity::kOffensive)));
    } else {
      selectors.push_back(candidate);
    }
  }
  return selectors;
}

}  // namespace defverify
