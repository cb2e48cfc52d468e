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

#include "defverify/expectation.h"

#include <algorithm>
#include <utility>

#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace defverify {
namespace {

enum class Decision { kHate, kNonHate, kUnknown };

// Narrowing of hate expectations for schemes with several hate classes.
constexpr std::pair<absl::string_view, absl::string_view> kHateRefinements[] = {
    {"women", "sexist"},        {"trans people", "sexist"},
    {"black people", "racist"}, {"muslims", "racist"},
    {"immigrants", "racist"},
};

std::vector<std::string> HateLabelsFor(const DiagnosticCase& c,
                                       const LabelScheme& scheme) {
  std::vector<std::string> labels = scheme.HateLabels();
  if (labels.size() <= 1 || !c.target_group.has_value()) return labels;
  for (const auto& [group, label] : kHateRefinements) {
    if (c.target_group->group_name == group && scheme.IsHateEquivalent(label)) {
      return {std::string(label)};
    }
  }
  return labels;
}

// Status of the case's target group for a non-dominant case.
AspectStatus TargetStatus(const TargetGroupId& group, const DefinitionSpec& spec,
                          std::vector<RationaleEntry>* rationale) {
  if (std::optional<AspectStatus> status = spec.GroupStatus(group.group_name)) {
    TargetGroupId subject = group;
    if (std::optional<TargetGroupId> entry = spec.FindGroup(group.group_name)) {
      subject = *entry;
    }
    rationale->push_back({subject, *status});
    return *status;
  }
  if (!group.dominant) {
    if (std::optional<AspectStatus> status = spec.CategoryStatus(group.category)) {
      rationale->push_back({group.category, *status});
      return *status;
    }
  }
  const AspectStatus tg = spec.aspect(AspectKind::kTargetGroups);
  rationale->push_back({AspectKind::kTargetGroups, tg});
  return tg == AspectStatus::kExcluded ? AspectStatus::kExcluded
                                       : AspectStatus::kUnspecified;
}

Decision DominanceDecision(const DiagnosticCase& c, const DefinitionSpec& spec,
                           std::vector<RationaleEntry>* rationale) {
  const AspectStatus dominance = spec.aspect(AspectKind::kDominance);
  rationale->push_back({AspectKind::kDominance, dominance});
  std::optional<AspectStatus> group_status;
  if (c.target_group.has_value()) {
    group_status = spec.GroupStatus(c.target_group->group_name);
    if (group_status.has_value()) {
      TargetGroupId subject = *c.target_group;
      if (auto entry = spec.FindGroup(subject.group_name)) subject = *entry;
      rationale->push_back({subject, *group_status});
    }
  }
  if (dominance == AspectStatus::kExcluded ||
      group_status == AspectStatus::kExcluded) {
    return Decision::kNonHate;
  }
  if (dominance == AspectStatus::kIncluded ||
      group_status == AspectStatus::kIncluded) {
    return Decision::kHate;
  }
  return Decision::kUnknown;
}

Decision TargetDecision(const DiagnosticCase& c, const DefinitionSpec& spec,
                        std::vector<RationaleEntry>* rationale) {
  if (!c.target_group.has_value()) {
    rationale->push_back(
        {AspectKind::kTargetGroups, spec.aspect(AspectKind::kTargetGroups)});
    return Decision::kUnknown;
  }
  switch (TargetStatus(*c.target_group, spec, rationale)) {
    case AspectStatus::kIncluded:
      return Decision::kHate;
    case AspectStatus::kExcluded:
      return Decision::kNonHate;
    case AspectStatus::kUnspecified:
      return Decision::kUnknown;
  }
  return Decision::kUnknown;
}

// Sub-aspects annotated on the case, in table order, without repeats.
std::vector<AspectKind> AnnotatedSubAspects(const DiagnosticCase& c) {
  std::vector<AspectKind> kinds;
  for (Incitement incitement : c.incites) kinds.push_back(AspectFor(incitement));
  if (c.group_insult) kinds.push_back(AspectKind::kGroupInsult);
  for (ExplicitReference ref : c.explicit_reference) kinds.push_back(AspectFor(ref));
  std::sort(kinds.begin(), kinds.end());
  kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());
  return kinds;
}

absl::StatusOr<Expectation> Derive(const DiagnosticCase& c,
                                   const DefinitionSpec& spec,
                                   const LabelScheme& scheme,
                                   const GroupVocabulary& vocabulary,
                                   bool spec_is_valid) {
  if (c.target_group.has_value() &&
      !vocabulary.Contains(c.target_group->group_name) &&
      !spec.FindGroup(c.target_group->group_name).has_value()) {
    return absl::InvalidArgumentError(
        absl::StrCat("case \"", c.case_id, "\": target group \"",
                     c.target_group->group_name,
                     "\" is neither in the spec nor in the group vocabulary"));
  }
  Expectation e;
  e.case_id = c.case_id;
  e.gold = c.gold;
  e.rationale.push_back({c.gold, std::nullopt});

  if (c.gold == GoldLabel::kOffensive) {
    e.labels = scheme.HasCanonical("offensive")
                   ? std::vector<std::string>{"offensive"}
                   : scheme.NonHateLabels();
    return e;
  }
  if (c.gold == GoldLabel::kNonHateful) {
    e.labels = scheme.NonHateLabels();
    return e;
  }
  if (!spec_is_valid) {
    e.no_expectation = NoExpectationReason::kConflictingAspects;
    return e;
  }

  Decision decision = c.dominance ? DominanceDecision(c, spec, &e.rationale)
                                  : TargetDecision(c, spec, &e.rationale);
  if (decision != Decision::kNonHate) {
    for (AspectKind kind : AnnotatedSubAspects(c)) {
      if (spec.aspect(kind) == AspectStatus::kExcluded) {
        e.rationale.push_back({kind, AspectStatus::kExcluded});
        decision = Decision::kNonHate;
      }
    }
  }
  switch (decision) {
    case Decision::kHate:
      e.labels = HateLabelsFor(c, scheme);
      break;
    case Decision::kNonHate:
      e.labels = scheme.NonHateLabels();
      break;
    case Decision::kUnknown:
      e.no_expectation = NoExpectationReason::kAspectUnspecified;
      break;
  }
  return e;
}

std::string RationaleJsonStatus(const RationaleEntry& entry) {
  return entry.status.has_value() ? std::string(AspectStatusName(*entry.status))
                                  : std::string();
}

}  // namespace

absl::string_view NoExpectationReasonName(NoExpectationReason reason) {
  switch (reason) {
    case NoExpectationReason::kAspectUnspecified:
      return "aspect_unspecified";
    case NoExpectationReason::kConflictingAspects:
      return "conflicting_aspects";
  }
  return "aspect_unspecified";
}

std::string RationaleSubjectName(const RationaleSubject& subject) {
  if (const auto* kind = std::get_if<AspectKind>(&subject)) {
    return absl::StrCat("aspect:", AspectCode(*kind));
  }
  if (const auto* category = std::get_if<TargetCategory>(&subject)) {
    return absl::StrCat("category:", TargetCategoryName(*category));
  }
  if (const auto* group = std::get_if<TargetGroupId>(&subject)) {
    return absl::StrCat("group:", group->group_name);
  }
  return absl::StrCat("gold:", GoldLabelName(std::get<GoldLabel>(subject)));
}

absl::StatusOr<Expectation> DeriveExpectation(const DiagnosticCase& c,
                                              const DefinitionSpec& spec,
                                              const LabelScheme& scheme,
                                              const GroupVocabulary& vocabulary) {
  return Derive(c, spec, scheme, vocabulary,
                FindSpecViolations(spec, vocabulary).empty());
}

ExpectationTable::ExpectationTable(std::string spec_name,
                                   std::string scheme_name,
                                   std::vector<Expectation> entries)
    : spec_name_(std::move(spec_name)),
      scheme_name_(std::move(scheme_name)),
      entries_(std::move(entries)) {
  for (size_t i = 0; i < entries_.size(); ++i) {
    index_.emplace(entries_[i].case_id, i);
  }
}

const Expectation* ExpectationTable::Find(absl::string_view case_id) const {
  auto it = index_.find(std::string(case_id));
  return it == index_.end() ? nullptr : &entries_[it->second];
}

absl::StatusOr<ExpectationTable> DeriveAll(const DiagnosticSet& set,
                                           const DefinitionSpec& spec,
                                           const LabelScheme& scheme,
                                           const GroupVocabulary& vocabulary) {
  const bool spec_is_valid = FindSpecViolations(spec, vocabulary).empty();
  std::vector<Expectation> entries;
  entries.reserve(set.size());
  for (const DiagnosticCase& c : set.cases()) {
    absl::StatusOr<Expectation> e =
        Derive(c, spec, scheme, vocabulary, spec_is_valid);
    if (!e.ok()) return e.status();
    entries.push_back(*std::move(e));
  }
  return ExpectationTable(spec.dataset_name, scheme.scheme_name,
                          std::move(entries));
}

double ExpectationCoverage(const ExpectationTable& table) {
  if (table.size() == 0) return 0.0;
  const auto expected =
      std::count_if(table.entries().begin(), table.entries().end(),
                    [](const Expectation& e) { return e.has_expectation(); });
  return static_cast<double>(expected) / static_cast<double>(table.size());
}

std::string SerializeExpectationTable(const ExpectationTable& table) {
  nlohmann::ordered_json header;
  header["format"] = "expectations/1";
  header["spec"] = table.spec_name();
  header["scheme"] = table.scheme_name();
  std::string out = header.dump() + "\n";
  for (const Expectation& e : table.entries()) {
    nlohmann::ordered_json doc;
    doc["case_id"] = e.case_id;
    doc["gold"] = std::string(GoldLabelName(e.gold));
    if (e.has_expectation()) {
      doc["status"] = "expect";
      doc["labels"] = e.labels;
    } else {
      doc["status"] = "no_expectation";
      doc["reason"] = std::string(NoExpectationReasonName(*e.no_expectation));
    }
    nlohmann::ordered_json rationale = nlohmann::ordered_json::array();
    for (const RationaleEntry& entry : e.rationale) {
      nlohmann::ordered_json item;
      item["subject"] = RationaleSubjectName(entry.subject);
      if (entry.status.has_value()) item["status"] = RationaleJsonStatus(entry);
      rationale.push_back(std::move(item));
    }
    doc["rationale"] = std::move(rationale);
    out.append(doc.dump());
    out.push_back('\n');
  }
  return out;
}

}  // namespace defverify
