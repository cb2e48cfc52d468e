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

#include "defverify/diagnostic_set.h"

#include <algorithm>
#include <utility>

#include "absl/strings/ascii.h"
#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "defverify/file_util.h"
#include "defverify/selector.h"
#include "defverify/status_macros.h"
#include "json.hpp"

namespace defverify {
namespace {

using json = nlohmann::json;

// The 29 functionalities of the original suite.
constexpr absl::string_view kHateCheckFunctionalities[] = {
    "derog_neg_emote_h",  "derog_neg_attrib_h", "derog_dehum_h",
    "derog_impl_h",       "threat_dir_h",       "threat_norm_h",
    "slur_h",             "slur_homonym_nh",    "slur_reclaimed_nh",
    "profanity_h",        "profanity_nh",       "ref_subs_clause_h",
    "ref_subs_sent_h",    "negate_pos_h",       "negate_neg_nh",
    "phrase_question_h",  "phrase_opinion_h",   "ident_neutral_nh",
    "ident_pos_nh",       "counter_quote_nh",   "counter_ref_nh",
    "target_obj_nh",      "target_indiv_nh",    "target_group_nh",
    "spell_char_swap_h",  "spell_char_del_h",   "spell_space_del_h",
    "spell_space_add_h",  "spell_leet_h",
};

constexpr absl::string_view kExtensionFunctionalities[] = {
    "ext_vulgar", "ext_threat_indiv", "ext_insult_indiv", "ext_nonoff_context"};

constexpr absl::string_view kSpellingFunctionalities[] = {
    "spell_char_swap_h", "spell_char_del_h", "spell_space_del_h",
    "spell_space_add_h", "spell_leet_h"};

// Functionalities re-labelled offensive in the enriched set.
constexpr absl::string_view kOffensiveFunctionalities[] = {"profanity_nh",
                                                          "target_indiv_nh"};

constexpr absl::string_view kRecordFields[] = {
    "case_id",  "text",   "functionality", "gold",         "target_group",
    "category", "dominant", "refs",        "incites",      "group_insult",
    "in_group", "spelling"};

absl::Status RecordError(int line, absl::string_view message) {
  return absl::InvalidArgumentError(
      absl::StrCat("line ", line, ": malformed record: ", message));
}

absl::StatusOr<std::string> RequiredString(const json& record,
                                           absl::string_view key, int line) {
  auto it = record.find(key);
  if (it == record.end()) {
    return RecordError(line, absl::StrCat("missing field \"", key, "\""));
  }
  if (!it->is_string()) {
    return RecordError(line, absl::StrCat("field \"", key, "\" must be a string"));
  }
  return it->get<std::string>();
}

absl::StatusOr<std::optional<std::string>> OptionalString(const json& record,
                                                          absl::string_view key,
                                                          int line) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) return std::optional<std::string>();
  if (!it->is_string()) {
    return RecordError(
        line, absl::StrCat("field \"", key, "\" must be a string or null"));
  }
  return std::optional<std::string>(it->get<std::string>());
}

absl::StatusOr<std::optional<bool>> OptionalBool(const json& record,
                                                 absl::string_view key,
                                                 int line) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) return std::optional<bool>();
  if (!it->is_boolean()) {
    return RecordError(line,
                       absl::StrCat("field \"", key, "\" must be true or false"));
  }
  return std::optional<bool>(it->get<bool>());
}

absl::StatusOr<std::vector<std::string>> OptionalStringArray(
    const json& record, absl::string_view key, int line) {
  std::vector<std::string> out;
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) return out;
  if (!it->is_array()) {
    return RecordError(line,
                       absl::StrCat("field \"", key, "\" must be an array"));
  }
  for (const json& item : *it) {
    if (!item.is_string()) {
      return RecordError(
          line, absl::StrCat("field \"", key, "\" must contain only strings"));
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

absl::StatusOr<DiagnosticCase> ParseRecord(absl::string_view line_text,
                                           int line,
                                           const DiagnosticConfig& config) {
  const json record = json::parse(line_text, nullptr, false);
  if (record.is_discarded()) return RecordError(line, "invalid JSON");
  if (!record.is_object()) return RecordError(line, "expected a JSON object");
  for (const auto& [key, unused] : record.items()) {
    if (std::find(std::begin(kRecordFields), std::end(kRecordFields), key) ==
        std::end(kRecordFields)) {
      return RecordError(line, absl::StrCat("unknown field \"", key, "\""));
    }
  }

  DiagnosticCase c;
  ASSIGN_OR_RETURN(c.case_id, RequiredString(record, "case_id", line));
  ASSIGN_OR_RETURN(c.text, RequiredString(record, "text", line));
  ASSIGN_OR_RETURN(c.functionality, RequiredString(record, "functionality", line));
  ASSIGN_OR_RETURN(std::string gold, RequiredString(record, "gold", line));
  absl::StatusOr<GoldLabel> parsed_gold = ParseGoldLabel(gold);
  if (!parsed_gold.ok()) return RecordError(line, parsed_gold.status().message());
  c.gold = *parsed_gold;

  ASSIGN_OR_RETURN(std::optional<std::string> group,
                   OptionalString(record, "target_group", line));
  ASSIGN_OR_RETURN(std::optional<std::string> category,
                   OptionalString(record, "category", line));
  ASSIGN_OR_RETURN(std::optional<bool> dominant,
                   OptionalBool(record, "dominant", line));
  if (group.has_value()) {
    if (!category.has_value()) {
      return RecordError(line, "\"target_group\" requires \"category\"");
    }
    absl::StatusOr<TargetCategory> parsed = ParseTargetCategory(*category);
    if (!parsed.ok()) return RecordError(line, parsed.status().message());
    c.target_group =
        TargetGroupId{*parsed, NormalizeGroupName(*group), dominant.value_or(false)};
  } else if (category.has_value()) {
    return RecordError(line, "\"category\" given without \"target_group\"");
  }
  c.dominance = dominant.value_or(false);

  ASSIGN_OR_RETURN(std::vector<std::string> refs,
                   OptionalStringArray(record, "refs", line));
  for (const std::string& ref : refs) {
    absl::StatusOr<ExplicitReference> parsed = ParseExplicitReference(ref);
    if (!parsed.ok()) return RecordError(line, parsed.status().message());
    c.explicit_reference.insert(*parsed);
  }
  ASSIGN_OR_RETURN(std::vector<std::string> incites,
                   OptionalStringArray(record, "incites", line));
  for (const std::string& incitement : incites) {
    absl::StatusOr<Incitement> parsed = ParseIncitement(incitement);
    if (!parsed.ok()) return RecordError(line, parsed.status().message());
    c.incites.insert(*parsed);
  }
  ASSIGN_OR_RETURN(std::optional<bool> group_insult,
                   OptionalBool(record, "group_insult", line));
  c.group_insult = group_insult.value_or(false);
  ASSIGN_OR_RETURN(std::optional<bool> in_group,
                   OptionalBool(record, "in_group", line));
  c.in_group = in_group.value_or(false);
  ASSIGN_OR_RETURN(std::optional<bool> spelling,
                   OptionalBool(record, "spelling", line));
  c.spelling_variant = spelling.has_value()
                           ? *spelling
                           : config.spelling_functionalities.contains(
                                 c.functionality);
  return c;
}

}  // namespace

absl::string_view GoldLabelName(GoldLabel gold) {
  switch (gold) {
    case GoldLabel::kHateful:
      return "hateful";
    case GoldLabel::kNonHateful:
      return "non-hateful";
    case GoldLabel::kOffensive:
      return "offensive";
  }
  return "";
}

absl::StatusOr<GoldLabel> ParseGoldLabel(absl::string_view name) {
  if (name == "hateful") return GoldLabel::kHateful;
  if (name == "non-hateful") return GoldLabel::kNonHateful;
  if (name == "offensive") return GoldLabel::kOffensive;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown gold label \"", name,
      "\" (expected hateful, non-hateful or offensive)"));
}

absl::string_view ExplicitReferenceName(ExplicitReference ref) {
  switch (ref) {
    case ExplicitReference::kGroupCharacteristic:
      return "group_characteristic";
    case ExplicitReference::kStereotype:
      return "stereotype";
    case ExplicitReference::kSlur:
      return "slur";
  }
  return "";
}

absl::StatusOr<ExplicitReference> ParseExplicitReference(absl::string_view name) {
  if (name == "group_characteristic" || name == "gc") {
    return ExplicitReference::kGroupCharacteristic;
  }
  if (name == "stereotype" || name == "st") return ExplicitReference::kStereotype;
  if (name == "slur" || name == "sl") return ExplicitReference::kSlur;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown explicit reference \"", name,
      "\" (expected group_characteristic, stereotype or slur)"));
}

absl::string_view IncitementName(Incitement incitement) {
  switch (incitement) {
    case Incitement::kHate:
      return "hate";
    case Incitement::kViolence:
      return "violence";
    case Incitement::kDiscrimination:
      return "discrimination";
  }
  return "";
}

absl::StatusOr<Incitement> ParseIncitement(absl::string_view name) {
  if (name == "hate") return Incitement::kHate;
  if (name == "violence") return Incitement::kViolence;
  if (name == "discrimination") return Incitement::kDiscrimination;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown incitement \"", name,
                   "\" (expected hate, violence or discrimination)"));
}

AspectKind AspectFor(ExplicitReference ref) {
  switch (ref) {
    case ExplicitReference::kGroupCharacteristic:
      return AspectKind::kGroupCharacteristic;
    case ExplicitReference::kStereotype:
      return AspectKind::kStereotype;
    case ExplicitReference::kSlur:
      return AspectKind::kSlur;
  }
  return AspectKind::kGroupCharacteristic;
}

AspectKind AspectFor(Incitement incitement) {
  switch (incitement) {
    case Incitement::kHate:
      return AspectKind::kIncitesHate;
    case Incitement::kViolence:
      return AspectKind::kIncitesViolence;
    case Incitement::kDiscrimination:
      return AspectKind::kIncitesDiscrimination;
  }
  return AspectKind::kIncitesHate;
}

bool IsExtensionCase(const DiagnosticCase& c) {
  return absl::StartsWith(c.functionality, kExtensionPrefix);
}

bool IsBasePortionCase(const DiagnosticCase& c) {
  return !IsExtensionCase(c) && !c.dominance;
}

const DiagnosticConfig& DiagnosticConfig::Default() {
  static const DiagnosticConfig* const kDefault = [] {
    auto* config = new DiagnosticConfig;
    for (absl::string_view f : kSpellingFunctionalities) {
      config->spelling_functionalities.emplace(f);
    }
    for (absl::string_view f : kHateCheckFunctionalities) {
      config->known_functionalities.emplace(f);
    }
    for (absl::string_view f : kExtensionFunctionalities) {
      config->known_functionalities.emplace(f);
    }
    return config;
  }();
  return *kDefault;
}

absl::StatusOr<std::set<std::string>> ParseFunctionalityList(
    absl::string_view text) {
  std::set<std::string> out;
  int line = 0;
  for (absl::string_view raw : absl::StrSplit(text, '\n')) {
    ++line;
    const size_t hash = raw.find('#');
    if (hash != absl::string_view::npos) raw = raw.substr(0, hash);
    const absl::string_view name = absl::StripAsciiWhitespace(raw);
    if (name.empty()) continue;
    if (name.find_first_of(" \t") != absl::string_view::npos) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line, ": functionality names cannot contain spaces"));
    }
    out.emplace(name);
  }
  return out;
}

std::vector<std::string> FindCaseViolations(const DiagnosticCase& c,
                                            const DiagnosticConfig& config) {
  std::vector<std::string> violations;
  const std::string who = absl::StrCat("case \"", c.case_id, "\"");
  if (c.case_id.empty()) violations.push_back("case with empty case_id");
  if (c.text.empty()) violations.push_back(absl::StrCat(who, ": empty text"));

  if (c.target_group.has_value()) {
    const TargetGroupId& group = *c.target_group;
    if (group.group_name.empty()) {
      violations.push_back(absl::StrCat(who, ": empty target_group"));
    }
    const std::optional<TargetGroupId> known =
        config.vocabulary.Find(group.group_name);
    if (known.has_value()) {
      if (known->dominant != group.dominant) {
        violations.push_back(absl::StrCat(
            who, ": target group \"", group.group_name, "\" has dominant=",
            group.dominant ? "true" : "false", " but the vocabulary says ",
            known->dominant ? "true" : "false"));
      }
      if (known->category != group.category) {
        violations.push_back(absl::StrCat(
            who, ": target group \"", group.group_name, "\" has category ",
            TargetCategoryName(group.category), " but the vocabulary says ",
            TargetCategoryName(known->category)));
      }
    } else if (group.dominant) {
      violations.push_back(absl::StrCat(
          who, ": \"", group.group_name,
          "\" is flagged dominant but is not a dominant group of the "
          "vocabulary"));
    }
  }
  if (c.dominance &&
      (!c.target_group.has_value() || !c.target_group->dominant)) {
    violations.push_back(
        absl::StrCat(who, ": dominance=true requires a dominant target group"));
  }
  if (c.gold == GoldLabel::kOffensive && !IsExtensionCase(c) &&
      std::find(std::begin(kOffensiveFunctionalities),
                std::end(kOffensiveFunctionalities),
                c.functionality) == std::end(kOffensiveFunctionalities)) {
    violations.push_back(absl::StrCat(
        who, ": gold=offensive is only allowed for ext_* cases, profanity_nh "
             "and target_indiv_nh (functionality is \"",
        c.functionality, "\")"));
  }
  if (c.in_group && !c.explicit_reference.contains(ExplicitReference::kSlur)) {
    violations.push_back(
        absl::StrCat(who, ": in_group=true requires the slur reference"));
  }
  if (c.incites.contains(Incitement::kViolence)) {
    if (c.incites.contains(Incitement::kHate)) {
      violations.push_back(absl::StrCat(
          who, ": incites violence and hate; violence cases are marked "
               "violence only"));
    }
    if (c.incites.contains(Incitement::kDiscrimination)) {
      violations.push_back(absl::StrCat(
          who, ": incites violence and discrimination; violence cases are "
               "marked violence only"));
    }
  }
  return violations;
}

DiagnosticSet::DiagnosticSet(std::vector<DiagnosticCase> cases,
                             Provenance provenance)
    : cases_(std::move(cases)), provenance_(std::move(provenance)) {
  index_.reserve(cases_.size());
  for (size_t i = 0; i < cases_.size(); ++i) index_.emplace(cases_[i].case_id, i);
}

absl::StatusOr<DiagnosticSet> DiagnosticSet::Create(
    std::vector<DiagnosticCase> cases, Provenance provenance,
    const DiagnosticConfig& config, std::vector<std::string>* warnings) {
  std::vector<std::string> violations;
  std::unordered_map<std::string, size_t> seen;
  seen.reserve(cases.size());
  for (const DiagnosticCase& c : cases) {
    if (!seen.emplace(c.case_id, 0).second) {
      violations.push_back(
          absl::StrCat("duplicate case_id \"", c.case_id, "\""));
    }
    for (std::string& v : FindCaseViolations(c, config)) {
      violations.push_back(std::move(v));
    }
    if (warnings != nullptr) {
      if (!config.known_functionalities.contains(c.functionality)) {
        warnings->push_back(absl::StrCat("case \"", c.case_id,
                                         "\": unknown functionality \"",
                                         c.functionality, "\""));
      }
      if (c.target_group.has_value() &&
          !config.vocabulary.Contains(c.target_group->group_name)) {
        warnings->push_back(absl::StrCat("case \"", c.case_id,
                                         "\": target group \"",
                                         c.target_group->group_name,
                                         "\" is not in the group vocabulary"));
      }
    }
  }
  if (!violations.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("diagnostic set rejected (", violations.size(),
                     " violation", violations.size() == 1 ? "" : "s",
                     "): ", absl::StrJoin(violations, "; ")));
  }
  return DiagnosticSet(std::move(cases), std::move(provenance));
}

const DiagnosticCase* DiagnosticSet::Find(absl::string_view case_id) const {
  auto it = index_.find(std::string(case_id));
  return it == index_.end() ? nullptr : &cases_[it->second];
}

std::vector<std::string> DiagnosticSet::Ids() const {
  std::vector<std::string> ids;
  ids.reserve(cases_.size());
  for (const DiagnosticCase& c : cases_) ids.push_back(c.case_id);
  return ids;
}

absl::StatusOr<LoadedDiagnosticSet> ParseDiagnosticSet(
    absl::string_view text, const DiagnosticConfig& config) {
  std::vector<DiagnosticCase> cases;
  std::vector<std::string> violations;
  std::unordered_map<std::string, int> first_line;
  int line = 0;
  for (absl::string_view raw : absl::StrSplit(text, '\n')) {
    ++line;
    if (absl::StripAsciiWhitespace(raw).empty()) continue;
    ASSIGN_OR_RETURN(DiagnosticCase c, ParseRecord(raw, line, config));
    auto [it, inserted] = first_line.emplace(c.case_id, line);
    if (!inserted) {
      violations.push_back(absl::StrCat("line ", line, ": duplicate case_id \"",
                                        c.case_id, "\" (first seen on line ",
                                        it->second, ")"));
      continue;
    }
    for (std::string& v : FindCaseViolations(c, config)) {
      violations.push_back(absl::StrCat("line ", line, ": ", v));
    }
    cases.push_back(std::move(c));
  }
  if (!violations.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("diagnostic set rejected (", violations.size(),
                     " violation", violations.size() == 1 ? "" : "s",
                     "): ", absl::StrJoin(violations, "; ")));
  }
  LoadedDiagnosticSet loaded;
  Provenance provenance{Sha256Hex(text), std::string(kDiagnosticFormatVersion)};
  ASSIGN_OR_RETURN(loaded.set,
                   DiagnosticSet::Create(std::move(cases), std::move(provenance),
                                         config, &loaded.warnings));
  return loaded;
}

absl::StatusOr<LoadedDiagnosticSet> LoadDiagnosticSet(
    const std::string& path, const DiagnosticConfig& config) {
  ASSIGN_OR_RETURN(std::string text, ReadFileToString(path));
  absl::StatusOr<LoadedDiagnosticSet> loaded = ParseDiagnosticSet(text, config);
  if (!loaded.ok()) {
    return absl::Status(loaded.status().code(),
                        absl::StrCat(path, ": ", loaded.status().message()));
  }
  return loaded;
}

std::string SerializeDiagnosticCase(const DiagnosticCase& c) {
  nlohmann::ordered_json record;
  record["case_id"] = c.case_id;
  record["text"] = c.text;
  record["functionality"] = c.functionality;
  record["gold"] = GoldLabelName(c.gold);
  if (c.target_group.has_value()) {
    record["target_group"] = c.target_group->group_name;
    record["category"] = TargetCategoryName(c.target_group->category);
  } else {
    record["target_group"] = nullptr;
    record["category"] = nullptr;
  }
  record["dominant"] = c.dominance;
  record["refs"] = nlohmann::ordered_json::array();
  for (ExplicitReference ref : c.explicit_reference) {
    record["refs"].push_back(ExplicitReferenceName(ref));
  }
  record["incites"] = nlohmann::ordered_json::array();
  for (Incitement incitement : c.incites) {
    record["incites"].push_back(IncitementName(incitement));
  }
  record["group_insult"] = c.group_insult;
  record["in_group"] = c.in_group;
  record["spelling"] = c.spelling_variant;
  return record.dump();
}

std::string SerializeDiagnosticSet(const DiagnosticSet& set) {
  std::string out;
  for (const DiagnosticCase& c : set.cases()) {
    out.append(SerializeDiagnosticCase(c));
    out.push_back('\n');
  }
  return out;
}

DiagnosticSet DiagnosticSet::Subset(
    const std::function<bool(const DiagnosticCase&)>& keep) const {
  std::vector<DiagnosticCase> kept;
  for (const DiagnosticCase& c : cases_) {
    if (keep(c)) kept.push_back(c);
  }
  return DiagnosticSet(std::move(kept), provenance_);
}

DiagnosticSet FilterSpelling(const DiagnosticSet& set) {
  return set.Subset(
      [](const DiagnosticCase& c) { return !c.spelling_variant; });
}

OffensiveSlice SelectOffensiveSlice(const DiagnosticSet& set) {
  OffensiveSlice slice;
  for (const DiagnosticCase& c : set.cases()) {
    if (c.gold == GoldLabel::kOffensive) slice.case_ids.push_back(c.case_id);
  }
  slice.count = slice.case_ids.size();
  slice.matches_published_count =
      std::find(std::begin(kPublishedOffensiveSliceSizes),
                std::end(kPublishedOffensiveSliceSizes),
                slice.count) != std::end(kPublishedOffensiveSliceSizes);
  return slice;
}

DiagnosticSummary SummarizeDiagnosticSet(const DiagnosticSet& set) {
  DiagnosticSummary summary;
  summary.total = set.size();
  for (const DiagnosticCase& c : set.cases()) {
    ++summary.by_gold[c.gold];
    if (IsBasePortionCase(c)) {
      ++summary.base_cases;
      if (c.gold == GoldLabel::kHateful) ++summary.base_hateful;
    }
    if (IsExtensionCase(c)) ++summary.extension_cases;
    if (c.dominance) ++summary.dominant_cases;
    if (c.spelling_variant) ++summary.spelling_variants;
  }
  summary.offensive = SelectOffensiveSlice(set);
  for (const AspectSelector& selector : DefaultSelectors(set)) {
    const AspectSelector aspect = selector.WithPolarity(Polarity::kAll);
    auto& counts = summary.aspect_counts[aspect.ToString()];
    if (counts != std::array<size_t, 3>{}) continue;
    for (const DiagnosticCase& c : set.cases()) {
      if (!aspect.MatchesAspect(c)) continue;
      ++counts[static_cast<size_t>(c.gold)];
    }
  }
  return summary;
}

}  // namespace defverify
