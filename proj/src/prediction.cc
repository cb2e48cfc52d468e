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

#include <algorithm>
#include <cmath>
#include <tuple>
#include <unordered_set>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "defverify/file_util.h"
#include "defverify/status_macros.h"
#include "json.hpp"

namespace defverify {
namespace {

constexpr double kScoreSumTolerance = 1e-6;
constexpr size_t kMaxListedIds = 10;

std::string ListIds(const std::vector<std::string>& ids) {
  std::vector<std::string> shown;
  for (size_t i = 0; i < ids.size() && i < kMaxListedIds; ++i) {
    shown.push_back(absl::StrCat("\"", ids[i], "\""));
  }
  std::string out = absl::StrJoin(shown, ", ");
  if (ids.size() > kMaxListedIds) {
    absl::StrAppend(&out, " and ", ids.size() - kMaxListedIds, " more");
  }
  return out;
}

absl::StatusOr<PredictionRecord> ParseRecordLine(absl::string_view line) {
  const nlohmann::json doc = nlohmann::json::parse(
      line.begin(), line.end(), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    return absl::InvalidArgumentError("invalid JSON object");
  }
  PredictionRecord record;
  for (const auto& [key, value] : doc.items()) {
    if (key == "scores") {
      if (value.is_null()) continue;
      if (!value.is_object()) {
        return absl::InvalidArgumentError("\"scores\" must be an object");
      }
      std::map<std::string, double> scores;
      for (const auto& [label, score] : value.items()) {
        if (!score.is_number()) {
          return absl::InvalidArgumentError(
              absl::StrCat("score for \"", label, "\" is not a number"));
        }
        scores[label] = score.get<double>();
      }
      record.scores = std::move(scores);
      continue;
    }
    std::string* field = key == "case_id"     ? &record.case_id
                         : key == "raw_label" ? &record.raw_label
                         : key == "seed_id"   ? &record.seed_id
                         : key == "model_id"  ? &record.model_id
                                              : nullptr;
    if (field == nullptr) {
      return absl::InvalidArgumentError(absl::StrCat("unknown field \"", key, "\""));
    }
    if (!value.is_string()) {
      return absl::InvalidArgumentError(
          absl::StrCat("field \"", key, "\" must be a string"));
    }
    *field = value.get<std::string>();
  }
  return record;
}

}  // namespace

absl::Status ValidatePredictionScores(const PredictionRecord& record) {
  if (!record.scores.has_value()) return absl::OkStatus();
  const auto& scores = *record.scores;
  if (scores.empty()) return absl::InvalidArgumentError("scores are empty");
  double sum = 0.0;
  double best = -1.0;
  for (const auto& [label, score] : scores) {
    if (!(score >= 0.0 && score <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("score for \"", label, "\" is outside [0, 1]"));
    }
    sum += score;
    best = std::max(best, score);
  }
  if (std::abs(sum - 1.0) > kScoreSumTolerance) {
    return absl::InvalidArgumentError(
        absl::StrCat("scores sum to ", sum, ", not 1"));
  }
  auto it = scores.find(record.raw_label);
  if (it == scores.end() || it->second != best) {
    return absl::InvalidArgumentError(absl::StrCat(
        "raw_label \"", record.raw_label, "\" is not the argmax of scores"));
  }
  return absl::OkStatus();
}

absl::StatusOr<PredictionSet> PredictionSet::Create(
    std::vector<PredictionRecord> records) {
  PredictionSet set;
  std::sort(records.begin(), records.end(),
            [](const PredictionRecord& a, const PredictionRecord& b) {
              return std::tie(a.seed_id, a.case_id) < std::tie(b.seed_id, b.case_id);
            });
  for (size_t i = 0; i < records.size(); ++i) {
    const PredictionRecord& r = records[i];
    const auto where = [&r] {
      return absl::StrCat("record (case_id \"", r.case_id, "\", seed_id \"",
                          r.seed_id, "\")");
    };
    if (r.case_id.empty()) return absl::InvalidArgumentError("record with empty case_id");
    if (r.seed_id.empty()) {
      return absl::InvalidArgumentError(absl::StrCat(where(), ": empty seed_id"));
    }
    if (r.raw_label.empty()) {
      return absl::InvalidArgumentError(absl::StrCat(where(), ": empty raw_label"));
    }
    if (i == 0) {
      set.model_id_ = r.model_id;
    } else if (r.model_id != set.model_id_) {
      return absl::InvalidArgumentError(
          absl::StrCat(where(), ": model_id \"", r.model_id, "\" differs from \"",
                       set.model_id_, "\""));
    }
    if (absl::Status s = ValidatePredictionScores(r); !s.ok()) {
      return absl::InvalidArgumentError(absl::StrCat(where(), ": ", s.message()));
    }
    if (!set.index_.emplace(std::make_pair(r.case_id, r.seed_id), i).second) {
      return absl::InvalidArgumentError(absl::StrCat("duplicate ", where()));
    }
    set.seeds_.insert(r.seed_id);
  }
  set.records_ = std::move(records);
  return set;
}

bool PredictionSet::canonical() const {
  return std::all_of(records_.begin(), records_.end(),
                     [](const PredictionRecord& r) {
                       return r.canonical_label.has_value();
                     });
}

const PredictionRecord* PredictionSet::Find(absl::string_view case_id,
                                            absl::string_view seed_id) const {
  auto it = index_.find({std::string(case_id), std::string(seed_id)});
  return it == index_.end() ? nullptr : &records_[it->second];
}

absl::Status PredictionSet::CheckCoverage(
    const std::vector<std::string>& expected_ids,
    const std::set<std::string>& ignorable_ids) const {
  if (seeds_.empty()) {
    if (expected_ids.empty()) return absl::OkStatus();
    return absl::InvalidArgumentError(absl::StrCat(
        "no predictions for ", expected_ids.size(), " expected case id(s)"));
  }
  const std::unordered_set<std::string> expected(expected_ids.begin(),
                                                 expected_ids.end());
  std::vector<std::string> problems;
  std::map<std::string, std::vector<std::string>> extra_by_seed;
  for (const PredictionRecord& r : records_) {
    if (!expected.contains(r.case_id) && !ignorable_ids.contains(r.case_id)) {
      extra_by_seed[r.seed_id].push_back(r.case_id);
    }
  }
  for (const std::string& seed : seeds_) {
    std::vector<std::string> missing;
    for (const std::string& id : expected_ids) {
      if (Find(id, seed) == nullptr) missing.push_back(id);
    }
    if (!missing.empty()) {
      problems.push_back(absl::StrCat("incomplete seed \"", seed, "\": missing ",
                                      missing.size(), " case id(s): ",
                                      ListIds(missing)));
    }
    if (auto it = extra_by_seed.find(seed); it != extra_by_seed.end()) {
      problems.push_back(absl::StrCat("seed \"", seed, "\" has ", it->second.size(),
                                      " case id(s) not in the diagnostic set: ",
                                      ListIds(it->second)));
    }
  }
  if (problems.empty()) return absl::OkStatus();
  return absl::InvalidArgumentError(absl::StrJoin(problems, "; "));
}

PredictionSet PredictionSet::Restrict(const std::set<std::string>& keep) const {
  std::vector<PredictionRecord> kept;
  for (const PredictionRecord& r : records_) {
    if (keep.contains(r.case_id)) kept.push_back(r);
  }
  // Already validated, so Create cannot fail.
  return *Create(std::move(kept));
}

absl::StatusOr<PredictionSet> ParsePredictionRecords(absl::string_view text) {
  std::vector<PredictionRecord> records;
  std::map<std::pair<std::string, std::string>, int> first_line;
  int line_number = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_number;
    if (absl::StripAsciiWhitespace(line).empty()) continue;
    const auto error = [line_number](absl::string_view message) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_number, ": malformed prediction record: ", message));
    };
    absl::StatusOr<PredictionRecord> record = ParseRecordLine(line);
    if (!record.ok()) return error(record.status().message());
    for (const auto& [name, value] :
         {std::pair<absl::string_view, const std::string*>{"case_id", &record->case_id},
          {"raw_label", &record->raw_label},
          {"seed_id", &record->seed_id},
          {"model_id", &record->model_id}}) {
      if (value->empty()) return error(absl::StrCat("missing or empty ", name));
    }
    if (absl::Status s = ValidatePredictionScores(*record); !s.ok()) {
      return error(s.message());
    }
    auto [it, inserted] = first_line.emplace(
        std::make_pair(record->case_id, record->seed_id), line_number);
    if (!inserted) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_number, ": duplicate (case_id \"", record->case_id,
          "\", seed_id \"", record->seed_id, "\") (first seen on line ",
          it->second, ")"));
    }
    records.push_back(*std::move(record));
  }
  return PredictionSet::Create(std::move(records));
}

absl::StatusOr<PredictionSet> ParsePredictions(
    absl::string_view text, const std::vector<std::string>& expected_ids,
    const std::set<std::string>& ignorable_ids) {
  ASSIGN_OR_RETURN(PredictionSet set, ParsePredictionRecords(text));
  RETURN_IF_ERROR(set.CheckCoverage(expected_ids, ignorable_ids));
  return set;
}

absl::StatusOr<PredictionSet> LoadPredictions(
    const std::string& path, const std::vector<std::string>& expected_ids,
    const std::set<std::string>& ignorable_ids) {
  ASSIGN_OR_RETURN(std::string text, ReadFileToString(path));
  absl::StatusOr<PredictionSet> set =
      ParsePredictions(text, expected_ids, ignorable_ids);
  if (!set.ok()) {
    return absl::Status(set.status().code(),
                        absl::StrCat(path, ": ", set.status().message()));
  }
  return set;
}

std::string SerializePredictions(const PredictionSet& set) {
  std::string out;
  for (const PredictionRecord& r : set.records()) {
    nlohmann::ordered_json doc;
    doc["case_id"] = r.case_id;
    doc["raw_label"] = r.raw_label;
    if (r.scores.has_value()) {
      nlohmann::ordered_json scores = nlohmann::ordered_json::object();
      for (const auto& [label, score] : *r.scores) scores[label] = score;
      doc["scores"] = std::move(scores);
    }
    doc["seed_id"] = r.seed_id;
    doc["model_id"] = r.model_id;
    out.append(doc.dump());
    out.push_back('\n');
  }
  return out;
}

absl::StatusOr<PredictionSet> MapLabels(const PredictionSet& set,
                                        const LabelScheme& scheme) {
  std::vector<PredictionRecord> mapped = set.records();
  std::map<std::string, size_t> unmapped;
  for (PredictionRecord& r : mapped) {
    r.canonical_label = scheme.ToCanonical(r.raw_label);
    if (!r.canonical_label.has_value()) ++unmapped[r.raw_label];
  }
  if (!unmapped.empty()) {
    std::vector<std::string> parts;
    for (const auto& [label, count] : unmapped) {
      parts.push_back(absl::StrCat("\"", label, "\" (", count, ")"));
    }
    return absl::InvalidArgumentError(
        absl::StrCat("raw labels not mapped by scheme \"", scheme.scheme_name,
                     "\": ", absl::StrJoin(parts, ", ")));
  }
  return PredictionSet::Create(std::move(mapped));
}

Correctness JudgePrediction(absl::string_view canonical_label,
                            const Expectation& expectation,
                            const LabelScheme& scheme) {
  if (expectation.has_expectation()) {
    const bool correct =
        std::find(expectation.labels.begin(), expectation.labels.end(),
                  canonical_label) != expectation.labels.end();
    return {correct, false};
  }
  const bool predicted_hate = scheme.IsHateEquivalent(canonical_label);
  return {predicted_hate == (expectation.gold == GoldLabel::kHateful), true};
}

absl::StatusOr<std::map<std::pair<std::string, std::string>, Correctness>>
PooledCorrectness(const PredictionSet& set, const ExpectationTable& table,
                  const LabelScheme& scheme) {
  std::vector<std::string> ids;
  ids.reserve(table.size());
  for (const Expectation& e : table.entries()) ids.push_back(e.case_id);
  RETURN_IF_ERROR(set.CheckCoverage(ids));
  std::map<std::pair<std::string, std::string>, Correctness> out;
  for (const PredictionRecord& r : set.records()) {
    if (!r.canonical_label.has_value()) {
      return absl::FailedPreconditionError(absl::StrCat(
          "prediction for \"", r.case_id, "\" has no canonical label"));
    }
    out.emplace(std::make_pair(r.case_id, r.seed_id),
                JudgePrediction(*r.canonical_label, *table.Find(r.case_id), scheme));
  }
  return out;
}

}  // namespace defverify
