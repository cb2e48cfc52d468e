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

// Model predictions: the line-delimited prediction file, per-seed
// completeness checks, label mapping and per-case correctness.

#ifndef DEFVERIFY_PREDICTION_H_
#define DEFVERIFY_PREDICTION_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "defverify/definition_spec.h"
#include "defverify/expectation.h"

namespace defverify {

struct PredictionRecord {
  std::string case_id;
  std::string raw_label;
  // Audit only; correctness always uses the label.
  std::optional<std::map<std::string, double>> scores;
  std::string seed_id;
  std::string model_id;
  // Set by MapLabels.
  std::optional<std::string> canonical_label;

  bool operator==(const PredictionRecord&) const = default;
};

// Checks the scores invariant: values in [0, 1], sum within 1e-6 of 1 and
// raw_label among the maximal entries.
absl::Status ValidatePredictionScores(const PredictionRecord& record);

// Predictions of one model, keyed by (case_id, seed_id). Immutable.
class PredictionSet {
 public:
  PredictionSet() = default;

  // Rejects duplicate (case_id, seed_id) keys, empty ids, mixed model ids
  // and invalid scores.
  static absl::StatusOr<PredictionSet> Create(
      std::vector<PredictionRecord> records);

  // Empty for an empty set.
  const std::string& model_id() const { return model_id_; }
  const std::set<std::string>& seeds() const { return seeds_; }
  // Sorted by (seed_id, case_id).
  const std::vector<PredictionRecord>& records() const { return records_; }
  size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  // True when every record carries a canonical label.
  bool canonical() const;

  const PredictionRecord* Find(absl::string_view case_id,
                               absl::string_view seed_id) const;

  // Every seed must cover exactly `expected_ids`; ids in `ignorable_ids`
  // may additionally appear and are not reported. The error names each
  // incomplete seed with its missing ids, and any unexpected ids.
  absl::Status CheckCoverage(
      const std::vector<std::string>& expected_ids,
      const std::set<std::string>& ignorable_ids = {}) const;

  // Records whose case id is in `keep`.
  PredictionSet Restrict(const std::set<std::string>& keep) const;

  bool operator==(const PredictionSet& other) const {
    return model_id_ == other.model_id_ && records_ == other.records_;
  }

 private:
  std::string model_id_;
  std::set<std::string> seeds_;
  std::vector<PredictionRecord> records_;
  std::map<std::pair<std::string, std::string>, size_t> index_;
};

// Line-delimited {"case_id", "raw_label", "scores"?, "seed_id",
// "model_id"} records (docs/prediction-format.md). Completeness is checked
// against `expected_ids` (see CheckCoverage).
absl::StatusOr<PredictionSet> ParsePredictions(
    absl::string_view text, const std::vector<std::string>& expected_ids,
    const std::set<std::string>& ignorable_ids = {});
absl::StatusOr<PredictionSet> LoadPredictions(
    const std::string& path, const std::vector<std::string>& expected_ids,
    const std::set<std::string>& ignorable_ids = {});

// Parses without any completeness check.
absl::StatusOr<PredictionSet> ParsePredictionRecords(absl::string_view text);

std::string SerializePredictions(const PredictionSet& set);

// Adds canonical labels. Every raw label must be mapped by the scheme; the
// error lists each unmapped label with its record count.
absl::StatusOr<PredictionSet> MapLabels(const PredictionSet& set,
                                        const LabelScheme& scheme);

struct Correctness {
  bool correct = false;
  // True for cases without an expectation: `correct` then compares the
  // hate-equivalence of the prediction with gold == hateful.
  bool informational = false;

  bool operator==(const Correctness&) const = default;
};

// Correctness of a canonical prediction against one expectation.
Correctness JudgePrediction(absl::string_view canonical_label,
                            const Expectation& expectation,
                            const LabelScheme& scheme);

// Keyed by (case_id, seed_id). Every prediction must have a table entry and
// every table entry a prediction in every seed.
absl::StatusOr<std::map<std::pair<std::string, std::string>, Correctness>>
PooledCorrectness(const PredictionSet& set, const ExpectationTable& table,
                  const LabelScheme& scheme);

}  // namespace defverify

#endif  // DEFVERIFY_PREDICTION_H_
