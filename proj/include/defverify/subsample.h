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

// Training-set composition utilities: shrink a labelled corpus while keeping
// its class ratio, or fix the share of one class.

#ifndef DEFVERIFY_SUBSAMPLE_H_
#define DEFVERIFY_SUBSAMPLE_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"

namespace defverify {

// Per-class quotas for `target_total` rows by largest-remainder rounding of
// count * target_total / total. Remainder ties go to the class that appears
// first in `labels`. Fails when target_total exceeds the data or when a
// class would receive no rows.
absl::StatusOr<std::map<std::string, size_t>> ProportionalQuotas(
    std::span<const std::string> labels, size_t target_total);

// Selects `target_total` indices preserving class proportions (see
// ProportionalQuotas). The result is sorted, duplicate-free and a pure
// function of (labels, target_total, seed).
absl::StatusOr<std::vector<size_t>> SubsamplePreserveRatio(
    std::span<const std::string> labels, size_t target_total, uint64_t seed);

// round(n_other * fraction / (1 - fraction)), the number of minority rows
// that make up `fraction` of the result when every other row is kept.
absl::StatusOr<size_t> MinorityCountForFraction(size_t other_count,
                                                double fraction);

// Keeps every row not labelled `minority_label` and subsamples the minority
// rows to MinorityCountForFraction(...). Fails when the minority label is
// absent, the fraction is outside (0, 1), or more minority rows would be
// needed than exist.
absl::StatusOr<std::vector<size_t>> SubsampleFixMinorityFraction(
    std::span<const std::string> labels, const std::string& minority_label,
    double fraction, uint64_t seed);

}  // namespace defverify

#endif  // DEFVERIFY_SUBSAMPLE_H_
