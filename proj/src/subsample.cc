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

#include "defverify/subsample.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include "absl/strings/str_cat.h"
#include "defverify/status_macros.h"

namespace defverify {
namespace {

// Class label -> row indices, classes in order of first appearance.
std::vector<std::pair<std::string, std::vector<size_t>>> GroupByLabel(
    std::span<const std::string> labels) {
  std::vector<std::pair<std::string, std::vector<size_t>>> groups;
  std::map<std::string, size_t> position;
  for (size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = position.emplace(labels[i], groups.size());
    if (inserted) groups.emplace_back(labels[i], std::vector<size_t>{});
    groups[it->second].second.push_back(i);
  }
  return groups;
}

// Draws `count` members of `pool` uniformly without replacement.
void SampleInto(std::vector<size_t> pool, size_t count, std::mt19937_64& rng,
                std::vector<size_t>* out) {
  std::shuffle(pool.begin(), pool.end(), rng);
  out->insert(out->end(), pool.begin(), pool.begin() + count);
}

}  // namespace

absl::StatusOr<std::map<std::string, size_t>> ProportionalQuotas(
    std::span<const std::string> labels, size_t target_total) {
  const size_t total = labels.size();
  if (target_total > total) {
    return absl::InvalidArgumentError(
        absl::StrCat("target_total ", target_total, " exceeds the ", total,
                     " available rows"));
  }
  const auto groups = GroupByLabel(labels);
  struct Share {
    std::string label;
    size_t quota;
    uint64_t remainder;
    size_t order;
  };
  std::vector<Share> shares;
  size_t assigned = 0;
  for (size_t i = 0; i < groups.size(); ++i) {
    const uint64_t scaled =
        static_cast<uint64_t>(groups[i].second.size()) * target_total;
    shares.push_back({groups[i].first, static_cast<size_t>(scaled / total),
                      scaled % total, i});
    assigned += shares.back().quota;
  }
  std::vector<Share*> by_remainder;
  for (Share& share : shares) by_remainder.push_back(&share);
  std::stable_sort(by_remainder.begin(), by_remainder.end(),
                   [](const Share* a, const Share* b) {
                     return a->remainder > b->remainder;
                   });
  for (size_t i = 0; assigned < target_total; ++i, ++assigned) {
    ++by_remainder[i]->quota;
  }
  std::map<std::string, size_t> quotas;
  for (const Share& share : shares) {
    if (share.quota == 0) {
      return absl::InvalidArgumentError(absl::StrCat(
          "target_total ", target_total, " leaves class \"", share.label,
          "\" without rows"));
    }
    quotas[share.label] = share.quota;
  }
  return quotas;
}

absl::StatusOr<std::vector<size_t>> SubsamplePreserveRatio(
    std::span<const std::string> labels, size_t target_total, uint64_t seed) {
  ASSIGN_OR_RETURN(auto quotas, ProportionalQuotas(labels, target_total));
  std::mt19937_64 rng(seed);
  std::vector<size_t> selected;
  selected.reserve(target_total);
  for (auto& [label, rows] : GroupByLabel(labels)) {
    SampleInto(std::move(rows), quotas.at(label), rng, &selected);
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

absl::StatusOr<size_t> MinorityCountForFraction(size_t other_count,
                                                double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("fraction ", fraction, " is not in (0, 1)"));
  }
  const double exact =
      static_cast<double>(other_count) * fraction / (1.0 - fraction);
  return static_cast<size_t>(std::llround(exact));
}

absl::StatusOr<std::vector<size_t>> SubsampleFixMinorityFraction(
    std::span<const std::string> labels, const std::string& minority_label,
    double fraction, uint64_t seed) {
  std::vector<size_t> minority;
  std::vector<size_t> selected;
  for (size_t i = 0; i < labels.size(); ++i) {
    (labels[i] == minority_label ? minority : selected).push_back(i);
  }
  if (minority.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("minority label \"", minority_label, "\" does not occur"));
  }
  ASSIGN_OR_RETURN(size_t wanted,
                   MinorityCountForFraction(selected.size(), fraction));
  if (wanted > minority.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "fraction ", fraction, " needs ", wanted, " \"", minority_label,
        "\" rows but only ", minority.size(), " exist"));
  }
  if (wanted == 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "fraction ", fraction, " rounds to zero \"", minority_label,
        "\" rows"));
  }
  std::mt19937_64 rng(seed);
  SampleInto(std::move(minority), wanted, rng, &selected);
  std::sort(selected.begin(), selected.end());
  return selected;
}

}  // namespace defverify
