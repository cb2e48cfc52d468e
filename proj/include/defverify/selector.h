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

// Aspect selectors: which slice of the diagnostic set a report covers.
//
// Text form: `<aspect>[=<value>][/<polarity>]`, for example `target=women/h`,
// `dominance/nh`, `ref=slur`, `incites=violence/h`, `all/off`. Polarity is
// one of h (hateful), nh (non-hateful) and off (offensive); without a suffix
// every gold label is selected.

#ifndef DEFVERIFY_SELECTOR_H_
#define DEFVERIFY_SELECTOR_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "defverify/diagnostic_set.h"

namespace defverify {

enum class Polarity { kAll, kHateful, kNonHateful, kOffensive };

enum class SelectorKind {
  kAll,
  kTargetGroup,
  kCategory,
  kDominance,
  kExplicitReference,
  kIncitement,
  kGroupInsult,
  kInGroup,
  kFunctionality,
};

// "all" | "h" | "nh" | "off".
absl::string_view PolarityName(Polarity polarity);

struct AspectSelector {
  SelectorKind kind = SelectorKind::kAll;
  // Group name, category name, reference or incitement name, functionality
  // tag, or "true"/"false" for the flag kinds. Empty for kAll.
  std::string value;
  Polarity polarity = Polarity::kAll;

  std::string ToString() const;
  // Ignores polarity.
  bool MatchesAspect(const DiagnosticCase& c) const;
  bool Matches(const DiagnosticCase& c) const;
  AspectSelector WithPolarity(Polarity p) const {
    AspectSelector copy = *this;
    copy.polarity = p;
    return copy;
  }

  auto operator<=>(const AspectSelector&) const = default;
};

// Rejects unknown aspect keys, malformed values and unknown polarities.
// Values are normalized (e.g. `ref=sl` becomes `ref=slur`).
absl::StatusOr<AspectSelector> ParseSelector(absl::string_view text);

// Ids of matching cases in set order. Target groups must be known to the
// vocabulary or appear in the set.
absl::StatusOr<std::vector<std::string>> SliceByAspect(
    const DiagnosticSet& set, const AspectSelector& selector,
    const GroupVocabulary& vocabulary = GroupVocabulary::Default());

// One selector per aspect or sub-aspect that has cases in `set`, split into
// h and nh when both polarities occur. Deterministic order: target groups
// (vocabulary order, then unknown groups by name), dominance, explicit
// references, incitements, group insult, in-group.
std::vector<AspectSelector> DefaultSelectors(
    const DiagnosticSet& set,
    const GroupVocabulary& vocabulary = GroupVocabulary::Default());

}  // namespace defverify

#endif  // DEFVERIFY_SELECTOR_H_
