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

// Reading and writing `.defspec` documents (a strict TOML subset, see
// docs/defspec-format.md) and label-scheme JSON files.

#ifndef DEFVERIFY_SPEC_FORMAT_H_
#define DEFVERIFY_SPEC_FORMAT_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "defverify/definition_spec.h"

namespace defverify {

struct ParsedDefinitionSpec {
  DefinitionSpec spec;
  // One entry per recoverable issue, e.g. an aspect left out of the document.
  std::vector<std::string> warnings;
};

// Syntax errors carry "line L, column C"; unknown keys and invariant
// violations are rejected with every problem listed.
absl::StatusOr<ParsedDefinitionSpec> ParseDefinitionSpec(absl::string_view text);

std::string SerializeDefinitionSpec(const DefinitionSpec& spec);

absl::StatusOr<ParsedDefinitionSpec> ReadDefinitionSpecFile(
    const std::string& path);

// Resolves a built-in dataset name first, then a file path.
absl::StatusOr<DefinitionSpec> ResolveDefinitionSpec(absl::string_view source);

// {"name": ..., "canonical_labels": [...], "hate_equivalent": [...],
//  "raw_to_canonical": {...}}
absl::StatusOr<LabelScheme> ParseLabelSchemeJson(absl::string_view text);
std::string SerializeLabelSchemeJson(const LabelScheme& scheme);

// Resolves a built-in scheme name first, then a JSON file path.
absl::StatusOr<LabelScheme> ResolveLabelScheme(absl::string_view source);

}  // namespace defverify

#endif  // DEFVERIFY_SPEC_FORMAT_H_
