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

#ifndef DEFVERIFY_CORPUS_H_
#define DEFVERIFY_CORPUS_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace defverify {

// One training (or test) record of a dataset corpus.
struct CorpusRecord {
  std::string record_id;
  std::string text;
  // Raw dataset label, e.g. "sexism" or "hate".
  std::string label;

  bool operator==(const CorpusRecord&) const = default;
};

// Line-delimited {"record_id", "text", "label"} objects. Empty text or label,
// duplicate ids and unknown fields are rejected with the line number.
absl::StatusOr<std::vector<CorpusRecord>> ParseCorpus(absl::string_view text);
absl::StatusOr<std::vector<CorpusRecord>> LoadCorpus(const std::string& path);

std::string SerializeCorpus(const std::vector<CorpusRecord>& records);

}  // namespace defverify

#endif  // DEFVERIFY_CORPUS_H_
