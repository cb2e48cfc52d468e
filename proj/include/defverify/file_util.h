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

#ifndef DEFVERIFY_FILE_UTIL_H_
#define DEFVERIFY_FILE_UTIL_H_

#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace defverify {

absl::StatusOr<std::string> ReadFileToString(const std::string& path);

// Writes to a temporary sibling and renames it over `path`.
absl::Status WriteFileAtomically(const std::string& path,
                                 absl::string_view contents);

// Lowercase hex SHA-256.
std::string Sha256Hex(absl::string_view data);

}  // namespace defverify

#endif  // DEFVERIFY_FILE_UTIL_H_
