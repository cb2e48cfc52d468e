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

#include "defverify/corpus.h"

#include <unordered_map>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "defverify/file_util.h"
#include "defverify/status_macros.h"
#include "json.hpp"

namespace defverify {

absl::StatusOr<std::vector<CorpusRecord>> ParseCorpus(absl::string_view text) {
  std::vector<CorpusRecord> records;
  std::unordered_map<std::string, int> first_line;
  int line = 0;
  for (absl::string_view raw : absl::StrSplit(text, '\n')) {
    ++line;
    if (absl::StripAsciiWhitespace(raw).empty()) continue;
    const auto error = [line](absl::string_view message) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line, ": malformed corpus record: ", message));
    };
    const nlohmann::json doc = nlohmann::json::parse(raw, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) return error("invalid JSON object");
    CorpusRecord record;
    for (const auto& [key, value] : doc.items()) {
      std::string* field = key == "record_id" ? &record.record_id
                           : key == "text"    ? &record.text
                           : key == "label"   ? &record.label
                                              : nullptr;
      if (field == nullptr) return error(absl::StrCat("unknown field \"", key, "\""));
      if (!value.is_string()) {
        return error(absl::StrCat("field \"", key, "\" must be a string"));
      }
      *field = value.get<std::string>();
    }
    if (record.record_id.empty()) return error("missing or empty record_id");
    if (record.text.empty()) return error("missing or empty text");
    if (record.label.empty()) return error("missing or empty label");
    auto [it, inserted] = first_line.emplace(record.record_id, line);
    if (!inserted) {
      return error(absl::StrCat("duplicate record_id \"", record.record_id,
                                "\" (first seen on line ", it->second, ")"));
    }
    records.push_back(std::move(record));
  }
  return records;
}

absl::StatusOr<std::vector<CorpusRecord>> LoadCorpus(const std::string& path) {
  ASSIGN_OR_RETURN(std::string text, ReadFileToString(path));
  auto records = ParseCorpus(text);
  if (!records.ok()) {
    return absl::Status(records.status().code(),
                        absl::StrCat(path, ": ", records.status().message()));
  }
  return records;
}

std::string SerializeCorpus(const std::vector<CorpusRecord>& records) {
  std::string out;
  for (const CorpusRecord& record : records) {
    nlohmann::ordered_json doc;
    doc["record_id"] = record.record_id;
    doc["text"] = record.text;
    doc["label"] = record.label;
    out.append(doc.dump());
    out.push_back('\n');
  }
  return out;
}

}  // namespace defverify
