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

#include "defverify/spec_format.h"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <utility>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "defverify/file_util.h"
#include "defverify/status_macros.h"
#include "json.hpp"

namespace defverify {
namespace {

constexpr absl::string_view kFormatTag = "defspec/1";

// Minimal reader for the TOML subset used by .defspec files: bare keys,
// basic strings, booleans, integers, `[table]` and `[[array-of-tables]]`.
struct Value {
  enum class Kind { kString, kBool, kInteger };
  Kind kind = Kind::kString;
  std::string text;
  bool boolean = false;
  int64_t integer = 0;
  int line = 0;
  int column = 0;
};

struct Table {
  std::vector<std::pair<std::string, Value>> entries;
  int line = 0;
};

struct Document {
  Table root;
  std::vector<std::pair<std::string, Table>> tables;
  std::vector<std::pair<std::string, Table>> array_items;
};

absl::Status SyntaxError(int line, int column, absl::string_view message) {
  return absl::InvalidArgumentError(
      absl::StrFormat("line %d, column %d: %s", line, column, message));
}

bool IsBareKeyChar(char c) {
  return absl::ascii_isalnum(static_cast<unsigned char>(c)) || c == '_' ||
         c == '-';
}

void AppendUtf8(uint32_t code_point, std::string* out) {
  if (code_point < 0x80) {
    out->push_back(static_cast<char>(code_point));
  } else if (code_point < 0x800) {
    out->push_back(static_cast<char>(0xC0 | (code_point >> 6)));
    out->push_back(static_cast<char>(0x80 | (code_point & 0x3F)));
  } else if (code_point < 0x10000) {
    out->push_back(static_cast<char>(0xE0 | (code_point >> 12)));
    out->push_back(static_cast<char>(0x80 | ((code_point >> 6) & 0x3F)));
    out->push_back(static_cast<char>(0x80 | (code_point & 0x3F)));
  } else {
    out->push_back(static_cast<char>(0xF0 | (code_point >> 18)));
    out->push_back(static_cast<char>(0x80 | ((code_point >> 12) & 0x3F)));
    out->push_back(static_cast<char>(0x80 | ((code_point >> 6) & 0x3F)));
    out->push_back(static_cast<char>(0x80 | (code_point & 0x3F)));
  }
}

class LineCursor {
 public:
  LineCursor(absl::string_view line, int line_number)
      : line_(line), line_number_(line_number) {}

  void SkipSpaces() {
    while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) {
      ++pos_;
    }
  }
  bool AtEnd() const { return pos_ >= line_.size(); }
  char Peek() const { return AtEnd() ? '\0' : line_[pos_]; }
  int column() const { return static_cast<int>(pos_) + 1; }

  // Only whitespace or a comment may follow.
  absl::Status ExpectLineEnd() {
    SkipSpaces();
    if (AtEnd() || Peek() == '#') return absl::OkStatus();
    return Error(absl::StrCat("unexpected character '", std::string(1, Peek()),
                              "'"));
  }

  absl::StatusOr<std::string> BareKey() {
    const size_t start = pos_;
    while (!AtEnd() && IsBareKeyChar(Peek())) ++pos_;
    if (pos_ == start) return Error("expected a key");
    return std::string(line_.substr(start, pos_ - start));
  }

  absl::Status Consume(char c) {
    if (Peek() != c) {
      return Error(absl::StrCat("expected '", std::string(1, c), "'"));
    }
    ++pos_;
    return absl::OkStatus();
  }

  absl::StatusOr<Value> ParseValue() {
    Value value;
    value.line = line_number_;
    value.column = column();
    if (AtEnd()) return Error("expected a value");
    if (Peek() == '"') {
      ASSIGN_OR_RETURN(value.text, BasicString());
      value.kind = Value::Kind::kString;
      return value;
    }
    const size_t start = pos_;
    while (!AtEnd() && Peek() != ' ' && Peek() != '\t' && Peek() != '#') ++pos_;
    const absl::string_view word = line_.substr(start, pos_ - start);
    if (word == "true" || word == "false") {
      value.kind = Value::Kind::kBool;
      value.boolean = word == "true";
      return value;
    }
    int64_t number = 0;
    if (absl::SimpleAtoi(word, &number)) {
      value.kind = Value::Kind::kInteger;
      value.integer = number;
      return value;
    }
    pos_ = start;
    return Error(absl::StrCat("unsupported value \"", word,
                              "\" (expected a quoted string, true, false or an "
                              "integer)"));
  }

  absl::Status Error(absl::string_view message) const {
    return SyntaxError(line_number_, column(), message);
  }

 private:
  absl::StatusOr<std::string> BasicString() {
    ++pos_;  // opening quote
    std::string out;
    while (true) {
      if (AtEnd()) return Error("unterminated string");
      const char c = line_[pos_];
      if (c == '"') {
        ++pos_;
        return out;
      }
      if (static_cast<unsigned char>(c) < 0x20 && c != '\t') {
        return Error("control character in string");
      }
      if (c != '\\') {
        out.push_back(c);
        ++pos_;
        continue;
      }
      ++pos_;
      if (AtEnd()) return Error("unterminated escape sequence");
      const char e = line_[pos_++];
      switch (e) {
        case '"':
          out.push_back('"');
          break;
        case '\\':
          out.push_back('\\');
          break;
        case 'n':
          out.push_back('\n');
          break;
        case 't':
          out.push_back('\t');
          break;
        case 'r':
          out.push_back('\r');
          break;
        case 'b':
          out.push_back('\b');
          break;
        case 'f':
          out.push_back('\f');
          break;
        case 'u': {
          if (pos_ + 4 > line_.size()) return Error("short \\u escape");
          uint32_t code_point = 0;
          for (int i = 0; i < 4; ++i) {
            const char h = line_[pos_++];
            int digit;
            if (h >= '0' && h <= '9') {
              digit = h - '0';
            } else if (h >= 'a' && h <= 'f') {
              digit = h - 'a' + 10;
            } else if (h >= 'A' && h <= 'F') {
              digit = h - 'A' + 10;
            } else {
              return Error("invalid hex digit in \\u escape");
            }
            code_point = code_point * 16 + static_cast<uint32_t>(digit);
          }
          AppendUtf8(code_point, &out);
          break;
        }
        default:
          --pos_;
          return Error(absl::StrCat("unknown escape \\", std::string(1, e)));
      }
    }
  }

  absl::string_view line_;
  int line_number_;
  size_t pos_ = 0;
};

absl::StatusOr<Document> ParseDocument(absl::string_view text) {
  Document doc;
  Table* current = &doc.root;
  std::set<std::string> table_names;
  int line_number = 0;
  for (absl::string_view raw_line : absl::StrSplit(text, '\n')) {
    ++line_number;
    if (!raw_line.empty() && raw_line.back() == '\r') {
      raw_line.remove_suffix(1);
    }
    LineCursor cursor(raw_line, line_number);
    cursor.SkipSpaces();
    if (cursor.AtEnd() || cursor.Peek() == '#') continue;

    if (cursor.Peek() == '[') {
      RETURN_IF_ERROR(cursor.Consume('['));
      const bool is_array = cursor.Peek() == '[';
      if (is_array) RETURN_IF_ERROR(cursor.Consume('['));
      cursor.SkipSpaces();
      ASSIGN_OR_RETURN(std::string name, cursor.BareKey());
      cursor.SkipSpaces();
      RETURN_IF_ERROR(cursor.Consume(']'));
      if (is_array) RETURN_IF_ERROR(cursor.Consume(']'));
      RETURN_IF_ERROR(cursor.ExpectLineEnd());
      if (is_array) {
        if (table_names.contains(name)) {
          return SyntaxError(line_number, 1,
                             absl::StrCat("\"", name,
                                          "\" is already defined as a table"));
        }
        doc.array_items.emplace_back(name, Table{{}, line_number});
        current = &doc.array_items.back().second;
      } else {
        if (!table_names.insert(name).second) {
          return SyntaxError(line_number, 1,
                             absl::StrCat("table [", name, "] defined twice"));
        }
        for (const auto& item : doc.array_items) {
          if (item.first == name) {
            return SyntaxError(
                line_number, 1,
                absl::StrCat("\"", name,
                             "\" is already defined as an array of tables"));
          }
        }
        doc.tables.emplace_back(name, Table{{}, line_number});
        current = &doc.tables.back().second;
      }
      continue;
    }

    const int key_column = cursor.column();
    ASSIGN_OR_RETURN(std::string key, cursor.BareKey());
    cursor.SkipSpaces();
    RETURN_IF_ERROR(cursor.Consume('='));
    cursor.SkipSpaces();
    ASSIGN_OR_RETURN(Value value, cursor.ParseValue());
    RETURN_IF_ERROR(cursor.ExpectLineEnd());
    for (const auto& [existing, unused] : current->entries) {
      if (existing == key) {
        return SyntaxError(line_number, key_column,
                           absl::StrCat("duplicate key \"", key, "\""));
      }
    }
    current->entries.emplace_back(std::move(key), std::move(value));
  }
  return doc;
}

std::string At(const Value& value) {
  return absl::StrFormat("line %d, column %d", value.line, value.column);
}

// Collects semantic errors while walking the parsed document.
class SpecBuilder {
 public:
  std::optional<std::string> String(const Value& value, absl::string_view key) {
    if (value.kind != Value::Kind::kString) {
      errors_.push_back(absl::StrCat(At(value), ": ", key, " must be a string"));
      return std::nullopt;
    }
    return value.text;
  }
  std::optional<bool> Bool(const Value& value, absl::string_view key) {
    if (value.kind != Value::Kind::kBool) {
      errors_.push_back(
          absl::StrCat(At(value), ": ", key, " must be true or false"));
      return std::nullopt;
    }
    return value.boolean;
  }
  std::optional<AspectStatus> Status(const Value& value, absl::string_view key) {
    std::optional<std::string> text = String(value, key);
    if (!text) return std::nullopt;
    absl::StatusOr<AspectStatus> status = ParseAspectStatus(*text);
    if (!status.ok()) {
      errors_.push_back(absl::StrCat(At(value), ": ", key, ": ",
                                     status.status().message()));
      return std::nullopt;
    }
    return *status;
  }
  void Error(std::string message) { errors_.push_back(std::move(message)); }
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

void AppendQuoted(absl::string_view text, std::string* out) {
  out->push_back('"');
  for (char c : text) {
    switch (c) {
      case '"':
        out->append("\\\"");
        break;
      case '\\':
        out->append("\\\\");
        break;
      case '\n':
        out->append("\\n");
        break;
      case '\t':
        out->append("\\t");
        break;
      case '\r':
        out->append("\\r");
        break;
      default:
        if (static_cast<unsigned char>(c) < 0x20 ||
            static_cast<unsigned char>(c) == 0x7F) {
          absl::StrAppendFormat(out, "\\u%04X", static_cast<unsigned char>(c));
        } else {
          out->push_back(c);
        }
    }
  }
  out->push_back('"');
}

}  // namespace

absl::StatusOr<ParsedDefinitionSpec> ParseDefinitionSpec(absl::string_view text) {
  ASSIGN_OR_RETURN(Document doc, ParseDocument(text));
  ParsedDefinitionSpec result;
  DefinitionSpec& spec = result.spec;
  SpecBuilder builder;

  bool has_dataset = false;
  for (const auto& [key, value] : doc.root.entries) {
    if (key == "format") {
      if (auto tag = builder.String(value, key); tag && *tag != kFormatTag) {
        builder.Error(absl::StrCat(At(value), ": unsupported format \"", *tag,
                                   "\" (expected \"", kFormatTag, "\")"));
      }
    } else if (key == "dataset") {
      if (auto name = builder.String(value, key)) {
        spec.dataset_name = *name;
        has_dataset = true;
      }
    } else if (key == "label_scheme") {
      if (auto name = builder.String(value, key)) spec.label_scheme_ref = *name;
    } else if (key == "notes") {
      if (auto notes = builder.String(value, key)) spec.notes = *notes;
    } else {
      builder.Error(absl::StrCat(At(value), ": unknown top-level key \"", key,
                                 "\""));
    }
  }
  if (!has_dataset) builder.Error("missing required key \"dataset\"");

  for (const auto& [name, table] : doc.tables) {
    if (name != "aspects") {
      builder.Error(absl::StrFormat("line %d: unknown table [%s]", table.line,
                                    name));
      continue;
    }
    for (const auto& [key, value] : table.entries) {
      absl::StatusOr<AspectKind> kind = ParseAspectCode(key);
      if (!kind.ok()) {
        builder.Error(absl::StrCat(At(value), ": ", kind.status().message()));
        continue;
      }
      if (auto status = builder.Status(value, absl::StrCat("aspects.", key))) {
        spec.aspect_status[*kind] = *status;
      }
    }
  }

  for (const auto& [name, table] : doc.array_items) {
    if (name != "target_groups") {
      builder.Error(absl::StrFormat("line %d: unknown array of tables [[%s]]",
                                    table.line, name));
      continue;
    }
    std::optional<std::string> group_name;
    std::optional<TargetCategory> category;
    std::optional<bool> dominant;
    std::optional<AspectStatus> status;
    bool entry_ok = true;
    for (const auto& [key, value] : table.entries) {
      if (key == "name") {
        group_name = builder.String(value, key);
        entry_ok &= group_name.has_value();
      } else if (key == "category") {
        if (auto text = builder.String(value, key)) {
          absl::StatusOr<TargetCategory> parsed = ParseTargetCategory(*text);
          if (parsed.ok()) {
            category = *parsed;
          } else {
            builder.Error(
                absl::StrCat(At(value), ": ", parsed.status().message()));
            entry_ok = false;
          }
        } else {
          entry_ok = false;
        }
      } else if (key == "dominant") {
        dominant = builder.Bool(value, key);
        entry_ok &= dominant.has_value();
      } else if (key == "status") {
        status = builder.Status(value, "target_groups.status");
        entry_ok &= status.has_value();
      } else {
        builder.Error(absl::StrCat(At(value),
                                   ": unknown key in [[target_groups]] \"", key,
                                   "\""));
        entry_ok = false;
      }
    }
    if (!category) {
      builder.Error(absl::StrFormat(
          "line %d: [[target_groups]] entry is missing \"category\"",
          table.line));
      entry_ok = false;
    }
    if (!status) {
      builder.Error(absl::StrFormat(
          "line %d: [[target_groups]] entry is missing \"status\"", table.line));
      entry_ok = false;
    }
    if (!entry_ok) continue;
    if (!group_name) {
      if (dominant.has_value()) {
        builder.Error(absl::StrFormat(
            "line %d: a category entry (no \"name\") cannot set \"dominant\"",
            table.line));
        continue;
      }
      if (!spec.category_status.emplace(*category, *status).second) {
        builder.Error(absl::StrFormat("line %d: category %s is listed twice",
                                      table.line,
                                      TargetCategoryName(*category)));
      }
      continue;
    }
    TargetGroupId id{*category, *group_name, dominant.value_or(false)};
    if (spec.GroupStatus(id.group_name).has_value()) {
      builder.Error(absl::StrFormat("line %d: target group \"%s\" is listed twice",
                                    table.line, id.group_name));
      continue;
    }
    spec.target_groups.emplace(std::move(id), *status);
  }

  std::vector<std::string> errors = builder.errors();
  if (errors.empty()) {
    for (AspectKind kind : kAllAspectKinds) {
      if (!spec.aspect_status.contains(kind)) {
        spec.aspect_status[kind] = AspectStatus::kUnspecified;
        result.warnings.push_back(absl::StrCat(
            "aspects.", AspectCode(kind), " not given; defaulting to unspecified"));
      }
    }
    for (std::string& violation : FindSpecViolations(spec)) {
      errors.push_back(std::move(violation));
    }
  }
  if (!errors.empty()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "invalid definition spec: ", absl::StrJoin(errors, "; ")));
  }
  return result;
}

std::string SerializeDefinitionSpec(const DefinitionSpec& spec) {
  std::string out;
  absl::StrAppend(&out, "format = \"", kFormatTag, "\"\n");
  out.append("dataset = ");
  AppendQuoted(spec.dataset_name, &out);
  out.push_back('\n');
  if (!spec.label_scheme_ref.empty()) {
    out.append("label_scheme = ");
    AppendQuoted(spec.label_scheme_ref, &out);
    out.push_back('\n');
  }
  if (!spec.notes.empty()) {
    out.append("notes = ");
    AppendQuoted(spec.notes, &out);
    out.push_back('\n');
  }
  out.append("\n[aspects]\n");
  for (AspectKind kind : kAllAspectKinds) {
    auto it = spec.aspect_status.find(kind);
    if (it == spec.aspect_status.end()) continue;
    absl::StrAppend(&out, AspectCode(kind), " = \"",
                    AspectStatusName(it->second), "\"\n");
  }
  for (TargetCategory category : kAllTargetCategories) {
    auto it = spec.category_status.find(category);
    if (it == spec.category_status.end()) continue;
    absl::StrAppend(&out, "\n[[target_groups]]\ncategory = \"",
                    TargetCategoryName(category), "\"\nstatus = \"",
                    AspectStatusName(it->second), "\"\n");
  }
  for (const auto& [group, status] : spec.target_groups) {
    out.append("\n[[target_groups]]\nname = ");
    AppendQuoted(group.group_name, &out);
    absl::StrAppend(&out, "\ncategory = \"", TargetCategoryName(group.category),
                    "\"\ndominant = ", group.dominant ? "true" : "false",
                    "\nstatus = \"", AspectStatusName(status), "\"\n");
  }
  return out;
}

absl::StatusOr<ParsedDefinitionSpec> ReadDefinitionSpecFile(
    const std::string& path) {
  ASSIGN_OR_RETURN(std::string text, ReadFileToString(path));
  absl::StatusOr<ParsedDefinitionSpec> parsed = ParseDefinitionSpec(text);
  if (!parsed.ok()) {
    return absl::Status(parsed.status().code(),
                        absl::StrCat(path, ": ", parsed.status().message()));
  }
  return parsed;
}

absl::StatusOr<DefinitionSpec> ResolveDefinitionSpec(absl::string_view source) {
  if (BuiltinSpecs().contains(std::string(source))) return BuiltinSpec(source);
  const std::string path(source);
  if (!std::filesystem::exists(path)) {
    return absl::NotFoundError(absl::StrCat(
        "\"", source, "\" is neither a built-in spec nor an existing file"));
  }
  ASSIGN_OR_RETURN(ParsedDefinitionSpec parsed, ReadDefinitionSpecFile(path));
  return parsed.spec;
}

absl::StatusOr<LabelScheme> ParseLabelSchemeJson(absl::string_view text) {
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    return absl::InvalidArgumentError("label scheme is not a JSON object");
  }
  LabelScheme scheme;
  try {
    scheme.scheme_name = doc.at("name").get<std::string>();
    scheme.canonical_labels =
        doc.at("canonical_labels").get<std::vector<std::string>>();
    scheme.hate_equivalent =
        doc.at("hate_equivalent").get<std::vector<std::string>>();
    scheme.raw_to_canonical =
        doc.at("raw_to_canonical").get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed label scheme: ", e.what()));
  }
  for (const std::string& label : scheme.canonical_labels) {
    scheme.raw_to_canonical.emplace(label, label);
  }
  RETURN_IF_ERROR(ValidateLabelScheme(scheme));
  return scheme;
}

std::string SerializeLabelSchemeJson(const LabelScheme& scheme) {
  nlohmann::ordered_json doc;
  doc["name"] = scheme.scheme_name;
  doc["canonical_labels"] = scheme.canonical_labels;
  doc["hate_equivalent"] = scheme.hate_equivalent;
  doc["raw_to_canonical"] = scheme.raw_to_canonical;
  return doc.dump(2) + "\n";
}

absl::StatusOr<LabelScheme> ResolveLabelScheme(absl::string_view source) {
  if (BuiltinSchemes().contains(std::string(source))) {
    return BuiltinScheme(source);
  }
  const std::string path(source);
  if (!std::filesystem::exists(path)) {
    return absl::NotFoundError(absl::StrCat(
        "\"", source, "\" is neither a built-in label scheme nor a file"));
  }
  ASSIGN_OR_RETURN(std::string text, ReadFileToString(path));
  return ParseLabelSchemeJson(text);
}

}  // namespace defverify
