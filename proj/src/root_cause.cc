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

#include "defverify/root_cause.h"

#include <algorithm>
#include <set>

#include "absl/strings/ascii.h"
#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "defverify/default_lexicon.h"
#include "defverify/file_util.h"
#include "defverify/status_macros.h"
#include "json.hpp"

namespace defverify {
namespace {

bool IsWordByte(unsigned char c) { return c >= 0x80 || absl::ascii_isalnum(c); }

bool IsUtf8Continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

void AppendUnique(std::vector<std::string>* out, absl::string_view term) {
  if (term.empty()) return;
  if (std::find(out->begin(), out->end(), term) == out->end()) {
    out->emplace_back(term);
  }
}

bool TokenBoundary(absl::string_view text, size_t begin, size_t end) {
  return (begin == 0 || text[begin - 1] == ' ') &&
         (end == text.size() || text[end] == ' ');
}

// Earliest position of `keyword` in `text` under `mode`, or npos.
size_t FindKeyword(absl::string_view text, absl::string_view keyword,
                   MatchMode mode) {
  size_t from = 0;
  while (true) {
    const size_t pos = text.find(keyword, from);
    if (pos == absl::string_view::npos) return pos;
    if (mode == MatchMode::kSubstring ||
        TokenBoundary(text, pos, pos + keyword.size())) {
      return pos;
    }
    from = pos + 1;
  }
}

std::string Snippet(absl::string_view original, size_t begin, size_t end,
                    size_t radius) {
  size_t from = begin > radius ? begin - radius : 0;
  size_t to = std::min(original.size(), end + radius);
  while (from > 0 && IsUtf8Continuation(original[from])) --from;
  while (to < original.size() && IsUtf8Continuation(original[to])) ++to;
  std::string snippet(original.substr(from, to - from));
  for (char& c : snippet) {
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
  }
  if (from > 0) snippet.insert(0, "...");
  if (to < original.size()) snippet.append("...");
  return snippet;
}

absl::StatusOr<std::map<std::string, std::vector<std::string>>> ReadTermMap(
    const nlohmann::json& section, absl::string_view name) {
  if (!section.is_object()) {
    return absl::InvalidArgumentError(
        absl::StrCat("lexicon section \"", name, "\" must be an object"));
  }
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& [key, terms] : section.items()) {
    if (!terms.is_array()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "lexicon entry \"", name, ".", key, "\" must be an array of strings"));
    }
    std::vector<std::string>& list = out[key];
    for (const auto& term : terms) {
      if (!term.is_string()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "lexicon entry \"", name, ".", key, "\" holds a non-string term"));
      }
      AppendUnique(&list, term.get<std::string>());
    }
  }
  return out;
}

void MergeTermMap(std::map<std::string, std::vector<std::string>>* into,
                  const std::map<std::string, std::vector<std::string>>& from) {
  for (const auto& [key, terms] : from) {
    std::vector<std::string>& list = (*into)[key];
    for (const std::string& term : terms) AppendUnique(&list, term);
  }
}

// Target groups a selector is about; empty when it is not about groups.
std::vector<std::string> SelectorGroups(const AspectSelector& selector,
                                        const DiagnosticSet& set,
                                        const GroupVocabulary& vocabulary) {
  std::vector<std::string> groups;
  switch (selector.kind) {
    case SelectorKind::kTargetGroup:
      groups.push_back(selector.value);
      break;
    case SelectorKind::kCategory:
      for (const TargetGroupId& g : vocabulary.groups()) {
        if (!g.dominant && TargetCategoryName(g.category) == selector.value) {
          AppendUnique(&groups, g.group_name);
        }
      }
      for (const DiagnosticCase& c : set.cases()) {
        if (c.target_group.has_value() && !c.target_group->dominant &&
            TargetCategoryName(c.target_group->category) == selector.value) {
          AppendUnique(&groups, c.target_group->group_name);
        }
      }
      break;
    case SelectorKind::kDominance:
      if (selector.value != "true") break;
      for (const DiagnosticCase& c : set.cases()) {
        if (c.dominance && c.target_group.has_value()) {
          AppendUnique(&groups, c.target_group->group_name);
        }
      }
      if (groups.empty()) {
        for (const TargetGroupId& g : vocabulary.groups()) {
          if (g.dominant) AppendUnique(&groups, g.group_name);
        }
      }
      break;
    default:
      break;
  }
  return groups;
}

}  // namespace

NormalizedText NormalizeWithOffsets(absl::string_view text, bool case_sensitive) {
  NormalizedText out;
  out.text.reserve(text.size());
  out.source_offset.reserve(text.size());
  bool pending_space = false;
  for (size_t i = 0; i < text.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    bool keep = IsWordByte(c);
    if (c == '\'') {
      keep = i > 0 && i + 1 < text.size() &&
             IsWordByte(static_cast<unsigned char>(text[i - 1])) &&
             IsWordByte(static_cast<unsigned char>(text[i + 1]));
    }
    if (!keep) {
      pending_space = !out.text.empty();
      continue;
    }
    if (pending_space) {
      out.text.push_back(' ');
      out.source_offset.push_back(i);
      pending_space = false;
    }
    out.text.push_back(case_sensitive ? static_cast<char>(c)
                                      : absl::ascii_tolower(c));
    out.source_offset.push_back(i);
  }
  return out;
}

std::string Normalize(absl::string_view text, bool case_sensitive) {
  return NormalizeWithOffsets(text, case_sensitive).text;
}

absl::string_view MatchModeName(MatchMode mode) {
  return mode == MatchMode::kWholeToken ? "whole_token" : "substring";
}

absl::StatusOr<KeywordQuery> MakeKeywordQuery(const std::vector<std::string>& keywords,
                                              MatchMode mode, bool case_sensitive) {
  KeywordQuery query;
  query.match_mode = mode;
  query.case_sensitive = case_sensitive;
  for (const std::string& keyword : keywords) {
    AppendUnique(&query.keywords, Normalize(keyword, case_sensitive));
  }
  if (query.keywords.empty()) {
    return absl::InvalidArgumentError("keyword list is empty or blank");
  }
  return query;
}

bool MatchNormalized(absl::string_view normalized, const KeywordQuery& query,
                     size_t* position) {
  size_t best = absl::string_view::npos;
  for (const std::string& keyword : query.keywords) {
    const size_t pos = FindKeyword(normalized, keyword, query.match_mode);
    best = std::min(best, pos);
  }
  if (position != nullptr) *position = best;
  return best != absl::string_view::npos;
}

absl::StatusOr<RootCauseReport> Search(const std::vector<CorpusRecord>& corpus,
                                       const KeywordQuery& query,
                                       const SearchOptions& options) {
  if (corpus.empty()) return absl::InvalidArgumentError("corpus is empty");
  if (query.keywords.empty() ||
      std::any_of(query.keywords.begin(), query.keywords.end(),
                  [](const std::string& k) { return k.empty(); })) {
    return absl::InvalidArgumentError("keyword list is empty or blank");
  }
  RootCauseReport report;
  report.query = query;
  report.corpus_size = corpus.size();
  for (const CorpusRecord& record : corpus) {
    const NormalizedText normalized =
        NormalizeWithOffsets(record.text, query.case_sensitive);
    size_t position = 0;
    if (!MatchNormalized(normalized.text, query, &position)) continue;
    ++report.matches;
    ++report.per_label_counts[record.label];
    if (report.excerpts.size() < options.excerpt_cap) {
      // Length of the earliest matching keyword at `position`.
      size_t length = 0;
      for (const std::string& keyword : query.keywords) {
        if (FindKeyword(normalized.text, keyword, query.match_mode) == position) {
          length = std::max(length, keyword.size());
        }
      }
      const size_t begin = normalized.source_offset[position];
      const size_t end = normalized.source_offset[position + length - 1] + 1;
      report.excerpts.push_back(
          {record.record_id, Snippet(record.text, begin, end, options.snippet_radius)});
    }
  }
  report.coverage =
      static_cast<double>(report.matches) / static_cast<double>(report.corpus_size);
  return report;
}

const Lexicon& Lexicon::Default() {
  static const Lexicon* const lexicon = new Lexicon(*FromJson(kDefaultLexiconJson));
  return *lexicon;
}

absl::StatusOr<Lexicon> Lexicon::FromJson(absl::string_view text) {
  const nlohmann::json doc =
      nlohmann::json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    return absl::InvalidArgumentError("lexicon is not a JSON object");
  }
  Lexicon lexicon;
  for (const auto& [key, section] : doc.items()) {
    std::map<std::string, std::vector<std::string>>* target =
        key == "groups"    ? &lexicon.groups_
        : key == "slurs"   ? &lexicon.slurs_
        : key == "aspects" ? &lexicon.aspects_
                           : nullptr;
    if (target == nullptr) {
      return absl::InvalidArgumentError(absl::StrCat(
          "unknown lexicon section \"", key, "\" (expected groups, slurs, aspects)"));
    }
    ASSIGN_OR_RETURN(*target, ReadTermMap(section, key));
  }
  return lexicon;
}

absl::StatusOr<Lexicon> Lexicon::Load(const std::string& path) {
  ASSIGN_OR_RETURN(std::string text, ReadFileToString(path));
  absl::StatusOr<Lexicon> lexicon = FromJson(text);
  if (!lexicon.ok()) {
    return absl::Status(lexicon.status().code(),
                        absl::StrCat(path, ": ", lexicon.status().message()));
  }
  return lexicon;
}

void Lexicon::Merge(const Lexicon& other) {
  MergeTermMap(&groups_, other.groups_);
  MergeTermMap(&slurs_, other.slurs_);
  MergeTermMap(&aspects_, other.aspects_);
}

std::vector<std::string> Lexicon::GroupTerms(absl::string_view group) const {
  auto it = groups_.find(std::string(group));
  return it == groups_.end() ? std::vector<std::string>{} : it->second;
}

std::vector<std::string> Lexicon::SlurTerms() const {
  std::vector<std::string> terms;
  for (const auto& [group, list] : slurs_) {
    for (const std::string& term : list) AppendUnique(&terms, term);
  }
  return terms;
}

std::vector<std::string> Lexicon::AspectTerms(absl::string_view selector) const {
  auto it = aspects_.find(std::string(selector));
  return it == aspects_.end() ? std::vector<std::string>{} : it->second;
}

std::string Lexicon::ToJson() const {
  nlohmann::ordered_json doc;
  doc["groups"] = groups_;
  doc["slurs"] = slurs_;
  doc["aspects"] = nlohmann::ordered_json::object();
  for (const auto& [key, terms] : aspects_) doc["aspects"][key] = terms;
  return doc.dump(2) + "\n";
}

absl::StatusOr<KeywordQuery> AspectKeywords(const AspectSelector& selector,
                                            const DiagnosticSet& set,
                                            const Lexicon& lexicon,
                                            const GroupVocabulary& vocabulary,
                                            MatchMode mode) {
  if (selector.kind == SelectorKind::kTargetGroup &&
      !vocabulary.Contains(selector.value)) {
    absl::StatusOr<std::vector<std::string>> slice =
        SliceByAspect(set, selector, vocabulary);
    if (!slice.ok()) return slice.status();
  }
  std::vector<std::string> terms;
  for (const std::string& group : SelectorGroups(selector, set, vocabulary)) {
    AppendUnique(&terms, group);
    if (absl::EndsWith(group, " people")) {
      AppendUnique(&terms, group.substr(0, group.size() - 7));
    }
    for (const std::string& term : lexicon.GroupTerms(group)) {
      AppendUnique(&terms, term);
    }
  }
  if (selector.kind == SelectorKind::kExplicitReference && selector.value == "slur") {
    for (const std::string& term : lexicon.SlurTerms()) AppendUnique(&terms, term);
  }
  for (const std::string& term :
       lexicon.AspectTerms(selector.WithPolarity(Polarity::kAll).ToString())) {
    AppendUnique(&terms, term);
  }
  if (terms.empty()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "no keywords can be derived for aspect \"", selector.ToString(),
        "\"; pass explicit keywords or add an \"aspects\" entry to the lexicon"));
  }
  return MakeKeywordQuery(terms, mode);
}

absl::StatusOr<std::vector<RootCauseReport>> RootCauseBatch(
    const std::vector<CorpusRecord>& corpus,
    const std::vector<AspectSelector>& failing, const DiagnosticSet& set,
    const Lexicon& lexicon, const GroupVocabulary& vocabulary, MatchMode mode,
    const SearchOptions& options) {
  std::vector<RootCauseReport> reports;
  for (const AspectSelector& selector : failing) {
    ASSIGN_OR_RETURN(KeywordQuery query,
                     AspectKeywords(selector, set, lexicon, vocabulary, mode));
    ASSIGN_OR_RETURN(RootCauseReport report, Search(corpus, query, options));
    report.aspect = selector.ToString();
    reports.push_back(std::move(report));
  }
  return reports;
}

}  // namespace defverify
