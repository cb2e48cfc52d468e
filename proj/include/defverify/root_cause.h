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

// Keyword search over a training corpus for failing aspects: how many
// records mention the aspect, how they are labelled, and a few excerpts.

#ifndef DEFVERIFY_ROOT_CAUSE_H_
#define DEFVERIFY_ROOT_CAUSE_H_

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "defverify/corpus.h"
#include "defverify/diagnostic_set.h"
#include "defverify/selector.h"

namespace defverify {

struct NormalizedText {
  std::string text;
  // Byte offset in the original text of every byte of `text`.
  std::vector<size_t> source_offset;
};

// Lowercases ASCII letters unless `case_sensitive`, turns every other ASCII
// character that is not a letter or digit into a space (apostrophes between
// two word characters are kept), and collapses runs of spaces. Bytes >= 0x80
// count as word characters so UTF-8 text survives. Idempotent.
NormalizedText NormalizeWithOffsets(absl::string_view text, bool case_sensitive);
std::string Normalize(absl::string_view text, bool case_sensitive = false);

enum class MatchMode { kWholeToken, kSubstring };
absl::string_view MatchModeName(MatchMode mode);

struct KeywordQuery {
  // Normalized, nonblank, without repeats, in the order given.
  std::vector<std::string> keywords;
  MatchMode match_mode = MatchMode::kWholeToken;
  bool case_sensitive = false;
};

// Normalizes the keywords and rejects an empty or all-blank list.
absl::StatusOr<KeywordQuery> MakeKeywordQuery(
    const std::vector<std::string>& keywords,
    MatchMode mode = MatchMode::kWholeToken, bool case_sensitive = false);

struct SearchOptions {
  size_t excerpt_cap = 20;
  // Characters of context on each side of the first match.
  size_t snippet_radius = 60;
};

struct Excerpt {
  std::string record_id;
  std::string snippet;

  bool operator==(const Excerpt&) const = default;
};

struct RootCauseReport {
  // Selector text when the query came from an aspect; empty otherwise.
  std::string aspect;
  KeywordQuery query;
  size_t corpus_size = 0;
  size_t matches = 0;
  double coverage = 0.0;
  std::map<std::string, size_t> per_label_counts;
  std::vector<Excerpt> excerpts;
};

// True when any keyword occurs in `normalized` under the query's mode.
// Returns the byte position of the earliest match in `*position`.
bool MatchNormalized(absl::string_view normalized, const KeywordQuery& query,
                     size_t* position = nullptr);

absl::StatusOr<RootCauseReport> Search(const std::vector<CorpusRecord>& corpus,
                                       const KeywordQuery& query,
                                       const SearchOptions& options = {});

// Per-group search terms plus optional per-aspect terms, merged from the
// built-in defaults (data/lexicon.json) and user files.
class Lexicon {
 public:
  Lexicon() = default;

  // The shipped lexicon.
  static const Lexicon& Default();

  // {"groups": {name: [terms]}, "slurs": {name: [terms]},
  //  "aspects": {selector: [terms]}}; every section is optional.
  static absl::StatusOr<Lexicon> FromJson(absl::string_view text);
  static absl::StatusOr<Lexicon> Load(const std::string& path);

  // Adds `other`'s terms after this lexicon's own.
  void Merge(const Lexicon& other);

  std::vector<std::string> GroupTerms(absl::string_view group) const;
  std::vector<std::string> SlurTerms() const;
  std::vector<std::string> AspectTerms(absl::string_view selector) const;

  std::string ToJson() const;

  bool operator==(const Lexicon&) const = default;

 private:
  std::map<std::string, std::vector<std::string>> groups_;
  std::map<std::string, std::vector<std::string>> slurs_;
  std::map<std::string, std::vector<std::string>> aspects_;
};

// Default keywords for a selector: the target groups it covers (their names,
// the names without a trailing "people", and lexicon terms), slur terms for
// ref=slur, and lexicon aspect terms keyed by the selector without polarity.
// Fails when nothing can be derived, asking for explicit keywords.
absl::StatusOr<KeywordQuery> AspectKeywords(
    const AspectSelector& selector, const DiagnosticSet& set,
    const Lexicon& lexicon = Lexicon::Default(),
    const GroupVocabulary& vocabulary = GroupVocabulary::Default(),
    MatchMode mode = MatchMode::kWholeToken);

// One report per selector, in order.
absl::StatusOr<std::vector<RootCauseReport>> RootCauseBatch(
    const std::vector<CorpusRecord>& corpus,
    const std::vector<AspectSelector>& failing, const DiagnosticSet& set,
    const Lexicon& lexicon = Lexicon::Default(),
    const GroupVocabulary& vocabulary = GroupVocabulary::Default(),
    MatchMode mode = MatchMode::kWholeToken, const SearchOptions& options = {});

}  // namespace defverify

#endif  // DEFVERIFY_ROOT_CAUSE_H_
