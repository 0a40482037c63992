// Copyright 2026 The nermrc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// CoNLL-style corpus reading, IOB2 validation and dataset statistics.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nermrc/catalog.hpp"

namespace nermrc {

struct Token {
  std::string surface;
  std::string tag;  // "O", "B-<type>" or "I-<type>"

  friend bool operator==(const Token&, const Token&) = default;
};

struct TaggedSentence {
  std::vector<Token> tokens;
  std::size_t source_line = 0;  // first line of the sentence, 1-based

  std::size_t size() const { return tokens.size(); }
  std::vector<std::string> surfaces() const;
  std::vector<std::string> tags() const;
};

/// An orphan "I-X": it follows neither "B-X" nor "I-X".
struct IobWarning {
  std::size_t sentence = 0;
  std::size_t line = 0;
  std::size_t position = 0;
  std::string tag;
};

struct ParseOptions {
  /// Rewrite orphan "I-X" to "B-X" instead of only reporting it.
  bool repair_iob = false;
  /// Accept single-column lines as untagged tokens (tag "O"); used for
  /// inference input.
  bool allow_untagged = false;
  /// Receives one entry per orphan "I-X" found, repaired or not.
  std::vector<IobWarning>* warnings = nullptr;
};

bool is_valid_tag(std::string_view tag);

/// "B-X"/"I-X" -> "X", "O" -> nullopt. Throws ParseError on a malformed tag.
std::optional<std::string> strip_iob(std::string_view tag);

/// Sentences are separated by blank lines; the tag is the last column and the
/// surface the first. "-DOCSTART-" lines are skipped. LF or CRLF.
std::vector<TaggedSentence> parse_conll(std::istream& in, const ParseOptions& options = {});
std::vector<TaggedSentence> parse_conll(std::string_view text, const ParseOptions& options = {});
std::vector<TaggedSentence> load_conll(const std::filesystem::path& path,
                                       const ParseOptions& options = {});

/// Two columns per line, blank line after every sentence.
std::string serialize_conll(std::span<const TaggedSentence> sentences);
void write_conll(const std::filesystem::path& path, std::span<const TaggedSentence> sentences);

/// Positions holding an orphan "I-X". Empty means valid IOB2.
std::vector<std::size_t> validate_iob(std::span<const std::string> tags);
std::vector<std::size_t> validate_iob(const TaggedSentence& sentence);

/// Rewrites orphan "I-X" to "B-X"; returns how many tags changed.
std::size_t repair_iob(std::vector<std::string>& tags);
std::size_t repair_iob(TaggedSentence& sentence);

struct CorpusSplit {
  std::string name;
  std::vector<TaggedSentence> sentences;
};

/// `path` is either a single CoNLL file (one split named after the file) or a
/// directory holding train*/dev*|valid*/test* files, returned in that order.
std::vector<CorpusSplit> load_corpus(const std::filesystem::path& path,
                                     const ParseOptions& options = {});

/// Entity type names used by the tags, in order of first appearance.
std::vector<std::string> entity_types(std::span<const TaggedSentence> sentences);

/// One message per tag type that the catalog does not know.
std::vector<std::string> catalog_coverage(std::span<const TaggedSentence> sentences,
                                          const EntityCatalog& catalog);

struct CorpusStats {
  std::vector<std::pair<std::string, std::size_t>> split_sizes;
  std::size_t n_entity_types = 0;
  double avg_length = 0.0;         // tokens per sentence over all splits
  double avg_option_length = 0.0;  // whitespace tokens per option text

  std::string to_json() const;
};

/// With no catalog, `n_entity_types` counts the types seen in the tags and
/// `avg_option_length` is 0.
CorpusStats compute_stats(std::span<const CorpusSplit> splits,
                          const EntityCatalog* catalog = nullptr);

}  // namespace nermrc
