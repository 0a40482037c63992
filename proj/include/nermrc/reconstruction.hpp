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

// Turns tagged sentences into (passage, question, options) multiple-choice
// triplets with a binary token-by-option label matrix.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nermrc/catalog.hpp"
#include "nermrc/corpus_io.hpp"

namespace nermrc {

/// The single question shared by every triplet of every dataset.
inline constexpr std::string_view kUniversalQuestion = "What kind of entity is this?";

/// Row r, column i is 1 when passage token r carries entity type i.
class LabelMatrix {
 public:
  LabelMatrix() = default;
  LabelMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint8_t at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, std::uint8_t v) { data_[r * cols_ + c] = v; }
  /// Column i as a 0/1 vector of length rows().
  std::vector<int> column(std::size_t c) const;

  friend bool operator==(const LabelMatrix&, const LabelMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> data_;
};

struct McTriplet {
  std::vector<std::string> passage;
  std::vector<std::string> question;
  std::vector<std::vector<std::string>> options;
  std::optional<LabelMatrix> labels;  // absent at inference time
  std::size_t origin = 0;             // index of the source sentence

  std::size_t passage_length() const { return passage.size(); }
  std::size_t option_count() const { return options.size(); }

  /// One-line JSON: passage, question, options, label_matrix.
  std::string to_json() const;
};

/// Label matrix alone. Throws CatalogError naming the first unknown type.
LabelMatrix build_label_matrix(const TaggedSentence& sentence, const EntityCatalog& catalog);

/// With `with_labels` false the tags are ignored entirely.
McTriplet reconstruct(const TaggedSentence& sentence, const EntityCatalog& catalog,
                      bool with_labels = true);

std::vector<McTriplet> reconstruct_all(std::span<const TaggedSentence> sentences,
                                       const EntityCatalog& catalog, bool with_labels = true);

}  // namespace nermrc
