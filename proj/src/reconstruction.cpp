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

#include "nermrc/reconstruction.hpp"

#include "json.hpp"

#include "nermrc/error.hpp"

namespace nermrc {

std::vector<int> LabelMatrix::column(std::size_t c) const {
  std::vector<int> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = at(r, c);
  return out;
}

std::string McTriplet::to_json() const {
  nlohmann::ordered_json j;
  j["passage"] = passage;
  std::string q;
  for (const auto& w : question) q += (q.empty() ? "" : " ") + w;
  j["question"] = q;
  auto opts = nlohmann::ordered_json::array();
  for (const auto& o : options) {
    std::string text;
    for (const auto& w : o) text += (text.empty() ? "" : " ") + w;
    opts.push_back(text);
  }
  j["options"] = opts;
  if (labels) {
    auto m = nlohmann::ordered_json::array();
    for (std::size_t r = 0; r < labels->rows(); ++r) {
      auto row = nlohmann::ordered_json::array();
      for (std::size_t c = 0; c < labels->cols(); ++c) row.push_back(labels->at(r, c));
      m.push_back(row);
    }
    j["label_matrix"] = m;
  } else {
    j["label_matrix"] = nullptr;
  }
  return j.dump();
}

LabelMatrix build_label_matrix(const TaggedSentence& sentence, const EntityCatalog& catalog) {
  LabelMatrix m(sentence.size(), catalog.size());
  for (std::size_t r = 0; r < sentence.size(); ++r) {
    const auto type = strip_iob(sentence.tokens[r].tag);
    if (!type) continue;
    const auto col = catalog.index_of(*type);
    if (!col)
      throw CatalogError("unknown entity type '" + *type + "' at position " + std::to_string(r) +
                         (sentence.source_line ? " (line " + std::to_string(sentence.source_line + r) + ")" : ""));
    m.set(r, *col, 1);
  }
  return m;
}

McTriplet reconstruct(const TaggedSentence& sentence, const EntityCatalog& catalog,
                      bool with_labels) {
  McTriplet t;
  t.passage = sentence.surfaces();
  t.question = split_whitespace(kUniversalQuestion);
  t.options.reserve(catalog.size());
  for (const auto& e : catalog.entries()) t.options.push_back(split_whitespace(e.option_text));
  if (with_labels) t.labels = build_label_matrix(sentence, catalog);
  return t;
}

std::vector<McTriplet> reconstruct_all(std::span<const TaggedSentence> sentences,
                                       const EntityCatalog& catalog, bool with_labels) {
  std::vector<McTriplet> out;
  out.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    out.push_back(reconstruct(sentences[i], catalog, with_labels));
    out.back().origin = i;
  }
  return out;
}

}  // namespace nermrc
