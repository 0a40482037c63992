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

#include "nermrc/decoder.hpp"

#include "nermrc/error.hpp"

namespace nermrc {

std::size_t SelectionMatrix::row_sum(std::size_t r) const {
  std::size_t s = 0;
  for (std::size_t i = 0; i < n_; ++i) s += at(r, i);
  return s;
}

SelectionMatrix select(const PredictionMatrix& pred) {
  SelectionMatrix sel(pred.length(), pred.option_count());
  for (std::size_t r = 0; r < pred.length(); ++r)
    for (std::size_t i = 0; i < pred.option_count(); ++i)
      sel.set(r, i, pred.at(r, i, kSelect) > pred.at(r, i, kNotSelect) ? 1 : 0);
  return sel;
}

TypeSequence decode_types(const PredictionMatrix& pred, const SelectionMatrix& sel) {
  if (pred.length() != sel.length() || pred.option_count() != sel.option_count())
    throw ShapeError("decode_types: prediction and selection shapes differ");
  TypeSequence out(pred.length());
  for (std::size_t r = 0; r < pred.length(); ++r) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < pred.option_count(); ++i) {
      if (!sel.at(r, i)) continue;
      if (!best || pred.select_prob(r, i) > pred.select_prob(r, *best)) best = i;
    }
    out[r] = best;
  }
  return out;
}

std::vector<std::string> recover_iob(const TypeSequence& types, const EntityCatalog& catalog) {
  std::vector<std::string> tags;
  tags.reserve(types.size());
  std::optional<std::size_t> prev;
  for (const auto& t : types) {
    if (!t) {
      tags.emplace_back("O");
    } else {
      if (*t >= catalog.size()) throw ShapeError("decoded option index outside the catalog");
      tags.push_back((prev == t ? "I-" : "B-") + catalog[*t].type_name);
    }
    prev = t;
  }
  return tags;
}

std::vector<std::string> decode(const PredictionMatrix& pred, const EntityCatalog& catalog) {
  return recover_iob(decode_types(pred, select(pred)), catalog);
}

PredictionMatrix perfect_prediction(const LabelMatrix& labels) {
  PredictionMatrix m(labels.rows(), labels.cols());
  for (std::size_t r = 0; r < labels.rows(); ++r)
    for (std::size_t i = 0; i < labels.cols(); ++i) m.set_select(r, i, labels.at(r, i) ? 1.0 : 0.0);
  return m;
}

}  // namespace nermrc
