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

// Recovers IOB tags from a k x N_O x 2 prediction matrix.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nermrc/catalog.hpp"
#include "nermrc/head_loss.hpp"

namespace nermrc {

/// Binary k x N_O matrix: 1 where "select" strictly beats "not select".
class SelectionMatrix {
 public:
  SelectionMatrix() = default;
  SelectionMatrix(std::size_t k, std::size_t n) : k_(k), n_(n), data_(k * n, 0) {}
  std::size_t length() const { return k_; }
  std::size_t option_count() const { return n_; }
  std::uint8_t at(std::size_t r, std::size_t i) const { return data_[r * n_ + i]; }
  void set(std::size_t r, std::size_t i, std::uint8_t v) { data_[r * n_ + i] = v; }
  std::size_t row_sum(std::size_t r) const;

  friend bool operator==(const SelectionMatrix&, const SelectionMatrix&) = default;

 private:
  std::size_t k_ = 0;
  std::size_t n_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Per-position option index, nullopt for "O".
using TypeSequence = std::vector<std::optional<std::size_t>>;

/// Ties (equal scores) resolve to "not select".
SelectionMatrix select(const PredictionMatrix& pred);

/// Rows with at least one selection take the selected option with the highest
/// select probability (lowest index on ties); empty rows become "O".
TypeSequence decode_types(const PredictionMatrix& pred, const SelectionMatrix& sel);

/// First of each run of identical types gets "B-", the rest "I-". Adjacent
/// entities of the same type therefore merge.
std::vector<std::string> recover_iob(const TypeSequence& types, const EntityCatalog& catalog);

/// select -> decode_types -> recover_iob.
std::vector<std::string> decode(const PredictionMatrix& pred, const EntityCatalog& catalog);

/// Probability-one prediction matrix built from a label matrix.
PredictionMatrix perfect_prediction(const LabelMatrix& labels);

}  // namespace nermrc
