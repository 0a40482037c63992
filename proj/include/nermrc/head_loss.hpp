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

// Per-option select/not-select heads and the summed cross-entropy objective.

#include <cstddef>
#include <span>
#include <vector>

#include "nermrc/random.hpp"
#include "nermrc/reconstruction.hpp"
#include "nermrc/tensor.hpp"

namespace nermrc {

/// Channel layout of the last axis, shared by loss and decoding.
inline constexpr int kSelect = 0;
inline constexpr int kNotSelect = 1;

/// Clamp applied before every log in the loss.
inline constexpr double kLogEpsilon = 1e-12;

/// Scores of shape k x n_options x 2.
class PredictionMatrix {
 public:
  PredictionMatrix() = default;
  PredictionMatrix(std::size_t k, std::size_t n_options, bool normalized = true)
      : k_(k), n_options_(n_options), normalized_(normalized), data_(k * n_options * 2, 0.0) {}

  std::size_t length() const { return k_; }
  std::size_t option_count() const { return n_options_; }
  bool normalized() const { return normalized_; }

  double at(std::size_t r, std::size_t i, int c) const { return data_[index(r, i, c)]; }
  void set(std::size_t r, std::size_t i, int c, double v) { data_[index(r, i, c)] = v; }
  /// Sets the pair (p, 1 - p) for select probability p.
  void set_select(std::size_t r, std::size_t i, double p) {
    set(r, i, kSelect, p);
    set(r, i, kNotSelect, 1.0 - p);
  }
  double select_prob(std::size_t r, std::size_t i) const { return at(r, i, kSelect); }
  /// k x 2 slice for option i.
  Matrix option_slice(std::size_t i) const;

  friend bool operator==(const PredictionMatrix&, const PredictionMatrix&) = default;

 private:
  std::size_t index(std::size_t r, std::size_t i, int c) const {
    return (r * n_options_ + i) * 2 + static_cast<std::size_t>(c);
  }
  std::size_t k_ = 0;
  std::size_t n_options_ = 0;
  bool normalized_ = true;
  std::vector<double> data_;
};

/// One d -> 2 linear sub-head per catalog option, in option order.
struct HeadParams {
  std::vector<Parameter> weights;  // d x 2 each
  std::vector<Parameter> biases;   // 1 x 2 each

  static HeadParams init(std::size_t n_options, int d_model, Rng& rng);
  std::size_t size() const { return weights.size(); }
  void collect(std::vector<Parameter*>& out);
};

/// Softmaxed k x 2 probabilities per option. `states[i]` must be the enriched
/// passage for option i.
std::vector<Var> head_probabilities(std::span<const Var> states, const HeadParams& params);

/// Sum over options of the mean two-class cross-entropy.
Var overall_loss(std::span<const Var> probs, const LabelMatrix& labels);

/// Gathers tape probabilities into a PredictionMatrix.
PredictionMatrix to_prediction_matrix(std::span<const Var> probs);

/// Value-level prediction from plain state matrices.
PredictionMatrix predict(std::span<const Matrix> states, const HeadParams& params);

/// Mean over rows of -log p(target), target = select when label is 1.
double cce_loss(const Matrix& probs, std::span<const int> labels);
double cce_loss(const PredictionMatrix& pred, std::size_t option, std::span<const int> labels);
double overall_loss(const PredictionMatrix& pred, const LabelMatrix& labels);

}  // namespace nermrc
