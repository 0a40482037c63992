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

#include <string>
#include <vector>

#include "nermrc/random.hpp"
#include "nermrc/tensor.hpp"

namespace nermrc {

/// Projections of one multi-head attention block. Inner width is
/// n_heads * head_dim and need not equal the model width.
struct AttentionParams {
  int n_heads = 1;
  int head_dim = 1;
  Parameter wq, bq, wk, bk, wv, bv, wo, bo;

  static AttentionParams init(const std::string& prefix, int d_model, int n_heads, int head_dim,
                              Rng& rng);
  int inner_dim() const { return n_heads * head_dim; }
  int model_dim() const { return static_cast<int>(wq.value.rows()); }
  /// Throws ShapeError unless every projection agrees with the head layout
  /// and `d_model`.
  void check(int d_model) const;
  void collect(std::vector<Parameter*>& out);
};

struct LayerNormParams {
  Parameter gamma, beta;

  static LayerNormParams init(const std::string& prefix, int d_model);
  void collect(std::vector<Parameter*>& out);
};

/// Optional capture of the per-head weight matrices (queries x keys).
struct AttentionTrace {
  std::vector<Matrix> weights;
};

/// Scaled dot-product attention per head, heads concatenated, then the output
/// projection. Throws ShapeError on an empty key set or when keys and values
/// disagree in row count.
Var attention(Var queries, Var keys, Var values, const AttentionParams& params,
              AttentionTrace* trace = nullptr);

/// Xavier-style uniform fill in +-sqrt(6 / (rows + cols)).
Matrix init_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng);

}  // namespace nermrc
