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

#include "nermrc/attention.hpp"

#include <cmath>

#include "nermrc/error.hpp"

namespace nermrc {

Matrix init_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.uniform(-a, a);
  return m;
}

AttentionParams AttentionParams::init(const std::string& prefix, int d_model, int n_heads,
                                      int head_dim, Rng& rng) {
  if (d_model < 1 || n_heads < 1 || head_dim < 1)
    throw ShapeError("attention dimensions must be >= 1");
  AttentionParams p;
  p.n_heads = n_heads;
  p.head_dim = head_dim;
  const int inner = n_heads * head_dim;
  p.wq = {prefix + ".wq", init_uniform(d_model, inner, rng), {}};
  p.bq = {prefix + ".bq", Matrix::Zero(1, inner), {}};
  p.wk = {prefix + ".wk", init_uniform(d_model, inner, rng), {}};
  p.bk = {prefix + ".bk", Matrix::Zero(1, inner), {}};
  p.wv = {prefix + ".wv", init_uniform(d_model, inner, rng), {}};
  p.bv = {prefix + ".bv", Matrix::Zero(1, inner), {}};
  p.wo = {prefix + ".wo", init_uniform(inner, d_model, rng), {}};
  p.bo = {prefix + ".bo", Matrix::Zero(1, d_model), {}};
  return p;
}

void AttentionParams::check(int d_model) const {
  const Eigen::Index inner = inner_dim();
  auto is = [](const Parameter& p, Eigen::Index r, Eigen::Index c) {
    return p.value.rows() == r && p.value.cols() == c;
  };
  if (n_heads < 1 || head_dim < 1 || !is(wq, d_model, inner) || !is(wk, d_model, inner) ||
      !is(wv, d_model, inner) || !is(bq, 1, inner) || !is(bk, 1, inner) || !is(bv, 1, inner) ||
      !is(wo, inner, d_model) || !is(bo, 1, d_model))
    throw ShapeError("attention parameters do not match " + std::to_string(n_heads) + " heads x " +
                     std::to_string(head_dim) + " dims at width " + std::to_string(d_model));
}

void AttentionParams::collect(std::vector<Parameter*>& out) {
  for (Parameter* p : {&wq, &bq, &wk, &bk, &wv, &bv, &wo, &bo}) out.push_back(p);
}

LayerNormParams LayerNormParams::init(const std::string& prefix, int d_model) {
  return {{prefix + ".gamma", Matrix::Ones(1, d_model), {}},
          {prefix + ".beta", Matrix::Zero(1, d_model), {}}};
}

void LayerNormParams::collect(std::vector<Parameter*>& out) {
  out.push_back(&gamma);
  out.push_back(&beta);
}

Var attention(Var queries, Var keys, Var values, const AttentionParams& params,
              AttentionTrace* trace) {
  if (keys.rows() == 0) throw ShapeError("attention over an empty key set");
  if (keys.rows() != values.rows()) throw ShapeError("attention: key and value row counts differ");
  params.check(static_cast<int>(queries.cols()));
  Tape& t = *queries.tape;

  const Var q = add_row(matmul(queries, t.param(params.wq)), t.param(params.bq));
  const Var k = add_row(matmul(keys, t.param(params.wk)), t.param(params.bk));
  const Var v = add_row(matmul(values, t.param(params.wv)), t.param(params.bv));
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(params.head_dim));

  std::vector<Var> heads;
  heads.reserve(params.n_heads);
  for (int h = 0; h < params.n_heads; ++h) {
    const Eigen::Index off = static_cast<Eigen::Index>(h) * params.head_dim;
    const Var qh = slice_cols(q, off, params.head_dim);
    const Var kh = slice_cols(k, off, params.head_dim);
    const Var vh = slice_cols(v, off, params.head_dim);
    const Var w = softmax_rows(scale(matmul_nt(qh, kh), inv_sqrt));
    if (trace) trace->weights.push_back(w.value());
    heads.push_back(matmul(w, vh));
  }
  const Var joined = params.n_heads == 1 ? heads.front() : concat_cols(heads);
  return add_row(matmul(joined, t.param(params.wo)), t.param(params.bo));
}

}  // namespace nermrc
