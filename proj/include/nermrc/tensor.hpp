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

// Minimal reverse-mode automatic differentiation over dense double matrices.
//
// A Tape records every operation of one forward pass. Parameters live outside
// the tape and are bound read-only; after backward() their gradients are read
// back with grad_of() or added to Parameter::grad with accumulate_grads().
// Everything is float64 so that finite-difference checks stay meaningful.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nermrc {

using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

/// A named trainable tensor. `grad` is the optimizer's accumulator; tapes
/// never write to it directly (see Tape::accumulate_grads).
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

class Tape;

/// Handle to a node on a Tape. Cheap to copy; only valid while its tape lives.
struct Var {
  Tape* tape = nullptr;
  std::uint32_t id = 0;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const { return value()(0, 0); }
};

class Tape {
 public:
  /// When `record` is false no backward closures are kept (inference).
  explicit Tape(bool record = true) : record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  /// Leaf bound to `p` without copying; repeated calls return the same node.
  Var param(const Parameter& p);

  const Matrix& value(Var v) const {
    const Node& n = nodes_[v.id];
    return n.external ? *n.external : n.value;
  }
  bool recording() const { return record_; }
  std::size_t size() const { return nodes_.size(); }

  /// Seeds d(root)/d(root) = 1 and propagates to every parameter leaf.
  /// `root` must be 1x1.
  void backward(Var root);

  /// Gradient reaching `p` in the last backward(), or nullptr if `p` was not
  /// used on this tape or received nothing.
  const Matrix* grad_of(const Parameter& p) const;
  /// Adds grad_of(*p) into p->grad for each parameter.
  void accumulate_grads(std::span<Parameter* const> params) const;

  // Used by the operation implementations.
  using Backprop = std::function<void(Tape&, const Matrix& upstream)>;
  Var push(Matrix value, bool needs_grad, Backprop backprop);
  /// Handle the next push() will return; lets a closure refer to its own output.
  Var next() { return Var{this, static_cast<std::uint32_t>(nodes_.size())}; }
  bool needs_grad(Var v) const { return nodes_[v.id].needs_grad; }
  /// Gradient buffer of `v`, zero-initialised on first touch.
  Matrix& grad(Var v);

 private:
  struct Node {
    Matrix value;
    const Matrix* external = nullptr;
    Matrix grad;
    bool needs_grad = false;
    Backprop backprop;
  };
  std::vector<Node> nodes_;
  std::vector<std::pair<const Parameter*, std::uint32_t>> params_;
  bool record_;
};

inline const Matrix& Var::value() const { return tape->value(*this); }

// Operations. All operands must share one tape.
Var matmul(Var a, Var b);
/// a * b^T
Var matmul_nt(Var a, Var b);
Var add(Var a, Var b);
/// Adds a 1 x c row to every row of `a`.
Var add_row(Var a, Var row);
Var scale(Var a, double s);
Var softmax_rows(Var a);
Var layer_norm(Var x, Var gamma, Var beta, double eps = 1e-5);
/// tanh approximation of GELU.
Var gelu(Var a);
Var slice_rows(Var a, Eigen::Index start, Eigen::Index count);
Var slice_cols(Var a, Eigen::Index start, Eigen::Index count);
Var concat_rows(std::span<const Var> parts);
Var concat_cols(std::span<const Var> parts);
Var sum_all(Var a);
/// Rows `ids` of `table` (an embedding lookup).
Var gather_rows(Var table, std::span<const int> ids);
/// Mean over rows of -log(max(probs[r][target[r]], eps)).
Var nll_of_probs(Var probs, std::span<const int> target, double eps);
/// Mean over rows of softmax cross-entropy against integer targets.
Var softmax_cross_entropy(Var logits, std::span<const int> target);

}  // namespace nermrc
