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

#include "nermrc/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "nermrc/error.hpp"

namespace nermrc {

namespace {

void require_same_tape(Var a, Var b) {
  if (a.tape != b.tape) throw ShapeError("operands recorded on different tapes");
}

void require_shape(bool ok, const char* op) {
  if (!ok) throw ShapeError(std::string("shape mismatch in ") + op);
}

}  // namespace

Var Tape::push(Matrix value, bool needs_grad, Backprop backprop) {
  Node node;
  node.value = std::move(value);
  node.needs_grad = needs_grad && record_;
  if (node.needs_grad) node.backprop = std::move(backprop);
  nodes_.push_back(std::move(node));
  return Var{this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::constant(Matrix value) { return push(std::move(value), false, nullptr); }

Var Tape::param(const Parameter& p) {
  for (const auto& [bound, id] : params_)
    if (bound == &p) return Var{this, id};
  Node node;
  node.external = &p.value;
  node.needs_grad = record_;
  nodes_.push_back(std::move(node));
  const auto id = static_cast<std::uint32_t>(nodes_.size() - 1);
  params_.emplace_back(&p, id);
  return Var{this, id};
}

const Matrix* Tape::grad_of(const Parameter& p) const {
  for (const auto& [bound, id] : params_)
    if (bound == &p) return nodes_[id].grad.size() ? &nodes_[id].grad : nullptr;
  return nullptr;
}

void Tape::accumulate_grads(std::span<Parameter* const> params) const {
  for (Parameter* p : params) {
    const Matrix* g = grad_of(*p);
    if (!g) continue;
    if (p->grad.size() == 0) p->zero_grad();
    p->grad += *g;
  }
}

Matrix& Tape::grad(Var v) {
  Node& n = nodes_[v.id];
  if (n.grad.size() == 0) {
    const Matrix& v = n.external ? *n.external : n.value;
    n.grad.setZero(v.rows(), v.cols());
  }
  return n.grad;
}

void Tape::backward(Var root) {
  if (!record_) throw Error("backward() on a tape that was not recording");
  if (root.rows() != 1 || root.cols() != 1) throw ShapeError("backward() root must be 1x1");
  grad(root)(0, 0) += 1.0;
  for (std::size_t i = root.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.needs_grad || !n.backprop || n.grad.size() == 0) continue;
    n.backprop(*this, n.grad);
  }
}

Var matmul(Var a, Var b) {
  require_same_tape(a, b);
  require_shape(a.cols() == b.rows(), "matmul");
  Tape& t = *a.tape;
  return t.push(a.value() * b.value(), t.needs_grad(a) || t.needs_grad(b),
                [a, b](Tape& t, const Matrix& g) {
                  if (t.needs_grad(a)) t.grad(a).noalias() += g * b.value().transpose();
                  if (t.needs_grad(b)) t.grad(b).noalias() += a.value().transpose() * g;
                });
}

Var matmul_nt(Var a, Var b) {
  require_same_tape(a, b);
  require_shape(a.cols() == b.cols(), "matmul_nt");
  Tape& t = *a.tape;
  return t.push(a.value() * b.value().transpose(), t.needs_grad(a) || t.needs_grad(b),
                [a, b](Tape& t, const Matrix& g) {
                  if (t.needs_grad(a)) t.grad(a).noalias() += g * b.value();
                  if (t.needs_grad(b)) t.grad(b).noalias() += g.transpose() * a.value();
                });
}

Var add(Var a, Var b) {
  require_same_tape(a, b);
  require_shape(a.rows() == b.rows() && a.cols() == b.cols(), "add");
  Tape& t = *a.tape;
  return t.push(a.value() + b.value(), t.needs_grad(a) || t.needs_grad(b),
                [a, b](Tape& t, const Matrix& g) {
                  if (t.needs_grad(a)) t.grad(a) += g;
                  if (t.needs_grad(b)) t.grad(b) += g;
                });
}

Var add_row(Var a, Var row) {
  require_same_tape(a, row);
  require_shape(row.rows() == 1 && row.cols() == a.cols(), "add_row");
  Tape& t = *a.tape;
  Matrix out = a.value().rowwise() + row.value().row(0);
  return t.push(std::move(out), t.needs_grad(a) || t.needs_grad(row),
                [a, row](Tape& t, const Matrix& g) {
                  if (t.needs_grad(a)) t.grad(a) += g;
                  if (t.needs_grad(row)) t.grad(row) += g.colwise().sum();
                });
}

Var scale(Var a, double s) {
  Tape& t = *a.tape;
  return t.push(a.value() * s, t.needs_grad(a),
                [a, s](Tape& t, const Matrix& g) { t.grad(a) += g * s; });
}

Var softmax_rows(Var a) {
  Tape& t = *a.tape;
  const Matrix& x = a.value();
  Matrix y(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double m = x.row(r).maxCoeff();
    y.row(r) = (x.row(r).array() - m).exp().matrix();
    y.row(r) /= y.row(r).sum();
  }
  const Var self = t.next();
  return t.push(std::move(y), t.needs_grad(a), [a, self](Tape& t, const Matrix& g) {
    const Matrix& y = self.value();
    const Eigen::VectorXd dot = (g.array() * y.array()).rowwise().sum();
    t.grad(a).array() += y.array() * (g.colwise() - dot).array();
  });
}

Var layer_norm(Var x, Var gamma, Var beta, double eps) {
  require_same_tape(x, gamma);
  require_same_tape(x, beta);
  require_shape(gamma.rows() == 1 && gamma.cols() == x.cols() && beta.rows() == 1 &&
                    beta.cols() == x.cols(),
                "layer_norm");
  Tape& t = *x.tape;
  const Matrix& v = x.value();
  const Eigen::Index n = v.cols();
  Matrix xhat(v.rows(), n);
  Eigen::VectorXd inv_std(v.rows());
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    const double mean = v.row(r).mean();
    const double var = (v.row(r).array() - mean).square().mean();
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (v.row(r).array() - mean) * inv_std(r);
  }
  Matrix y = (xhat.array().rowwise() * gamma.value().row(0).array()).rowwise() +
             beta.value().row(0).array();
  const bool ng = t.needs_grad(x) || t.needs_grad(gamma) || t.needs_grad(beta);
  return t.push(std::move(y), ng,
                [x, gamma, beta, xhat = std::move(xhat), inv_std = std::move(inv_std)](
                    Tape& t, const Matrix& g) {
                  if (t.needs_grad(gamma))
                    t.grad(gamma) += (g.array() * xhat.array()).colwise().sum().matrix();
                  if (t.needs_grad(beta)) t.grad(beta) += g.colwise().sum();
                  if (!t.needs_grad(x)) return;
                  const Matrix dxhat = g.array().rowwise() * gamma.value().row(0).array();
                  const Eigen::VectorXd m1 = dxhat.rowwise().mean();
                  const Eigen::VectorXd m2 = (dxhat.array() * xhat.array()).rowwise().mean();
                  Matrix dx = dxhat.colwise() - m1;
                  dx -= (xhat.array().colwise() * m2.array()).matrix();
                  t.grad(x) += (dx.array().colwise() * inv_std.array()).matrix();
                });
}

Var gelu(Var a) {
  static constexpr double kC = 0.7978845608028654;  // sqrt(2 / pi)
  static constexpr double kA = 0.044715;
  Tape& t = *a.tape;
  const Matrix& x = a.value();
  const Eigen::ArrayXXd th = (kC * (x.array() + kA * x.array().cube())).tanh();
  Matrix y = (0.5 * x.array() * (1.0 + th)).matrix();
  return t.push(std::move(y), t.needs_grad(a), [a, th](Tape& t, const Matrix& g) {
    const Eigen::ArrayXXd x = a.value().array();
    const Eigen::ArrayXXd d =
        0.5 * (1.0 + th) + 0.5 * x * (1.0 - th.square()) * kC * (1.0 + 3.0 * kA * x.square());
    t.grad(a).array() += g.array() * d;
  });
}

Var slice_rows(Var a, Eigen::Index start, Eigen::Index count) {
  require_shape(start >= 0 && count >= 0 && start + count <= a.rows(), "slice_rows");
  Tape& t = *a.tape;
  return t.push(a.value().middleRows(start, count), t.needs_grad(a),
                [a, start, count](Tape& t, const Matrix& g) {
                  t.grad(a).middleRows(start, count) += g;
                });
}

Var slice_cols(Var a, Eigen::Index start, Eigen::Index count) {
  require_shape(start >= 0 && count >= 0 && start + count <= a.cols(), "slice_cols");
  Tape& t = *a.tape;
  return t.push(a.value().middleCols(start, count), t.needs_grad(a),
                [a, start, count](Tape& t, const Matrix& g) {
                  t.grad(a).middleCols(start, count) += g;
                });
}

Var concat_rows(std::span<const Var> parts) {
  require_shape(!parts.empty(), "concat_rows");
  Tape& t = *parts.front().tape;
  Eigen::Index rows = 0;
  bool ng = false;
  for (const Var& p : parts) {
    require_same_tape(parts.front(), p);
    require_shape(p.cols() == parts.front().cols(), "concat_rows");
    rows += p.rows();
    ng = ng || t.needs_grad(p);
  }
  Matrix out(rows, parts.front().cols());
  Eigen::Index at = 0;
  for (const Var& p : parts) {
    out.middleRows(at, p.rows()) = p.value();
    at += p.rows();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return t.push(std::move(out), ng, [inputs](Tape& t, const Matrix& g) {
    Eigen::Index at = 0;
    for (const Var& p : inputs) {
      const Eigen::Index n = p.rows();
      if (t.needs_grad(p)) t.grad(p) += g.middleRows(at, n);
      at += n;
    }
  });
}

Var concat_cols(std::span<const Var> parts) {
  require_shape(!parts.empty(), "concat_cols");
  Tape& t = *parts.front().tape;
  Eigen::Index cols = 0;
  bool ng = false;
  for (const Var& p : parts) {
    require_same_tape(parts.front(), p);
    require_shape(p.rows() == parts.front().rows(), "concat_cols");
    cols += p.cols();
    ng = ng || t.needs_grad(p);
  }
  Matrix out(parts.front().rows(), cols);
  Eigen::Index at = 0;
  for (const Var& p : parts) {
    out.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return t.push(std::move(out), ng, [inputs](Tape& t, const Matrix& g) {
    Eigen::Index at = 0;
    for (const Var& p : inputs) {
      const Eigen::Index n = p.cols();
      if (t.needs_grad(p)) t.grad(p) += g.middleCols(at, n);
      at += n;
    }
  });
}

Var sum_all(Var a) {
  Tape& t = *a.tape;
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return t.push(std::move(out), t.needs_grad(a),
                [a](Tape& t, const Matrix& g) { t.grad(a).array() += g(0, 0); });
}

Var gather_rows(Var table, std::span<const int> ids) {
  Tape& t = *table.tape;
  const Matrix& v = table.value();
  Matrix out(static_cast<Eigen::Index>(ids.size()), v.cols());
  for (std::size_t r = 0; r < ids.size(); ++r) {
    if (ids[r] < 0 || ids[r] >= v.rows()) throw ShapeError("gather_rows: id out of range");
    out.row(static_cast<Eigen::Index>(r)) = v.row(ids[r]);
  }
  std::vector<int> idx(ids.begin(), ids.end());
  return t.push(std::move(out), t.needs_grad(table), [table, idx](Tape& t, const Matrix& g) {
    Matrix& dt = t.grad(table);
    for (std::size_t r = 0; r < idx.size(); ++r) dt.row(idx[r]) += g.row(static_cast<Eigen::Index>(r));
  });
}

Var nll_of_probs(Var probs, std::span<const int> target, double eps) {
  require_shape(static_cast<Eigen::Index>(target.size()) == probs.rows() && probs.rows() > 0,
                "nll_of_probs");
  Tape& t = *probs.tape;
  const Matrix& p = probs.value();
  const double inv_k = 1.0 / static_cast<double>(p.rows());
  double loss = 0.0;
  for (Eigen::Index r = 0; r < p.rows(); ++r) loss -= std::log(std::max(p(r, target[r]), eps));
  Matrix out(1, 1);
  out(0, 0) = loss * inv_k;
  std::vector<int> tgt(target.begin(), target.end());
  return t.push(std::move(out), t.needs_grad(probs),
                [probs, tgt, eps, inv_k](Tape& t, const Matrix& g) {
                  const Matrix& p = probs.value();
                  Matrix& dp = t.grad(probs);
                  for (Eigen::Index r = 0; r < p.rows(); ++r) {
                    const double q = p(r, tgt[r]);
                    if (q > eps) dp(r, tgt[r]) -= g(0, 0) * inv_k / q;
                  }
                });
}

Var softmax_cross_entropy(Var logits, std::span<const int> target) {
  require_shape(static_cast<Eigen::Index>(target.size()) == logits.rows() && logits.rows() > 0,
                "softmax_cross_entropy");
  Tape& t = *logits.tape;
  const Matrix& x = logits.value();
  Matrix probs(x.rows(), x.cols());
  double loss = 0.0;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double m = x.row(r).maxCoeff();
    const double lse = m + std::log((x.row(r).array() - m).exp().sum());
    probs.row(r) = (x.row(r).array() - lse).exp().matrix();
    loss -= x(r, target[r]) - lse;
  }
  const double inv_k = 1.0 / static_cast<double>(x.rows());
  Matrix out(1, 1);
  out(0, 0) = loss * inv_k;
  std::vector<int> tgt(target.begin(), target.end());
  return t.push(std::move(out), t.needs_grad(logits),
                [logits, tgt, inv_k, probs = std::move(probs)](Tape& t, const Matrix& g) {
                  Matrix d = probs;
                  for (Eigen::Index r = 0; r < d.rows(); ++r) d(r, tgt[r]) -= 1.0;
                  t.grad(logits) += d * (g(0, 0) * inv_k);
                });
}

}  // namespace nermrc
