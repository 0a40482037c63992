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

#include "nermrc/head_loss.hpp"

#include <algorithm>
#include <cmath>

#include "nermrc/attention.hpp"
#include "nermrc/error.hpp"

namespace nermrc {

namespace {

std::vector<int> targets_of(std::span<const int> labels) {
  std::vector<int> t(labels.size());
  for (std::size_t r = 0; r < labels.size(); ++r) t[r] = labels[r] ? kSelect : kNotSelect;
  return t;
}

}  // namespace

Matrix PredictionMatrix::option_slice(std::size_t i) const {
  Matrix m(static_cast<Eigen::Index>(k_), 2);
  for (std::size_t r = 0; r < k_; ++r)
    for (int c = 0; c < 2; ++c) m(static_cast<Eigen::Index>(r), c) = at(r, i, c);
  return m;
}

HeadParams HeadParams::init(std::size_t n_options, int d_model, Rng& rng) {
  HeadParams p;
  for (std::size_t i = 0; i < n_options; ++i) {
    const std::string pre = "head.option" + std::to_string(i);
    p.weights.push_back({pre + ".w", init_uniform(d_model, 2, rng), {}});
    p.biases.push_back({pre + ".b", Matrix::Zero(1, 2), {}});
  }
  return p;
}

void HeadParams::collect(std::vector<Parameter*>& out) {
  for (std::size_t i = 0; i < weights.size(); ++i) {
    out.push_back(&weights[i]);
    out.push_back(&biases[i]);
  }
}

std::vector<Var> head_probabilities(std::span<const Var> states, const HeadParams& params) {
  if (states.size() != params.size())
    throw ShapeError("head has " + std::to_string(params.size()) + " sub-heads but got " +
                     std::to_string(states.size()) + " option states");
  std::vector<Var> out;
  out.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    Tape& t = *states[i].tape;
    out.push_back(softmax_rows(
        add_row(matmul(states[i], t.param(params.weights[i])), t.param(params.biases[i]))));
  }
  return out;
}

Var overall_loss(std::span<const Var> probs, const LabelMatrix& labels) {
  if (probs.empty() || probs.size() != labels.cols())
    throw ShapeError("loss: option count differs from label columns");
  Var total{};
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (static_cast<std::size_t>(probs[i].rows()) != labels.rows())
      throw ShapeError("loss: passage length differs from label rows");
    const auto target = targets_of(labels.column(i));
    const Var li = nll_of_probs(probs[i], target, kLogEpsilon);
    total = i == 0 ? li : add(total, li);
  }
  return total;
}

PredictionMatrix to_prediction_matrix(std::span<const Var> probs) {
  if (probs.empty()) return {};
  PredictionMatrix m(static_cast<std::size_t>(probs.front().rows()), probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const Matrix& p = probs[i].value();
    for (Eigen::Index r = 0; r < p.rows(); ++r)
      for (int c = 0; c < 2; ++c) m.set(static_cast<std::size_t>(r), i, c, p(r, c));
  }
  return m;
}

PredictionMatrix predict(std::span<const Matrix> states, const HeadParams& params) {
  Tape tape(false);
  std::vector<Var> vars;
  vars.reserve(states.size());
  for (const auto& s : states) vars.push_back(tape.constant(s));
  const auto probs = head_probabilities(vars, params);
  return to_prediction_matrix(probs);
}

double cce_loss(const Matrix& probs, std::span<const int> labels) {
  if (probs.cols() != 2 || static_cast<std::size_t>(probs.rows()) != labels.size() || labels.empty())
    throw ShapeError("cce_loss: prediction and label lengths differ");
  double loss = 0.0;
  for (std::size_t r = 0; r < labels.size(); ++r) {
    const int c = labels[r] ? kSelect : kNotSelect;
    loss -= std::log(std::max(probs(static_cast<Eigen::Index>(r), c), kLogEpsilon));
  }
  return loss / static_cast<double>(labels.size());
}

double cce_loss(const PredictionMatrix& pred, std::size_t option, std::span<const int> labels) {
  if (option >= pred.option_count()) throw ShapeError("cce_loss: option out of range");
  return cce_loss(pred.option_slice(option), labels);
}

double overall_loss(const PredictionMatrix& pred, const LabelMatrix& labels) {
  if (pred.length() != labels.rows() || pred.option_count() != labels.cols())
    throw ShapeError("overall_loss: prediction and label shapes differ");
  double total = 0.0;
  for (std::size_t i = 0; i < labels.cols(); ++i) total += cce_loss(pred, i, labels.column(i));
  return total;
}

}  // namespace nermrc
