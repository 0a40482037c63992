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

#include "nermrc/hrca.hpp"

#include "nermrc/error.hpp"

namespace nermrc {

void HrcaConfig::validate() const {
  if (n_heads < 1 || head_dim < 1 || n_layers < 1)
    throw ShapeError("hrca n_heads, head_dim and n_layers must all be >= 1");
}

HrcaParams HrcaParams::init(const HrcaConfig& config, int d_model, Rng& rng) {
  config.validate();
  HrcaParams p;
  for (int l = 0; l < config.n_layers; ++l) {
    const std::string pre = "hrca.layer" + std::to_string(l);
    HrcaLayerParams layer;
    layer.review = AttentionParams::init(pre + ".review", d_model, config.n_heads, config.head_dim, rng);
    layer.read = AttentionParams::init(pre + ".read", d_model, config.n_heads, config.head_dim, rng);
    layer.find = AttentionParams::init(pre + ".find", d_model, config.n_heads, config.head_dim, rng);
    layer.ln_review = LayerNormParams::init(pre + ".ln_review", d_model);
    layer.ln_read = LayerNormParams::init(pre + ".ln_read", d_model);
    layer.ln_find = LayerNormParams::init(pre + ".ln_find", d_model);
    p.layers.push_back(std::move(layer));
  }
  return p;
}

void HrcaParams::check(const HrcaConfig& config, int d_model) const {
  config.validate();
  if (static_cast<int>(layers.size()) != config.n_layers)
    throw ShapeError("hrca has " + std::to_string(layers.size()) + " layers, config says " +
                     std::to_string(config.n_layers));
  for (const auto& l : layers) {
    for (const AttentionParams* a : {&l.review, &l.read, &l.find}) {
      if (a->n_heads != config.n_heads || a->head_dim != config.head_dim)
        throw ShapeError("hrca head layout differs from config");
      a->check(d_model);
    }
    for (const LayerNormParams* n : {&l.ln_review, &l.ln_read, &l.ln_find})
      if (n->gamma.value.cols() != d_model || n->beta.value.cols() != d_model)
        throw ShapeError("hrca layer norm width differs from model width");
  }
}

void HrcaParams::collect(std::vector<Parameter*>& out) {
  for (auto& l : layers) {
    l.review.collect(out);
    l.read.collect(out);
    l.find.collect(out);
    l.ln_review.collect(out);
    l.ln_read.collect(out);
    l.ln_find.collect(out);
  }
}

namespace {

Var wrap(Var input, Var update, const LayerNormParams& ln, bool residual) {
  if (!residual) return update;
  Tape& t = *input.tape;
  return layer_norm(add(input, update), t.param(ln.gamma), t.param(ln.beta));
}

}  // namespace

Var hrca_forward(const HiddenStates& h, const HrcaParams& params, const HrcaConfig& config,
                 HrcaTrace* trace) {
  if (h.passage.rows() == 0 || h.question.rows() == 0 || h.option.rows() == 0)
    throw ShapeError("hrca needs non-empty passage, question and option segments");
  params.check(config, static_cast<int>(h.passage.cols()));

  Var question = h.question;
  Var option = h.option;
  Var passage = h.passage;
  for (const auto& l : params.layers) {
    AttentionTrace* tr_review = nullptr;
    AttentionTrace* tr_read = nullptr;
    AttentionTrace* tr_find = nullptr;
    if (trace) {
      tr_review = &trace->review.emplace_back();
      tr_read = &trace->read.emplace_back();
      tr_find = &trace->find.emplace_back();
    }
    question = wrap(question, attention(question, question, question, l.review, tr_review),
                    l.ln_review, config.residual);
    option = wrap(option, attention(option, question, question, l.read, tr_read), l.ln_read,
                  config.residual);
    passage = wrap(passage, attention(passage, option, option, l.find, tr_find), l.ln_find,
                   config.residual);
  }
  return passage;
}

}  // namespace nermrc
