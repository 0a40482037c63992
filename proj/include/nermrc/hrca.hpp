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

// Three-step reasoning over encoder segments: review the question with
// self-attention, read the options against the reviewed question, then find
// answers by letting the passage attend to the read options.

#include <vector>

#include "nermrc/attention.hpp"
#include "nermrc/encoder.hpp"

namespace nermrc {

struct HrcaConfig {
  int n_heads = 8;
  int head_dim = 64;
  int n_layers = 1;
  /// Residual connection plus layer norm around each attention step.
  bool residual = true;

  /// Throws ShapeError when any count is < 1.
  void validate() const;
};

struct HrcaLayerParams {
  AttentionParams review;  // question self-attention
  AttentionParams read;    // options attend to question
  AttentionParams find;    // passage attends to options
  LayerNormParams ln_review, ln_read, ln_find;
};

/// One parameter set shared by every option pass.
struct HrcaParams {
  std::vector<HrcaLayerParams> layers;

  static HrcaParams init(const HrcaConfig& config, int d_model, Rng& rng);
  /// Throws ShapeError if the stored tensors disagree with `config` or `d_model`.
  void check(const HrcaConfig& config, int d_model) const;
  void collect(std::vector<Parameter*>& out);
};

struct HrcaTrace {
  std::vector<AttentionTrace> review, read, find;  // one per layer
};

/// Enriched passage states, same shape as `h.passage`.
Var hrca_forward(const HiddenStates& h, const HrcaParams& params, const HrcaConfig& config,
                 HrcaTrace* trace = nullptr);

}  // namespace nermrc
