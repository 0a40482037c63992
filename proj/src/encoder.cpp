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

#include "nermrc/encoder.hpp"

#include <algorithm>

#include "nermrc/error.hpp"
#include "nermrc/log.hpp"

namespace nermrc {

Vocabulary::Vocabulary() {
  for (const char* s : {"[PAD]", "[SEP]", "[UNK]"}) add(s);
}

Vocabulary::Vocabulary(std::vector<std::string> tokens) {
  if (tokens.size() < 3 || tokens[0] != "[PAD]" || tokens[1] != "[SEP]" || tokens[2] != "[UNK]")
    throw Error("vocabulary must start with [PAD] [SEP] [UNK]");
  for (const auto& t : tokens)
    if (!index_.emplace(t, static_cast<int>(tokens_.size())).second)
      throw Error("duplicate vocabulary token '" + t + "'");
    else
      tokens_.push_back(t);
}

int Vocabulary::add(std::string_view token) {
  auto [it, inserted] = index_.emplace(std::string(token), static_cast<int>(tokens_.size()));
  if (inserted) tokens_.emplace_back(token);
  return it->second;
}

int Vocabulary::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

std::vector<int> Vocabulary::ids(std::span<const std::string> tokens) const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id(t));
  return out;
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& t : tokens_) {
    for (unsigned char c : t) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Vocabulary Vocabulary::build(std::span<const McTriplet> triplets) {
  Vocabulary v;
  for (const auto& t : triplets) {
    for (const auto& w : t.passage) v.add(w);
    for (const auto& w : t.question) v.add(w);
    for (const auto& o : t.options)
      for (const auto& w : o) v.add(w);
  }
  return v;
}

EncoderParams EncoderParams::init(const EncoderConfig& config, std::size_t vocab_size, Rng& rng) {
  if (config.d_model < 1 || config.n_layers < 0 || config.ffn_dim < 1 || config.max_len < 3 ||
      config.n_heads < 1 || config.d_model % config.n_heads != 0)
    throw ShapeError("invalid encoder configuration");
  const int d = config.d_model;
  EncoderParams p;
  p.config = config;
  auto fill = [&](Eigen::Index rows, double a) {
    Matrix m(rows, d);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (int c = 0; c < d; ++c) m(r, c) = rng.uniform(-a, a);
    return m;
  };
  p.token_embedding = {"encoder.token_embedding", fill(static_cast<Eigen::Index>(vocab_size), 0.5), {}};
  p.position_embedding = {"encoder.position_embedding", fill(config.max_len, 0.1), {}};
  for (int l = 0; l < config.n_layers; ++l) {
    const std::string pre = "encoder.layer" + std::to_string(l);
    EncoderLayerParams layer;
    layer.attn = AttentionParams::init(pre + ".attn", d, config.n_heads, d / config.n_heads, rng);
    layer.ln1 = LayerNormParams::init(pre + ".ln1", d);
    layer.w1 = {pre + ".ffn.w1", init_uniform(d, config.ffn_dim, rng), {}};
    layer.b1 = {pre + ".ffn.b1", Matrix::Zero(1, config.ffn_dim), {}};
    layer.w2 = {pre + ".ffn.w2", init_uniform(config.ffn_dim, d, rng), {}};
    layer.b2 = {pre + ".ffn.b2", Matrix::Zero(1, d), {}};
    layer.ln2 = LayerNormParams::init(pre + ".ln2", d);
    p.layers.push_back(std::move(layer));
  }
  return p;
}

void EncoderParams::collect(std::vector<Parameter*>& out) {
  out.push_back(&token_embedding);
  out.push_back(&position_embedding);
  for (auto& l : layers) {
    l.attn.collect(out);
    l.ln1.collect(out);
    for (Parameter* p : {&l.w1, &l.b1, &l.w2, &l.b2}) out.push_back(p);
    l.ln2.collect(out);
  }
}

SequenceLayout layout_triplet(const McTriplet& triplet, std::size_t option_index,
                              const Vocabulary& vocab, const EncoderConfig& config) {
  if (option_index >= triplet.options.size())
    throw ShapeError("option index " + std::to_string(option_index) + " out of range (" +
                     std::to_string(triplet.options.size()) + " options)");
  if (triplet.passage.empty()) throw ShapeError("empty passage");
  std::size_t k = triplet.passage.size();
  std::size_t m = triplet.question.size();
  std::size_t n = triplet.options[option_index].size();
  const auto max_len = static_cast<std::size_t>(config.max_len);

  if (k + m + n + 2 > max_len) {
    if (!config.truncate)
      throw TruncationError("sequence of " + std::to_string(k + m + n + 2) +
                            " positions exceeds max_len " + std::to_string(max_len) +
                            " (enable truncation to shorten options)");
    const std::size_t over = k + m + n + 2 - max_len;
    const std::size_t cut_option = std::min(over, n > 0 ? n - 1 : 0);
    n -= cut_option;
    const std::size_t cut_question = std::min(over - cut_option, m > 0 ? m - 1 : 0);
    m -= cut_question;
    if (k + m + n + 2 > max_len)
      throw TruncationError("passage of " + std::to_string(k) + " tokens does not fit in max_len " +
                            std::to_string(max_len));
    log_warning("truncated option " + std::to_string(option_index) + " by " +
                std::to_string(cut_option) + " tokens and question by " +
                std::to_string(cut_question) + " tokens to fit max_len " +
                std::to_string(max_len));
  }

  SequenceLayout layout;
  layout.passage_len = k;
  layout.question_len = m;
  layout.option_len = n;
  layout.ids.reserve(k + m + n + 2);
  for (const auto& w : triplet.passage) layout.ids.push_back(vocab.id(w));
  layout.ids.push_back(Vocabulary::kSep);
  for (std::size_t i = 0; i < m; ++i) layout.ids.push_back(vocab.id(triplet.question[i]));
  layout.ids.push_back(Vocabulary::kSep);
  for (std::size_t i = 0; i < n; ++i) layout.ids.push_back(vocab.id(triplet.options[option_index][i]));
  return layout;
}

Var embed(Tape& tape, std::span<const int> ids, const EncoderParams& params) {
  if (ids.size() > static_cast<std::size_t>(params.position_embedding.value.rows()))
    throw TruncationError("sequence longer than the positional table");
  std::vector<int> positions(ids.size());
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = static_cast<int>(i);
  return add(gather_rows(tape.param(params.token_embedding), ids),
             gather_rows(tape.param(params.position_embedding), positions));
}

Var encode_sequence(Tape& tape, std::span<const int> ids, const EncoderParams& params) {
  Var x = embed(tape, ids, params);
  for (const auto& l : params.layers) {
    x = layer_norm(add(x, attention(x, x, x, l.attn)), tape.param(l.ln1.gamma),
                   tape.param(l.ln1.beta));
    Var h = gelu(add_row(matmul(x, tape.param(l.w1)), tape.param(l.b1)));
    h = add_row(matmul(h, tape.param(l.w2)), tape.param(l.b2));
    x = layer_norm(add(x, h), tape.param(l.ln2.gamma), tape.param(l.ln2.beta));
  }
  return x;
}

HiddenStates encode_triplet(Tape& tape, const McTriplet& triplet, std::size_t option_index,
                            const EncoderParams& params, const Vocabulary& vocab) {
  const SequenceLayout layout = layout_triplet(triplet, option_index, vocab, params.config);
  const Var h = encode_sequence(tape, layout.ids, params);
  HiddenStates out;
  out.passage = slice_rows(h, 0, static_cast<Eigen::Index>(layout.passage_len));
  out.question = slice_rows(h, static_cast<Eigen::Index>(layout.question_offset()),
                            static_cast<Eigen::Index>(layout.question_len));
  out.option = slice_rows(h, static_cast<Eigen::Index>(layout.option_offset()),
                          static_cast<Eigen::Index>(layout.option_len));
  out.option_index = option_index;
  return out;
}

std::vector<HiddenStates> encode_all_options(Tape& tape, const McTriplet& triplet,
                                             const EncoderParams& params, const Vocabulary& vocab) {
  std::vector<HiddenStates> out;
  out.reserve(triplet.options.size());
  for (std::size_t i = 0; i < triplet.options.size(); ++i)
    out.push_back(encode_triplet(tape, triplet, i, params, vocab));
  return out;
}

}  // namespace nermrc
