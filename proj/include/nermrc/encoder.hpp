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

// Small transformer encoder over the concatenation P [SEP] Q [SEP] O_i, with
// the output split back into passage, question and option segments.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nermrc/attention.hpp"
#include "nermrc/reconstruction.hpp"
#include "nermrc/tensor.hpp"

namespace nermrc {

class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kSep = 1;
  static constexpr int kUnk = 2;

  Vocabulary();
  /// Rebuilds from a token list whose first three entries are the specials.
  explicit Vocabulary(std::vector<std::string> tokens);

  /// Id of `token`, adding it if new.
  int add(std::string_view token);
  /// Id of `token`, kUnk when unknown.
  int id(std::string_view token) const;
  std::vector<int> ids(std::span<const std::string> tokens) const;
  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  /// FNV-1a over the NUL-joined token list.
  std::uint64_t hash() const;

  /// Whitespace vocabulary over every passage, question and option token.
  static Vocabulary build(std::span<const McTriplet> triplets);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

struct EncoderConfig {
  int d_model = 64;
  int n_layers = 2;
  int n_heads = 4;
  int ffn_dim = 128;
  int max_len = 512;
  /// Shorten overlong inputs (option tail, then question tail) instead of
  /// failing.
  bool truncate = false;
};

struct EncoderLayerParams {
  AttentionParams attn;
  LayerNormParams ln1;
  Parameter w1, b1, w2, b2;
  LayerNormParams ln2;
};

struct EncoderParams {
  EncoderConfig config;
  Parameter token_embedding;     // |V| x d
  Parameter position_embedding;  // max_len x d
  std::vector<EncoderLayerParams> layers;

  static EncoderParams init(const EncoderConfig& config, std::size_t vocab_size, Rng& rng);
  void collect(std::vector<Parameter*>& out);
};

/// Token ids of one concatenated sequence and where each segment sits.
struct SequenceLayout {
  std::vector<int> ids;
  std::size_t passage_len = 0;
  std::size_t question_len = 0;
  std::size_t option_len = 0;

  std::size_t question_offset() const { return passage_len + 1; }
  std::size_t option_offset() const { return passage_len + question_len + 2; }
};

/// Builds P [SEP] Q [SEP] O_i. Overlong input throws TruncationError unless
/// `config.truncate`, in which case the option then the question are cut from
/// the tail (never below one token) and a warning is logged. The passage is
/// never cut.
SequenceLayout layout_triplet(const McTriplet& triplet, std::size_t option_index,
                              const Vocabulary& vocab, const EncoderConfig& config);

/// Encoder output of one triplet/option pair, split by segment.
struct HiddenStates {
  Var passage;   // k x d
  Var question;  // m x d
  Var option;    // n x d
  std::size_t option_index = 0;
};

/// Token plus position embeddings (the encoder's layer-0 input).
Var embed(Tape& tape, std::span<const int> ids, const EncoderParams& params);
/// Full encoder stack over `ids`; post-norm residual blocks.
Var encode_sequence(Tape& tape, std::span<const int> ids, const EncoderParams& params);

/// `option_index` is 0-based.
HiddenStates encode_triplet(Tape& tape, const McTriplet& triplet, std::size_t option_index,
                            const EncoderParams& params, const Vocabulary& vocab);
/// One HiddenStates per option, in catalog order.
std::vector<HiddenStates> encode_all_options(Tape& tape, const McTriplet& triplet,
                                             const EncoderParams& params, const Vocabulary& vocab);

}  // namespace nermrc
