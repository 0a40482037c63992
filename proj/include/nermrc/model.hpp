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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "nermrc/catalog.hpp"
#include "nermrc/corpus_io.hpp"
#include "nermrc/encoder.hpp"
#include "nermrc/head_loss.hpp"
#include "nermrc/hrca.hpp"
#include "nermrc/reconstruction.hpp"

namespace nermrc {

/// Which parts of the stack are active.
///  - kFull: triplets -> encoder -> HRCA -> per-option heads.
///  - kReconstructionOnly: triplets -> encoder -> per-option heads.
///  - kVanilla: passage -> encoder -> one IOB tag classifier.
enum class Variant { kFull, kReconstructionOnly, kVanilla };

std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view text);

struct ModelConfig {
  EncoderConfig encoder;
  HrcaConfig hrca;
  Variant variant = Variant::kFull;
};

nlohmann::json to_json(const ModelConfig& c);
/// Missing keys keep their defaults.
ModelConfig model_config_from_json(const nlohmann::json& j, ModelConfig base = {});

/// A training or evaluation sample in every form a variant may need.
struct Example {
  TaggedSentence sentence;
  McTriplet triplet;
  std::vector<int> tag_targets;  // vanilla classes; empty without gold labels
};

class Model {
 public:
  static Model create(const ModelConfig& config, Vocabulary vocab, EntityCatalog catalog,
                      std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  const Vocabulary& vocab() const { return vocab_; }
  const EntityCatalog& catalog() const { return catalog_; }
  std::uint64_t seed() const { return seed_; }

  const EncoderParams& encoder() const { return encoder_; }
  const std::optional<HrcaParams>& hrca() const { return hrca_; }
  const HeadParams& head() const { return head_; }

  /// Every trainable tensor in a fixed order.
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;

  /// Builds triplet and tag targets. Throws CatalogError on unknown types
  /// when `with_labels`.
  Example prepare(const TaggedSentence& sentence, bool with_labels = true) const;

  /// Per-option k x 2 probabilities (MRC variants only).
  std::vector<Var> option_probabilities(Tape& tape, const McTriplet& triplet) const;
  /// k x (2T + 1) tag logits (vanilla only). Class 0 is "O", 1 + 2t is
  /// "B-t" and 2 + 2t is "I-t".
  Var tag_logits(Tape& tape, std::span<const std::string> passage) const;

  /// Training objective of the active variant.
  Var loss(Tape& tape, const Example& example) const;

  /// Prediction matrix for one triplet (MRC variants only).
  PredictionMatrix predict(const McTriplet& triplet) const;
  /// Predicted IOB2 tags for a tokenised sentence.
  std::vector<std::string> predict_tags(const TaggedSentence& sentence) const;

 private:
  ModelConfig config_;
  Vocabulary vocab_;
  EntityCatalog catalog_;
  std::uint64_t seed_ = 0;
  EncoderParams encoder_;
  std::optional<HrcaParams> hrca_;
  HeadParams head_;
  Parameter tag_weight_;  // vanilla only
  Parameter tag_bias_;
};

/// Binary container: "NMRCCKPT", u32 format version, u64 header length, a
/// JSON header (shapes, seed, vocabulary and its hash, catalog, config), then
/// each tensor as little-endian float64 in row-major order.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const Model& model, const std::filesystem::path& path,
                     const nlohmann::json& extra = nlohmann::json::object());
Model load_checkpoint(const std::filesystem::path& path);
/// The JSON header alone.
nlohmann::json read_checkpoint_header(const std::filesystem::path& path);

/// Token plus predicted tag per sentence.
std::vector<TaggedSentence> infer(const Model& model, std::span<const TaggedSentence> sentences);

}  // namespace nermrc
