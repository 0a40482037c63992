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

#include "nermrc/model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "nermrc/attention.hpp"
#include "nermrc/decoder.hpp"
#include "nermrc/error.hpp"

namespace nermrc {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kFull: return "full";
    case Variant::kReconstructionOnly: return "reconstruction_only";
    case Variant::kVanilla: return "vanilla";
  }
  return "full";
}

std::optional<Variant> parse_variant(std::string_view text) {
  if (text == "full") return Variant::kFull;
  if (text == "reconstruction_only") return Variant::kReconstructionOnly;
  if (text == "vanilla") return Variant::kVanilla;
  return std::nullopt;
}

nlohmann::json to_json(const ModelConfig& c) {
  nlohmann::json j;
  j["encoder"] = {{"d_model", c.encoder.d_model},   {"n_layers", c.encoder.n_layers},
                  {"n_heads", c.encoder.n_heads},   {"ffn_dim", c.encoder.ffn_dim},
                  {"max_len", c.encoder.max_len},   {"truncate", c.encoder.truncate}};
  j["hrca"] = {{"n_heads", c.hrca.n_heads},
               {"head_dim", c.hrca.head_dim},
               {"n_layers", c.hrca.n_layers},
               {"residual", c.hrca.residual}};
  j["variant"] = std::string(to_string(c.variant));
  return j;
}

ModelConfig model_config_from_json(const nlohmann::json& j, ModelConfig c) {
  try {
    if (j.contains("encoder")) {
      const auto& e = j["encoder"];
      c.encoder.d_model = e.value("d_model", c.encoder.d_model);
      c.encoder.n_layers = e.value("n_layers", c.encoder.n_layers);
      c.encoder.n_heads = e.value("n_heads", c.encoder.n_heads);
      c.encoder.ffn_dim = e.value("ffn_dim", c.encoder.ffn_dim);
      c.encoder.max_len = e.value("max_len", c.encoder.max_len);
      c.encoder.truncate = e.value("truncate", c.encoder.truncate);
    }
    if (j.contains("hrca")) {
      const auto& h = j["hrca"];
      c.hrca.n_heads = h.value("n_heads", c.hrca.n_heads);
      c.hrca.head_dim = h.value("head_dim", c.hrca.head_dim);
      c.hrca.n_layers = h.value("n_layers", c.hrca.n_layers);
      c.hrca.residual = h.value("residual", c.hrca.residual);
    }
    const std::string key = j.contains("variant") ? "variant" : "ablation";
    if (j.contains(key)) {
      const auto v = parse_variant(j[key].get<std::string>());
      if (!v) throw Error("unknown variant '" + j[key].get<std::string>() + "'");
      c.variant = *v;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed model config: ") + e.what());
  }
  return c;
}

Model Model::create(const ModelConfig& config, Vocabulary vocab, EntityCatalog catalog,
                    std::uint64_t seed) {
  if (catalog.size() == 0) throw CatalogError("catalog has no entries");
  Model m;
  m.config_ = config;
  m.vocab_ = std::move(vocab);
  m.catalog_ = std::move(catalog);
  m.seed_ = seed;
  Rng rng(seed);
  const int d = config.encoder.d_model;
  m.encoder_ = EncoderParams::init(config.encoder, m.vocab_.size(), rng);
  switch (config.variant) {
    case Variant::kFull:
      m.hrca_ = HrcaParams::init(config.hrca, d, rng);
      m.head_ = HeadParams::init(m.catalog_.size(), d, rng);
      break;
    case Variant::kReconstructionOnly:
      m.head_ = HeadParams::init(m.catalog_.size(), d, rng);
      break;
    case Variant::kVanilla: {
      const auto classes = static_cast<Eigen::Index>(2 * m.catalog_.size() + 1);
      m.tag_weight_ = {"tagger.w", init_uniform(d, classes, rng), {}};
      m.tag_bias_ = {"tagger.b", Matrix::Zero(1, classes), {}};
      break;
    }
  }
  return m;
}

std::vector<Parameter*> Model::parameters() {
  std::vector<Parameter*> out;
  encoder_.collect(out);
  if (hrca_) hrca_->collect(out);
  head_.collect(out);
  if (config_.variant == Variant::kVanilla) {
    out.push_back(&tag_weight_);
    out.push_back(&tag_bias_);
  }
  return out;
}

std::vector<const Parameter*> Model::parameters() const {
  auto ps = const_cast<Model*>(this)->parameters();
  return {ps.begin(), ps.end()};
}

Example Model::prepare(const TaggedSentence& sentence, bool with_labels) const {
  Example ex;
  ex.sentence = sentence;
  if (config_.variant != Variant::kVanilla) {
    ex.triplet = reconstruct(sentence, catalog_, with_labels);
  } else {
    // The tagger reads the passage alone; no question, options or label matrix.
    ex.triplet.passage = sentence.surfaces();
  }
  if (with_labels && config_.variant == Variant::kVanilla) {
    ex.tag_targets.reserve(sentence.size());
    for (const auto& tok : sentence.tokens) {
      const auto type = strip_iob(tok.tag);
      if (!type) {
        ex.tag_targets.push_back(0);
        continue;
      }
      const auto idx = catalog_.index_of(*type);
      if (!idx)
        throw CatalogError("entity type '" + *type + "' at position " +
                           std::to_string(ex.tag_targets.size()) + " is not in the catalog");
      ex.tag_targets.push_back(static_cast<int>(1 + 2 * *idx + (tok.tag[0] == 'I' ? 1 : 0)));
    }
  }
  return ex;
}

std::vector<Var> Model::option_probabilities(Tape& tape, const McTriplet& triplet) const {
  if (config_.variant == Variant::kVanilla)
    throw Error("option_probabilities is undefined for the vanilla variant");
  if (triplet.option_count() != catalog_.size())
    throw ShapeError("triplet has " + std::to_string(triplet.option_count()) +
                     " options, model expects " + std::to_string(catalog_.size()));
  std::vector<Var> states;
  states.reserve(triplet.option_count());
  for (std::size_t i = 0; i < triplet.option_count(); ++i) {
    const HiddenStates h = encode_triplet(tape, triplet, i, encoder_, vocab_);
    states.push_back(hrca_ ? hrca_forward(h, *hrca_, config_.hrca) : h.passage);
  }
  return head_probabilities(states, head_);
}

Var Model::tag_logits(Tape& tape, std::span<const std::string> passage) const {
  if (config_.variant != Variant::kVanilla) throw Error("tag_logits needs the vanilla variant");
  const auto ids = vocab_.ids(passage);
  if (ids.size() > static_cast<std::size_t>(config_.encoder.max_len))
    throw TruncationError("passage longer than max_len");
  const Var h = encode_sequence(tape, ids, encoder_);
  return add_row(matmul(h, tape.param(tag_weight_)), tape.param(tag_bias_));
}

Var Model::loss(Tape& tape, const Example& example) const {
  if (config_.variant == Variant::kVanilla) {
    if (example.tag_targets.size() != example.sentence.size())
      throw Error("example has no gold tags");
    return softmax_cross_entropy(tag_logits(tape, example.triplet.passage), example.tag_targets);
  }
  if (!example.triplet.labels) throw Error("example has no label matrix");
  const auto probs = option_probabilities(tape, example.triplet);
  return overall_loss(probs, *example.triplet.labels);
}

PredictionMatrix Model::predict(const McTriplet& triplet) const {
  Tape tape(false);
  return to_prediction_matrix(option_probabilities(tape, triplet));
}

std::vector<std::string> Model::predict_tags(const TaggedSentence& sentence) const {
  if (sentence.size() == 0) return {};
  if (config_.variant != Variant::kVanilla) {
    return decode(predict(reconstruct(sentence, catalog_, false)), catalog_);
  }
  Tape tape(false);
  const auto passage = sentence.surfaces();
  const Matrix& logits = tag_logits(tape, passage).value();
  std::vector<std::string> tags;
  tags.reserve(sentence.size());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    Eigen::Index best = 0;
    logits.row(r).maxCoeff(&best);
    if (best == 0) {
      tags.emplace_back("O");
    } else {
      const auto t = static_cast<std::size_t>((best - 1) / 2);
      tags.push_back(((best - 1) % 2 ? "I-" : "B-") + catalog_[t].type_name);
    }
  }
  repair_iob(tags);
  return tags;
}

std::vector<TaggedSentence> infer(const Model& model, std::span<const TaggedSentence> sentences) {
  std::vector<TaggedSentence> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    TaggedSentence p = s;
    const auto tags = model.predict_tags(s);
    for (std::size_t i = 0; i < tags.size(); ++i) p.tokens[i].tag = tags[i];
    out.push_back(std::move(p));
  }
  return out;
}

// Checkpoints ---------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'N', 'M', 'R', 'C', 'C', 'K', 'P', 'T'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_le(const std::string& in, std::size_t at, int bytes) {
  if (at + static_cast<std::size_t>(bytes) > in.size()) throw IoError("checkpoint is truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  return v;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream ss;
  ss << std::hex;
  ss.width(16);
  ss.fill('0');
  ss << v;
  return ss.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct ParsedCheckpoint {
  nlohmann::json header;
  std::size_t data_offset = 0;
};

ParsedCheckpoint parse_container(const std::string& bytes) {
  if (bytes.size() < 20 || std::memcmp(bytes.data(), kMagic, 8) != 0)
    throw IoError("not a nermrc checkpoint");
  const auto version = static_cast<std::uint32_t>(get_le(bytes, 8, 4));
  if (version != kCheckpointVersion)
    throw IoError("unsupported checkpoint version " + std::to_string(version));
  const std::uint64_t len = get_le(bytes, 12, 8);
  if (20 + len > bytes.size()) throw IoError("checkpoint is truncated");
  ParsedCheckpoint p;
  try {
    p.header = nlohmann::json::parse(bytes.substr(20, len));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("corrupt checkpoint header: ") + e.what());
  }
  p.data_offset = 20 + len;
  return p;
}

}  // namespace

void save_checkpoint(const Model& model, const std::filesystem::path& path,
                     const nlohmann::json& extra) {
  nlohmann::json header;
  header["format"] = "nermrc-checkpoint";
  header["seed"] = model.seed();
  header["vocab_hash"] = hex64(model.vocab().hash());
  header["vocab"] = model.vocab().tokens();
  header["catalog"] = nlohmann::json::parse(model.catalog().to_json());
  header["model"] = to_json(model.config());
  header["extra"] = extra;
  auto tensors = nlohmann::json::array();
  std::uint64_t offset = 0;
  const auto params = model.parameters();
  for (const Parameter* p : params) {
    tensors.push_back({{"name", p->name},
                       {"shape", {p->value.rows(), p->value.cols()}},
                       {"offset", offset}});
    offset += static_cast<std::uint64_t>(p->value.size()) * 8;
  }
  header["tensors"] = tensors;
  const std::string text = header.dump();

  std::string out(kMagic, 8);
  put_u32(out, kCheckpointVersion);
  put_u64(out, text.size());
  out += text;
  out.reserve(out.size() + offset);
  for (const Parameter* p : params)
    for (Eigen::Index r = 0; r < p->value.rows(); ++r)
      for (Eigen::Index c = 0; c < p->value.cols(); ++c)
        put_u64(out, std::bit_cast<std::uint64_t>(p->value(r, c)));

  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write checkpoint " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("short write on " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

nlohmann::json read_checkpoint_header(const std::filesystem::path& path) {
  return parse_container(read_file(path)).header;
}

Model load_checkpoint(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  const ParsedCheckpoint parsed = parse_container(bytes);
  const auto& h = parsed.header;
  try {
    Vocabulary vocab(h.at("vocab").get<std::vector<std::string>>());
    if (hex64(vocab.hash()) != h.at("vocab_hash").get<std::string>())
      throw IoError("checkpoint vocabulary hash mismatch");
    EntityCatalog catalog = EntityCatalog::from_json(h.at("catalog").dump());
    const ModelConfig config = model_config_from_json(h.at("model"));
    Model model = Model::create(config, std::move(vocab), std::move(catalog),
                                h.at("seed").get<std::uint64_t>());
    const auto& tensors = h.at("tensors");
    auto params = model.parameters();
    if (tensors.size() != params.size())
      throw IoError("checkpoint holds " + std::to_string(tensors.size()) + " tensors, model needs " +
                    std::to_string(params.size()));
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto& t = tensors[i];
      Parameter& p = *params[i];
      const auto rows = t.at("shape")[0].get<Eigen::Index>();
      const auto cols = t.at("shape")[1].get<Eigen::Index>();
      if (t.at("name").get<std::string>() != p.name || rows != p.value.rows() || cols != p.value.cols())
        throw IoError("checkpoint tensor '" + t.at("name").get<std::string>() +
                      "' does not match the model layout");
      std::size_t at = parsed.data_offset + t.at("offset").get<std::size_t>();
      for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c, at += 8)
          p.value(r, c) = std::bit_cast<double>(get_le(bytes, at, 8));
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed checkpoint header: ") + e.what());
  }
}

}  // namespace nermrc
