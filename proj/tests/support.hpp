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

// Helpers shared by the unit tests and the acceptance binary: random
// generators and brute-force reference implementations.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "nermrc/catalog.hpp"
#include "nermrc/corpus_io.hpp"
#include "nermrc/encoder.hpp"
#include "nermrc/head_loss.hpp"
#include "nermrc/model.hpp"
#include "nermrc/random.hpp"
#include "nermrc/reconstruction.hpp"

namespace nermrc::testing {

inline EntityCatalog name_catalog(const std::vector<std::string>& types) {
  std::vector<CatalogEntry> entries;
  for (const auto& t : types) entries.push_back({t, t + " names"});
  return EntityCatalog("test", SourceKind::kNameOnly, std::move(entries));
}

/// Valid IOB2 tags over `types`.
inline std::vector<std::string> random_iob2(Rng& rng, std::size_t k,
                                            const std::vector<std::string>& types) {
  std::vector<std::string> tags;
  std::string open;
  for (std::size_t r = 0; r < k; ++r) {
    const double u = rng.uniform();
    if (!open.empty() && u < 0.3) {
      tags.push_back("I-" + open);
    } else if (u < 0.65) {
      open = rng.pick(types);
      tags.push_back("B-" + open);
    } else {
      open.clear();
      tags.push_back("O");
    }
  }
  return tags;
}

inline TaggedSentence make_sentence(const std::vector<std::string>& tags) {
  TaggedSentence s;
  for (std::size_t i = 0; i < tags.size(); ++i) s.tokens.push_back({"w" + std::to_string(i), tags[i]});
  return s;
}

/// The decoding rule written out directly over the raw probability tensor.
inline std::vector<std::string> oracle_decode(const PredictionMatrix& p,
                                              const std::vector<std::string>& type_names) {
  std::vector<std::string> out;
  std::string prev;
  for (std::size_t r = 0; r < p.length(); ++r) {
    int best = -1;
    double best_p = 0;
    for (std::size_t i = 0; i < p.option_count(); ++i) {
      const double sel = p.at(r, i, 0), not_sel = p.at(r, i, 1);
      if (!(sel > not_sel)) continue;
      if (best < 0 || sel > best_p) {
        best = static_cast<int>(i);
        best_p = sel;
      }
    }
    if (best < 0) {
      out.push_back("O");
      prev.clear();
      continue;
    }
    const std::string& t = type_names[static_cast<std::size_t>(best)];
    out.push_back((prev == t ? "I-" : "B-") + t);
    prev = t;
  }
  return out;
}

/// Every (type, start, end) interval that reads as a complete IOB2 entity.
inline std::set<std::tuple<std::string, std::size_t, std::size_t>> oracle_spans(
    const std::vector<std::string>& tags) {
  std::set<std::tuple<std::string, std::size_t, std::size_t>> out;
  const std::size_t k = tags.size();
  for (std::size_t s = 0; s < k; ++s) {
    if (tags[s].rfind("B-", 0) != 0) continue;
    const std::string t = tags[s].substr(2);
    for (std::size_t e = s + 1; e <= k; ++e) {
      bool inside = true;
      for (std::size_t j = s + 1; j < e; ++j) inside = inside && tags[j] == "I-" + t;
      const bool closed = e == k || tags[e] != "I-" + t;
      if (inside && closed) out.insert({t, s, e});
    }
  }
  return out;
}

struct OracleF1 {
  std::size_t tp = 0, fp = 0, fn = 0;
  double f1 = 0;
};

inline OracleF1 oracle_f1(const std::vector<std::vector<std::string>>& gold,
                          const std::vector<std::vector<std::string>>& pred) {
  OracleF1 r;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto g = oracle_spans(gold[i]);
    const auto p = oracle_spans(pred[i]);
    std::size_t hit = 0;
    for (const auto& s : p) hit += g.count(s);
    r.tp += hit;
    r.fp += p.size() - hit;
    r.fn += g.size() - hit;
  }
  const double tp = static_cast<double>(r.tp);
  r.f1 = r.tp == 0 ? 0.0 : 2 * tp / (2 * tp + static_cast<double>(r.fp + r.fn));
  return r;
}

struct TinyInstance {
  EntityCatalog catalog;
  TaggedSentence sentence;
};

/// k <= max_k passage tokens, 1..max_types types, option texts of 1..max_opt words.
inline TinyInstance random_tiny_instance(Rng& rng, std::size_t max_k = 6, std::size_t max_types = 3,
                                         std::size_t max_opt = 6) {
  static const std::vector<std::string> words = {"alpha", "beta", "gamma", "delta", "eps",
                                                 "zeta",  "eta",  "theta", "iota",  "kappa"};
  const std::size_t n_types = 1 + rng.below(max_types);
  std::vector<std::string> types;
  std::vector<CatalogEntry> entries;
  for (std::size_t t = 0; t < n_types; ++t) {
    types.push_back("T" + std::to_string(t));
    std::string text;
    const std::size_t len = 1 + rng.below(max_opt);
    for (std::size_t j = 0; j < len; ++j) text += (j ? " " : "") + rng.pick(words);
    entries.push_back({types.back(), text});
  }
  TinyInstance inst{EntityCatalog("tiny", SourceKind::kInternetDefinition, std::move(entries)), {}};
  const std::size_t k = 1 + rng.below(max_k);
  const auto tags = random_iob2(rng, k, types);
  for (std::size_t r = 0; r < k; ++r) inst.sentence.tokens.push_back({rng.pick(words), tags[r]});
  return inst;
}

inline ModelConfig tiny_config(int hrca_heads = 2, int hrca_head_dim = 4) {
  ModelConfig c;
  c.encoder.d_model = 8;
  c.encoder.n_layers = 1;
  c.encoder.n_heads = 2;
  c.encoder.ffn_dim = 16;
  c.encoder.max_len = 32;
  c.hrca.n_heads = hrca_heads;
  c.hrca.head_dim = hrca_head_dim;
  return c;
}

inline Model tiny_model(const TinyInstance& inst, const ModelConfig& config, std::uint64_t seed) {
  const McTriplet triplet = reconstruct(inst.sentence, inst.catalog);
  return Model::create(config, Vocabulary::build(std::span(&triplet, 1)), inst.catalog, seed);
}

struct GradCheck {
  double max_rel_error = 0;
  std::size_t checked = 0;
  std::string worst;
};

/// Denominator floor so entries whose true gradient is ~0 are judged on
/// absolute error.
inline constexpr double kGradFloor = 1e-6;

inline double grad_rel_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), kGradFloor});
}

/// Central differences of the scalar `probe` against its tape gradient for
/// every tensor in `params`. Tensors larger than `max_per_tensor` entries
/// are sampled.
template <class Probe>
GradCheck grad_check(std::span<Parameter* const> params, Probe&& probe, Rng& rng,
                     std::size_t max_per_tensor = 1u << 20, double h = 1e-4) {
  Tape tape;
  tape.backward(probe(tape));
  auto eval = [&] {
    Tape t(false);
    return probe(t).scalar();
  };
  GradCheck out;
  for (Parameter* p : params) {
    const Matrix* g = tape.grad_of(*p);
    const auto n = static_cast<std::size_t>(p->value.size());
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    if (n > max_per_tensor) {
      rng.shuffle(idx);
      idx.resize(max_per_tensor);
    }
    for (std::size_t i : idx) {
      double& v = p->value.data()[i];
      const double saved = v;
      v = saved + h;
      const double up = eval();
      v = saved - h;
      const double down = eval();
      v = saved;
      const double numeric = (up - down) / (2 * h);
      const double analytic = g ? g->data()[i] : 0.0;
      const double rel = grad_rel_error(analytic, numeric);
      ++out.checked;
      if (rel > out.max_rel_error) {
        out.max_rel_error = rel;
        out.worst = p->name + "[" + std::to_string(i) + "] analytic=" + std::to_string(analytic) +
                    " numeric=" + std::to_string(numeric);
      }
    }
  }
  return out;
}

/// Gradient of the training loss with respect to every model parameter.
inline GradCheck grad_check(Model& model, const Example& ex, Rng& rng,
                            std::size_t max_per_tensor = 1u << 20) {
  const auto params = model.parameters();
  return grad_check(params, [&](Tape& t) { return model.loss(t, ex); }, rng, max_per_tensor);
}

}  // namespace nermrc::testing
