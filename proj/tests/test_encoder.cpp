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

#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "nermrc/encoder.hpp"
#include "nermrc/error.hpp"
#include "nermrc/log.hpp"
#include "support.hpp"

using namespace nermrc;
using namespace nermrc::testing;

namespace {

McTriplet triplet_of(std::size_t k, const std::vector<std::string>& option_texts) {
  std::vector<CatalogEntry> entries;
  for (std::size_t i = 0; i < option_texts.size(); ++i)
    entries.push_back({"T" + std::to_string(i), option_texts[i]});
  const EntityCatalog c("t", SourceKind::kInternetDefinition, entries);
  return reconstruct(make_sentence(std::vector<std::string>(k, "O")), c);
}

EncoderConfig small_config(int d) {
  EncoderConfig c;
  c.d_model = d;
  c.n_layers = 2;
  c.n_heads = 2;
  c.ffn_dim = 2 * d;
  c.max_len = 64;
  return c;
}

bool same_bytes(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

}  // namespace

TEST_CASE("vocabulary") {
  Vocabulary v;
  CHECK(v.id("[PAD]") == Vocabulary::kPad);
  CHECK(v.id("[SEP]") == Vocabulary::kSep);
  CHECK(v.id("[UNK]") == Vocabulary::kUnk);
  const int a = v.add("alpha");
  CHECK(a == 3);
  CHECK(v.add("alpha") == a);
  CHECK(v.id("never-seen") == Vocabulary::kUnk);
  Vocabulary w(v.tokens());
  CHECK(w.hash() == v.hash());
  w.add("beta");
  CHECK(w.hash() != v.hash());
  CHECK_THROWS(Vocabulary(std::vector<std::string>{"a", "b"}));
}

TEST_CASE("segment shapes") {
  const auto t = triplet_of(3, {"one two", "three"});
  const Vocabulary vocab = Vocabulary::build(std::span(&t, 1));
  Rng rng(1);
  const auto params = EncoderParams::init(small_config(16), vocab.size(), rng);
  Tape tape(false);
  const auto h = encode_triplet(tape, t, 0, params, vocab);
  CHECK(h.passage.rows() == 3);
  CHECK(h.passage.cols() == 16);
  CHECK(h.question.rows() == 6);
  CHECK(h.question.cols() == 16);
  CHECK(h.option.rows() == 2);
  CHECK(encode_triplet(tape, t, 1, params, vocab).option.rows() == 1);
  CHECK(h.passage.value().allFinite());
}

TEST_CASE("layout places separators between segments") {
  const auto t = triplet_of(2, {"a b c"});
  const Vocabulary vocab = Vocabulary::build(std::span(&t, 1));
  const auto l = layout_triplet(t, 0, vocab, small_config(8));
  CHECK(l.ids.size() == l.passage_len + l.question_len + l.option_len + 2);
  CHECK(l.ids[l.passage_len] == Vocabulary::kSep);
  CHECK(l.ids[l.question_offset() + l.question_len] == Vocabulary::kSep);
  CHECK(l.option_offset() == 2 + 6 + 2);
  CHECK_THROWS_AS(layout_triplet(t, 1, vocab, small_config(8)), ShapeError);
}

TEST_CASE("overlong input needs truncation") {
  const auto t = triplet_of(3, {"a b c d e f g h i j"});
  const Vocabulary vocab = Vocabulary::build(std::span(&t, 1));
  auto cfg = small_config(8);
  cfg.max_len = 15;  // 3 + 6 + 10 + 2 = 21
  CHECK_THROWS_AS(layout_triplet(t, 0, vocab, cfg), TruncationError);

  std::vector<std::string> logged;
  set_log_sink([&](std::string_view m) { logged.emplace_back(m); });
  cfg.truncate = true;
  const auto l = layout_triplet(t, 0, vocab, cfg);
  set_log_sink(nullptr);
  CHECK(l.ids.size() == 15);
  CHECK(l.passage_len == 3);
  CHECK(l.question_len == 6);
  CHECK(l.option_len == 4);
  CHECK(logged.size() == 1);

  cfg.max_len = 9;  // option and question cut to one token each
  set_log_sink([](std::string_view) {});
  const auto tight = layout_triplet(t, 0, vocab, cfg);
  CHECK(tight.option_len == 1);
  CHECK(tight.question_len == 3);
  cfg.max_len = 6;
  CHECK_THROWS_AS(layout_triplet(t, 0, vocab, cfg), TruncationError);
  set_log_sink(nullptr);
}

TEST_CASE("zero embeddings make every row equal") {
  const auto t = triplet_of(4, {"x y"});
  const Vocabulary vocab = Vocabulary::build(std::span(&t, 1));
  Rng rng(2);
  auto params = EncoderParams::init(small_config(8), vocab.size(), rng);
  params.token_embedding.value.setZero();
  params.position_embedding.value.setZero();
  Tape tape(false);
  const auto h = encode_triplet(tape, t, 0, params, vocab);
  const Matrix& p = h.passage.value();
  for (Eigen::Index r = 1; r < p.rows(); ++r) CHECK((p.row(r) - p.row(0)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((h.question.value().row(2) - p.row(0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("encoding is deterministic for a fixed seed") {
  const auto t = triplet_of(5, {"p q r", "s"});
  const Vocabulary vocab = Vocabulary::build(std::span(&t, 1));
  Rng r1(42), r2(42);
  const auto p1 = EncoderParams::init(small_config(8), vocab.size(), r1);
  const auto p2 = EncoderParams::init(small_config(8), vocab.size(), r2);
  Tape a(false), b(false);
  const auto h1 = encode_triplet(a, t, 1, p1, vocab);
  const auto h2 = encode_triplet(b, t, 1, p2, vocab);
  CHECK(same_bytes(h1.passage.value(), h2.passage.value()));
  CHECK(same_bytes(h1.question.value(), h2.question.value()));
  CHECK(same_bytes(h1.option.value(), h2.option.value()));
}

TEST_CASE("embedding rows are per-token") {
  Rng rng(3);
  const auto params = EncoderParams::init(small_config(8), 20, rng);
  const std::vector<int> ids = {4, 5, 6, 7, 8};
  for (std::size_t r = 0; r < ids.size(); ++r) {
    std::vector<int> masked = ids;
    masked[r] = Vocabulary::kPad;
    Tape t(false);
    const Matrix a = embed(t, ids, params).value();
    const Matrix b = embed(t, masked, params).value();
    for (Eigen::Index row = 0; row < a.rows(); ++row) {
      const bool changed = (a.row(row) - b.row(row)).cwiseAbs().maxCoeff() > 0;
      CHECK(changed == (static_cast<std::size_t>(row) == r));
    }
  }
}

TEST_CASE("one hidden state per option, permuted with the options") {
  const auto t = triplet_of(3, {"aa bb", "cc", "dd ee ff"});
  const Vocabulary vocab = Vocabulary::build(std::span(&t, 1));
  Rng rng(5);
  const auto params = EncoderParams::init(small_config(8), vocab.size(), rng);
  Tape tape(false);
  const auto all = encode_all_options(tape, t, params, vocab);
  REQUIRE(all.size() == 3);
  McTriplet perm = t;
  perm.options = {t.options[2], t.options[0], t.options[1]};
  const auto permuted = encode_all_options(tape, perm, params, vocab);
  const std::size_t src[] = {2, 0, 1};
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(same_bytes(permuted[i].passage.value(), all[src[i]].passage.value()));
    CHECK(same_bytes(permuted[i].option.value(), all[src[i]].option.value()));
  }
}

TEST_CASE("passage-sum gradient matches finite differences") {
  Rng rng(7);
  for (int trial = 0; trial < 4; ++trial) {
    const auto inst = random_tiny_instance(rng);
    const auto t = reconstruct(inst.sentence, inst.catalog);
    const Vocabulary vocab = Vocabulary::build(std::span(&t, 1));
    auto cfg = small_config(8);
    auto params = EncoderParams::init(cfg, vocab.size(), rng);
    std::vector<Parameter*> ps;
    params.collect(ps);
    const auto r = grad_check(ps, [&](Tape& tape) {
      return sum_all(encode_triplet(tape, t, 0, params, vocab).passage);
    }, rng);
    INFO(r.worst);
    CHECK(r.max_rel_error <= 1e-4);
  }
}
