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

#include <string>
#include <vector>

#include "doctest.h"
#include "nermrc/decoder.hpp"
#include "nermrc/error.hpp"
#include "nermrc/reconstruction.hpp"
#include "nermrc/synthetic.hpp"
#include "support.hpp"

using namespace nermrc;
using namespace nermrc::testing;

namespace {

// One-hot row per token, computed straight from the tag strings.
std::vector<std::vector<int>> one_hot(const std::vector<std::string>& tags,
                                      const std::vector<std::string>& types) {
  std::vector<std::vector<int>> m(tags.size(), std::vector<int>(types.size(), 0));
  for (std::size_t r = 0; r < tags.size(); ++r)
    for (std::size_t i = 0; i < types.size(); ++i)
      if (tags[r] != "O" && tags[r].substr(2) == types[i]) m[r][i] = 1;
  return m;
}

}  // namespace

TEST_CASE("label matrix example") {
  const auto catalog = name_catalog({"PER", "LOC"});
  const auto m = build_label_matrix(make_sentence({"B-LOC", "O", "B-PER"}), catalog);
  REQUIRE(m.rows() == 3);
  REQUIRE(m.cols() == 2);
  const int expected[3][2] = {{0, 1}, {0, 0}, {1, 0}};
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 2; ++c) CHECK(m.at(r, c) == expected[r][c]);
  CHECK(m.column(1) == std::vector<int>{1, 0, 0});
}

TEST_CASE("all-O sentence gives an all-zero matrix") {
  const auto m = build_label_matrix(make_sentence({"O", "O", "O"}), name_catalog({"PER"}));
  for (std::size_t r = 0; r < 3; ++r) CHECK(m.at(r, 0) == 0);
}

TEST_CASE("unknown types name the type and position") {
  try {
    build_label_matrix(make_sentence({"O", "B-GPE"}), name_catalog({"PER"}));
    FAIL("expected CatalogError");
  } catch (const CatalogError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("GPE") != std::string::npos);
    CHECK(msg.find('1') != std::string::npos);
  }
}

TEST_CASE("triplet fields") {
  const auto catalog = name_catalog({"PER", "LOC"});
  const auto t = reconstruct(make_sentence({"B-PER", "I-PER"}), catalog);
  CHECK(t.passage == std::vector<std::string>{"w0", "w1"});
  CHECK(t.question == std::vector<std::string>{"What", "kind", "of", "entity", "is", "this?"});
  REQUIRE(t.options.size() == 2);
  CHECK(t.options[1] == std::vector<std::string>{"LOC", "names"});
  REQUIRE(t.labels);
  CHECK(!reconstruct(make_sentence({"O"}), catalog, false).labels);
}

TEST_CASE("label matrix matches a per-token one-hot oracle") {
  Rng rng(31);
  const std::vector<std::string> types = {"A", "B", "C"};
  const auto catalog = name_catalog(types);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto tags = random_iob2(rng, 1 + rng.below(12), types);
    const auto m = build_label_matrix(make_sentence(tags), catalog);
    const auto want = one_hot(tags, types);
    REQUIRE(m.rows() == tags.size());
    REQUIRE(m.cols() == types.size());
    for (std::size_t r = 0; r < tags.size(); ++r)
      for (std::size_t i = 0; i < types.size(); ++i) CHECK(m.at(r, i) == want[r][i]);
  }
}

TEST_CASE("perfect decoding recovers per-token types") {
  Rng rng(37);
  const std::vector<std::string> types = {"A", "B", "C"};
  const auto catalog = name_catalog(types);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto tags = random_iob2(rng, 1 + rng.below(12), types);
    const auto decoded = decode(perfect_prediction(build_label_matrix(make_sentence(tags), catalog)), catalog);
    REQUIRE(decoded.size() == tags.size());
    for (std::size_t r = 0; r < tags.size(); ++r) CHECK(strip_iob(decoded[r]) == strip_iob(tags[r]));
  }
}

TEST_CASE("option source changes options only") {
  const auto corpus = generate_synthetic({});
  const auto a = synthetic_catalog(SourceKind::kAnnotationGuidelines);
  const auto b = synthetic_catalog(SourceKind::kNameOnly);
  CHECK(b[0].option_text == "Person");
  for (const auto& s : corpus.train) {
    const auto ta = reconstruct(s, a);
    const auto tb = reconstruct(s, b);
    CHECK(*ta.labels == *tb.labels);
    CHECK(ta.passage == tb.passage);
    CHECK(ta.options != tb.options);
  }
}

TEST_CASE("single-type catalog") {
  const EntityCatalog c("ncbi", SourceKind::kInternetDefinition, {{"Disease", "Disease names."}});
  const auto t = reconstruct(make_sentence({"B-Disease", "O"}), c);
  CHECK(t.options.size() == 1);
  CHECK(t.labels->cols() == 1);
}

TEST_CASE("json form") {
  const auto t = reconstruct(make_sentence({"B-A"}), name_catalog({"A"}));
  const std::string j = t.to_json();
  CHECK(j.find("\"label_matrix\":[[1]]") != std::string::npos);
  CHECK(j.find("What kind of entity is this?") != std::string::npos);
}
