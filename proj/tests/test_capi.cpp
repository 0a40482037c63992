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

// Exercises the shared library through the C header only.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "nermrc/nermrc.h"

namespace fs = std::filesystem;

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  nermrc_string_free(s);
  return out;
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nermrc_test_capi_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const std::string kFixtures = NERMRC_FIXTURES;

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(nermrc_version()).size() > 0);
  CHECK(std::string(nermrc_status_name(NERMRC_OK)) == "ok");
  CHECK(std::string(nermrc_status_name(NERMRC_E_IO)) == "i/o error");
  CHECK(std::string(nermrc_status_name(static_cast<nermrc_status>(99))) == "unknown");
}

TEST_CASE("errors map to status codes") {
  nermrc_set_verbosity(0);
  nermrc_corpus* c = nullptr;
  CHECK(nermrc_corpus_load("/nonexistent", 0, &c) == NERMRC_E_IO);
  CHECK(c == nullptr);
  CHECK(std::string(nermrc_last_error()).find("/nonexistent") != std::string::npos);
  CHECK(nermrc_corpus_load(nullptr, 0, &c) == NERMRC_E_INVALID_ARGUMENT);

  const auto dir = temp_dir("errors");
  std::ofstream(dir / "bad.conll") << "a O\nb Q-LOC\n";
  CHECK(nermrc_corpus_load((dir / "bad.conll").c_str(), 0, &c) == NERMRC_E_PARSE);
  std::ofstream(dir / "bad.json") << "{\"options\": [{\"type\": \"A\"}]}";
  nermrc_catalog* cat = nullptr;
  CHECK(nermrc_catalog_load((dir / "bad.json").c_str(), &cat) == NERMRC_E_CATALOG);
  nermrc_model* m = nullptr;
  CHECK(nermrc_model_load((dir / "bad.json").c_str(), &m) == NERMRC_E_IO);
  CHECK(nermrc_train("{not json", dir.c_str(), nullptr) == NERMRC_E_PARSE);
  nermrc_set_verbosity(1);
}

TEST_CASE("corpus and catalog handles") {
  nermrc_set_verbosity(0);
  nermrc_corpus* c = nullptr;
  REQUIRE(nermrc_corpus_load((kFixtures + "/wnut17_mini").c_str(), 0, &c) == NERMRC_OK);
  size_t n = 0;
  CHECK(nermrc_corpus_size(c, &n) == NERMRC_OK);
  CHECK(n == 15);
  nermrc_corpus_free(c);

  REQUIRE(nermrc_corpus_load((kFixtures + "/orphan.conll").c_str(), 0, &c) == NERMRC_OK);
  CHECK(nermrc_corpus_iob_warnings(c, &n) == NERMRC_OK);
  CHECK(n == 2);
  nermrc_corpus_free(c);

  nermrc_catalog* cat = nullptr;
  REQUIRE(nermrc_catalog_load((kFixtures + "/../../data/catalogs/conllpp_name_only.json").c_str(), &cat) ==
          NERMRC_OK);
  CHECK(nermrc_catalog_size(cat, &n) == NERMRC_OK);
  CHECK(n == 4);
  nermrc_catalog_free(cat);
  nermrc_corpus_free(nullptr);
  nermrc_catalog_free(nullptr);
  nermrc_model_free(nullptr);
  nermrc_set_verbosity(1);
}

TEST_CASE("stats as json") {
  char* json = nullptr;
  REQUIRE(nermrc_stats((kFixtures + "/wnut17_mini").c_str(), nullptr, 0, &json) == NERMRC_OK);
  const auto j = nlohmann::json::parse(take(json));
  CHECK(j["split_sizes"]["train"] == 8);
  CHECK(j["split_sizes"]["dev"] == 3);
  CHECK(j["split_sizes"]["test"] == 4);
  CHECK(j["n_entity_types"] == 6);
}

TEST_CASE("synthesize, train, infer, evaluate") {
  const auto dir = temp_dir("pipeline");
  REQUIRE(nermrc_synth((dir / "data").c_str(), 7, 20, 10, 10) == NERMRC_OK);

  nermrc_corpus* corpus = nullptr;
  nermrc_catalog* catalog = nullptr;
  REQUIRE(nermrc_corpus_load((dir / "data" / "dev.conll").c_str(), 0, &corpus) == NERMRC_OK);
  REQUIRE(nermrc_catalog_load((dir / "data" / "catalog.json").c_str(), &catalog) == NERMRC_OK);
  REQUIRE(nermrc_reconstruct(corpus, catalog, (dir / "dev.jsonl").c_str()) == NERMRC_OK);
  std::ifstream lines(dir / "dev.jsonl");
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    CHECK(nlohmann::json::parse(line)["question"] == "What kind of entity is this?");
    ++count;
  }
  CHECK(count == 10);
  nermrc_corpus_free(corpus);
  nermrc_catalog_free(catalog);

  nlohmann::json config = {
      {"epochs", 2},
      {"learning_rate", 1e-3},
      {"encoder", {{"d_model", 16}, {"n_heads", 2}, {"ffn_dim", 32}, {"max_len", 64}}},
      {"hrca", {{"n_heads", 2}, {"head_dim", 8}}},
      {"data", {{"corpus", (dir / "data").string()}, {"catalog", (dir / "data" / "catalog.json").string()}}}};
  char* summary = nullptr;
  REQUIRE(nermrc_train(config.dump().c_str(), (dir / "run").c_str(), &summary) == NERMRC_OK);
  const auto s = nlohmann::json::parse(take(summary));
  CHECK(s["epochs_run"] == 2);

  nermrc_model* model = nullptr;
  REQUIRE(nermrc_model_load((dir / "run" / "best.ckpt").c_str(), &model) == NERMRC_OK);
  REQUIRE(nermrc_model_infer(model, (dir / "data" / "test.conll").c_str(), (dir / "pred.conll").c_str()) ==
          NERMRC_OK);
  nermrc_model_free(model);

  char* report = nullptr;
  REQUIRE(nermrc_eval((dir / "data" / "test.conll").c_str(), (dir / "pred.conll").c_str(), 0, &report) ==
          NERMRC_OK);
  const auto r = nlohmann::json::parse(take(report));
  CHECK(r["f1"].get<double>() == doctest::Approx(s["final_test_f1"].get<double>()).epsilon(1e-12));

  CHECK(nermrc_eval((dir / "data" / "test.conll").c_str(), (dir / "data" / "dev.conll").c_str(), 0, &report) ==
        NERMRC_E_PARSE);
}

TEST_CASE("ablation over the C API") {
  const auto dir = temp_dir("ablate");
  nlohmann::json config = {{"epochs", 1},
                           {"learning_rate", 1e-3},
                           {"encoder", {{"d_model", 8}, {"n_heads", 2}, {"ffn_dim", 16}, {"max_len", 64}}},
                           {"hrca", {{"n_heads", 2}, {"head_dim", 4}}},
                           {"data", {{"synthetic", {{"seed", 3}, {"train", 10}, {"dev", 5}, {"test", 5}}}}}};
  char* out = nullptr;
  REQUIRE(nermrc_ablate(config.dump().c_str(), "full,vanilla", dir.c_str(), &out) == NERMRC_OK);
  const auto j = nlohmann::json::parse(take(out));
  CHECK(j["runs"].size() == 2);
  CHECK(nermrc_ablate(config.dump().c_str(), "full,bogus", dir.c_str(), &out) == NERMRC_E_INVALID_ARGUMENT);
}
