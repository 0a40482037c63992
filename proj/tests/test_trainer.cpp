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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "nermrc/error.hpp"
#include "nermrc/synthetic.hpp"
#include "nermrc/trainer.hpp"

using namespace nermrc;

namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nermrc_test_trainer_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TrainConfig small_train_config() {
  TrainConfig c;
  c.learning_rate = 1e-3;
  c.epochs = 3;
  c.batch_size = 2;
  c.model.encoder.d_model = 16;
  c.model.encoder.n_heads = 2;
  c.model.encoder.ffn_dim = 32;
  c.model.encoder.max_len = 64;
  c.model.hrca.n_heads = 2;
  c.model.hrca.head_dim = 8;
  c.data.synthetic = SyntheticConfig{};
  return c;
}

Dataset synthetic_dataset(std::size_t train = 50) {
  SyntheticConfig sc;
  sc.train = train;
  const auto corpus = generate_synthetic(sc);
  return {synthetic_catalog(), corpus.train, corpus.dev, corpus.test};
}

}  // namespace

TEST_CASE("schedule endpoints and peak") {
  const LinearWarmupSchedule s(1e-3, 100, 0.1);
  CHECK(s.warmup_steps() == 10);
  CHECK(s.at(0) == 0.0);
  CHECK(s.at(5) == doctest::Approx(5e-4));
  CHECK(s.at(10) == doctest::Approx(1e-3));
  CHECK(s.at(55) == doctest::Approx(5e-4));
  CHECK(s.at(100) == 0.0);
  CHECK(s.at(150) == 0.0);
  for (std::size_t t = 1; t < 100; ++t) CHECK(s.at(t) <= 1e-3 + 1e-18);

  const LinearWarmupSchedule flat(2.0, 10, 0.0);
  CHECK(flat.at(0) == 2.0);
  CHECK(flat.at(5) == doctest::Approx(1.0));
}

TEST_CASE("schedule is piecewise linear") {
  const LinearWarmupSchedule s(1.0, 37, 0.25);
  const std::size_t w = s.warmup_steps();
  for (std::size_t t = 1; t + 1 < w; ++t)
    CHECK(s.at(t + 1) - s.at(t) == doctest::Approx(s.at(t) - s.at(t - 1)));
  for (std::size_t t = w + 1; t + 1 <= 37; ++t)
    CHECK(s.at(t + 1) - s.at(t) == doctest::Approx(s.at(t) - s.at(t - 1)));
}

TEST_CASE("AdamW first step and decay exemption") {
  OptimizerConfig oc;
  oc.weight_decay = 0.1;
  AdamW opt(oc);
  Parameter w{"w", Matrix::Constant(2, 1, 1.0), Matrix::Constant(2, 1, 0.5)};
  Parameter b{"b", Matrix::Constant(1, 2, 1.0), Matrix::Constant(1, 2, -0.5)};
  Parameter* ps[] = {&w, &b};
  opt.step(ps, 0.01);
  // m_hat = g, v_hat = g^2, so the moment term is lr * sign(g) up to eps.
  const double moment = 0.01 * 0.5 / (0.5 + 1e-8);
  CHECK(w.value(0, 0) == doctest::Approx(1.0 - moment - 0.01 * 0.1 * 1.0).epsilon(1e-12));
  CHECK(b.value(0, 0) == doctest::Approx(1.0 + moment).epsilon(1e-12));
  CHECK(opt.steps() == 1);
}

TEST_CASE("config validation and json") {
  TrainConfig c;
  CHECK_NOTHROW(c.validate());
  c.learning_rate = 0;
  CHECK_THROWS(c.validate());
  c = TrainConfig{};
  c.epochs = 0;
  CHECK_THROWS(c.validate());
  c = TrainConfig{};
  c.warmup_fraction = 1.0;
  CHECK_THROWS(c.validate());
  c = TrainConfig{};
  c.batch_size = 0;
  CHECK_THROWS(c.validate());

  TrainConfig d = small_train_config();
  d.model.variant = Variant::kReconstructionOnly;
  const auto back = TrainConfig::from_json(d.to_json());
  CHECK(back.to_json() == d.to_json());
  CHECK_THROWS(TrainConfig::from_json(nlohmann::json{{"learning_rat", 1.0}}));
  const auto partial = TrainConfig::from_json(nlohmann::json{{"epochs", 4}}, d);
  CHECK(partial.epochs == 4);
  CHECK(partial.learning_rate == d.learning_rate);
}

TEST_CASE("training loss decreases over the first epochs") {
  const auto r = train(small_train_config(), synthetic_dataset());
  REQUIRE(r.record.epochs.size() == 3);
  CHECK(r.record.epochs[1].train_loss < r.record.epochs[0].train_loss);
  CHECK(r.record.epochs[2].train_loss < r.record.epochs[1].train_loss);
  CHECK(r.record.epochs[2].steps == 75);
  CHECK(r.record.best_epoch >= 1);
}

TEST_CASE("loss decreases over the first steps on a fixed batch") {
  const auto data = synthetic_dataset(2);
  auto c = small_train_config();
  c.epochs = 1;
  const auto triplets = reconstruct_all(data.train, data.catalog);
  Model m = Model::create(c.model, Vocabulary::build(triplets), data.catalog, 1);
  std::vector<Example> batch;
  for (const auto& s : data.train) batch.push_back(m.prepare(s));
  AdamW opt(c.optimizer);
  const auto params = m.parameters();
  double prev = 1e300;
  for (int step = 0; step < 5; ++step) {
    for (Parameter* p : params) p->zero_grad();
    double total = 0;
    for (const auto& ex : batch) {
      Tape t;
      const Var l = m.loss(t, ex);
      total += l.scalar();
      t.backward(l);
      t.accumulate_grads(params);
    }
    CHECK(total < prev);
    prev = total;
    opt.step(params, 1e-3);
  }
}

TEST_CASE("identical runs write identical files") {
  auto c = small_train_config();
  c.epochs = 2;
  const auto a = temp_dir("det_a"), b = temp_dir("det_b");
  train(c, synthetic_dataset(), {a, {}});
  train(c, synthetic_dataset(), {b, {}});
  for (const char* f : {"last.ckpt", "best.ckpt", "run_record.jsonl", "run_summary.json"})
    CHECK(slurp(a / f) == slurp(b / f));
  CHECK(fs::exists(a / "timings.jsonl"));
  CHECK(slurp(a / "run_record.jsonl").find("wall") == std::string::npos);
}

TEST_CASE("early stopping") {
  auto c = small_train_config();
  c.learning_rate = 1e-12;
  c.epochs = 6;
  c.early_stopping_patience = 2;
  const auto r = train(c, synthetic_dataset());
  CHECK(r.record.early_stopped);
  CHECK(r.record.epochs.size() < 6);
  CHECK(r.record.epochs.size() == static_cast<std::size_t>(r.record.best_epoch + 2));
}

TEST_CASE("non-finite loss aborts with diagnostics") {
  auto c = small_train_config();
  c.learning_rate = 1e308;
  c.warmup_fraction = 0.0;
  const auto dir = temp_dir("nan");
  CHECK_THROWS_AS(train(c, synthetic_dataset(), {dir, {}}), NumericError);
  CHECK(fs::exists(dir / "diagnostics.json"));
}

TEST_CASE("ablation runs one record per variant") {
  auto c = small_train_config();
  c.epochs = 1;
  const Variant vs[] = {Variant::kFull, Variant::kReconstructionOnly, Variant::kVanilla};
  const auto dir = temp_dir("ablate");
  const auto records = run_ablation(c, vs, synthetic_dataset(), {dir, {}});
  REQUIRE(records.size() == 3);
  CHECK(records[0].variant == "full");
  CHECK(records[2].variant == "vanilla");
  CHECK(fs::exists(dir / "vanilla" / "run_record.jsonl"));
  const auto table = format_ablation_table(records);
  CHECK(table.find("reconstruction_only") != std::string::npos);
}

TEST_CASE("data paths fall back to the data directory") {
  setenv("NERMRC_DATA_DIR", NERMRC_FIXTURES, 1);
  DataConfig dc;
  dc.corpus = "wnut17_mini";
  dc.catalog = std::string(NERMRC_FIXTURES) + "/../../data/catalogs/wnut17_name_only.json";
  const auto d = load_dataset(dc);
  CHECK(d.train.size() == 8);
  CHECK(d.dev.size() == 3);
  CHECK(d.test.size() == 4);
  CHECK(d.catalog.size() == 6);
  unsetenv("NERMRC_DATA_DIR");
  CHECK_THROWS_AS(load_dataset(dc), IoError);
}

TEST_CASE("catalog must cover the training types") {
  auto data = synthetic_dataset();
  data.catalog = EntityCatalog("x", SourceKind::kNameOnly, {{"PER", "Person"}});
  CHECK_THROWS_AS(train(small_train_config(), data), CatalogError);
}

TEST_CASE("vanilla examples carry no reconstruction") {
  auto c = small_train_config();
  c.model.variant = Variant::kVanilla;
  const auto data = synthetic_dataset(4);
  const auto r = train(c, data);
  const Example ex = r.model.prepare(data.train[0]);
  CHECK(ex.triplet.options.empty());
  CHECK(ex.triplet.question.empty());
  CHECK(!ex.triplet.labels);
  CHECK(ex.tag_targets.size() == data.train[0].size());
  CHECK(!r.model.hrca());
  CHECK(r.model.head().size() == 0);
  CHECK(r.model.vocab().id("kind") == Vocabulary::kUnk);
}

TEST_CASE("option content is swapped by changing the catalog file") {
  const std::string cats = std::string(NERMRC_FIXTURES) + "/../../data/catalogs/";
  auto c = small_train_config();
  c.epochs = 1;
  c.data.synthetic.reset();
  c.data.corpus = std::string(NERMRC_FIXTURES) + "/wnut17_mini";
  c.model.encoder.max_len = 128;
  std::vector<double> losses;
  for (const char* f : {"wnut17_annotation_guidelines.json", "wnut17_name_only.json"}) {
    c.data.catalog = cats + f;
    const auto r = train(c, load_dataset(c.data));
    CHECK(r.model.catalog().size() == 6);
    losses.push_back(r.record.epochs[0].train_loss);
  }
  CHECK(losses[0] != losses[1]);
}
