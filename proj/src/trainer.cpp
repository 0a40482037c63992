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

#include "nermrc/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "nermrc/error.hpp"
#include "nermrc/metrics.hpp"
#include "nermrc/random.hpp"

namespace nermrc {

// Config ---------------------------------------------------------------------

void TrainConfig::validate() const {
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) throw Error("learning_rate must be > 0");
  if (epochs < 1) throw Error("epochs must be >= 1");
  if (batch_size < 1) throw Error("batch_size must be >= 1");
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0))
    throw Error("warmup_fraction must be in [0, 1)");
  if (early_stopping_patience < 0) throw Error("early_stopping_patience must be >= 0");
  if (model.variant == Variant::kFull) model.hrca.validate();
}

nlohmann::json TrainConfig::to_json() const {
  nlohmann::json j = nermrc::to_json(model);
  j["ablation"] = j["variant"];
  j.erase("variant");
  j["learning_rate"] = learning_rate;
  j["epochs"] = epochs;
  j["batch_size"] = batch_size;
  j["warmup_fraction"] = warmup_fraction;
  j["seed"] = seed;
  j["early_stopping_patience"] = early_stopping_patience;
  j["optimizer"] = {{"beta1", optimizer.beta1},
                    {"beta2", optimizer.beta2},
                    {"epsilon", optimizer.epsilon},
                    {"weight_decay", optimizer.weight_decay}};
  nlohmann::json d;
  d["corpus"] = data.corpus;
  d["catalog"] = data.catalog;
  d["repair_iob"] = data.repair_iob;
  if (data.synthetic)
    d["synthetic"] = {{"seed", data.synthetic->seed},
                      {"train", data.synthetic->train},
                      {"dev", data.synthetic->dev},
                      {"test", data.synthetic->test}};
  if (data.synthetic_source) d["synthetic_source"] = std::string(nermrc::to_string(*data.synthetic_source));
  j["data"] = d;
  return j;
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) { return from_json(j, TrainConfig{}); }

TrainConfig TrainConfig::from_json(const nlohmann::json& j, TrainConfig c) {
  static const std::set<std::string> known = {
      "learning_rate", "epochs", "batch_size", "warmup_fraction", "seed",
      "early_stopping_patience", "ablation", "variant", "encoder", "hrca", "optimizer", "data"};
  if (!j.is_object()) throw Error("experiment config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw Error("unknown config key '" + key + "'");
  try {
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.warmup_fraction = j.value("warmup_fraction", c.warmup_fraction);
    c.seed = j.value("seed", c.seed);
    c.early_stopping_patience = j.value("early_stopping_patience", c.early_stopping_patience);
    c.model = model_config_from_json(j, c.model);
    if (j.contains("optimizer")) {
      const auto& o = j["optimizer"];
      c.optimizer.beta1 = o.value("beta1", c.optimizer.beta1);
      c.optimizer.beta2 = o.value("beta2", c.optimizer.beta2);
      c.optimizer.epsilon = o.value("epsilon", c.optimizer.epsilon);
      c.optimizer.weight_decay = o.value("weight_decay", c.optimizer.weight_decay);
    }
    if (j.contains("data")) {
      const auto& d = j["data"];
      c.data.corpus = d.value("corpus", c.data.corpus);
      c.data.catalog = d.value("catalog", c.data.catalog);
      c.data.repair_iob = d.value("repair_iob", c.data.repair_iob);
      if (d.contains("synthetic") && !d["synthetic"].is_null()) {
        SyntheticConfig s = c.data.synthetic.value_or(SyntheticConfig{});
        const auto& sj = d["synthetic"];
        s.seed = sj.value("seed", s.seed);
        s.train = sj.value("train", s.train);
        s.dev = sj.value("dev", s.dev);
        s.test = sj.value("test", s.test);
        c.data.synthetic = s;
      }
      if (d.contains("synthetic_source")) {
        const auto k = parse_source_kind(d["synthetic_source"].get<std::string>());
        if (!k) throw Error("unknown synthetic_source");
        c.data.synthetic_source = k;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed experiment config: ") + e.what());
  }
  return c;
}

// Schedule and optimizer -----------------------------------------------------

LinearWarmupSchedule::LinearWarmupSchedule(double peak, std::size_t total_steps,
                                           double warmup_fraction)
    : peak_(peak),
      total_(total_steps),
      warmup_(static_cast<std::size_t>(std::floor(warmup_fraction * static_cast<double>(total_steps)))) {}

double LinearWarmupSchedule::at(std::size_t step) const {
  if (step < warmup_) return peak_ * static_cast<double>(step) / static_cast<double>(warmup_);
  if (step >= total_) return 0.0;
  return peak_ * static_cast<double>(total_ - step) / static_cast<double>(total_ - warmup_);
}

void AdamW::step(std::span<Parameter* const> params, double lr) {
  if (m_.empty()) {
    for (const Parameter* p : params) {
      m_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
      v_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    }
  }
  if (m_.size() != params.size()) throw Error("AdamW: parameter list changed between steps");
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    if (p.grad.size() == 0) p.zero_grad();
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * p.grad;
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * p.grad.cwiseProduct(p.grad);
    if (p.value.rows() > 1 && config_.weight_decay > 0) p.value *= 1.0 - lr * config_.weight_decay;
    p.value.array() -= lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + config_.epsilon);
  }
}

// Run records ----------------------------------------------------------------

std::string RunRecord::to_jsonl() const {
  std::string out;
  for (const auto& e : epochs) {
    nlohmann::ordered_json j;
    j["variant"] = variant;
    j["epoch"] = e.epoch;
    j["train_loss"] = e.train_loss;
    j["dev_f1"] = e.dev_f1;
    j["lr"] = e.last_lr;
    j["steps"] = e.steps;
    out += j.dump() + "\n";
  }
  return out;
}

std::string RunRecord::timings_jsonl() const {
  std::string out;
  for (const auto& e : epochs) {
    nlohmann::ordered_json j;
    j["epoch"] = e.epoch;
    j["wall_seconds"] = e.wall_seconds;
    out += j.dump() + "\n";
  }
  return out;
}

nlohmann::json RunRecord::summary() const {
  nlohmann::json j;
  j["variant"] = variant;
  j["epochs_run"] = epochs.size();
  j["best_epoch"] = best_epoch;
  j["best_dev_f1"] = best_dev_f1;
  j["final_test_f1"] = final_test_f1;
  j["early_stopped"] = early_stopped;
  j["config"] = config;
  return j;
}

// Data -----------------------------------------------------------------------

namespace {

std::filesystem::path resolve_data_path(const std::string& p) {
  std::filesystem::path path(p);
  if (std::filesystem::exists(path) || path.is_absolute()) return path;
  if (const char* root = std::getenv("NERMRC_DATA_DIR")) {
    const auto alt = std::filesystem::path(root) / path;
    if (std::filesystem::exists(alt)) return alt;
  }
  return path;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

double score(const Model& model, std::span<const TaggedSentence> sentences) {
  if (sentences.empty()) return 0.0;
  std::vector<TagSequence> gold, pred;
  gold.reserve(sentences.size());
  pred.reserve(sentences.size());
  for (const auto& s : sentences) {
    gold.push_back(s.tags());
    pred.push_back(model.predict_tags(s));
  }
  return micro_f1(gold, pred, /*repair=*/true).f1;
}

}  // namespace

Dataset load_dataset(const DataConfig& config) {
  Dataset d;
  if (config.synthetic) {
    auto corpus = generate_synthetic(*config.synthetic);
    d.train = std::move(corpus.train);
    d.dev = std::move(corpus.dev);
    d.test = std::move(corpus.test);
    d.catalog = config.catalog.empty()
                    ? synthetic_catalog(config.synthetic_source.value_or(SourceKind::kAnnotationGuidelines))
                    : EntityCatalog::load(resolve_data_path(config.catalog));
    return d;
  }
  if (config.corpus.empty()) throw Error("no corpus configured (set data.corpus or data.synthetic)");
  if (config.catalog.empty()) throw Error("no catalog configured (set data.catalog)");
  ParseOptions opts;
  opts.repair_iob = config.repair_iob;
  for (auto& split : load_corpus(resolve_data_path(config.corpus), opts)) {
    if (split.name == "train") d.train = std::move(split.sentences);
    else if (split.name == "dev") d.dev = std::move(split.sentences);
    else if (split.name == "test") d.test = std::move(split.sentences);
  }
  d.catalog = EntityCatalog::load(resolve_data_path(config.catalog));
  return d;
}

// Training -------------------------------------------------------------------

TrainResult train(const TrainConfig& config, const Dataset& data, const TrainOptions& options) {
  config.validate();
  if (data.train.empty()) throw Error("training split is empty");
  for (const auto& msg : catalog_coverage(data.train, data.catalog)) throw CatalogError(msg);

  std::vector<McTriplet> vocab_source;
  if (config.model.variant == Variant::kVanilla) {
    for (const auto& s : data.train) vocab_source.push_back({s.surfaces(), {}, {}, std::nullopt, 0});
  } else {
    vocab_source = reconstruct_all(data.train, data.catalog);
  }
  Model model = Model::create(config.model, Vocabulary::build(vocab_source), data.catalog, config.seed);

  std::vector<Example> examples;
  examples.reserve(data.train.size());
  for (const auto& s : data.train) examples.push_back(model.prepare(s));

  const std::size_t n = examples.size();
  const auto bs = static_cast<std::size_t>(config.batch_size);
  const std::size_t steps_per_epoch = (n + bs - 1) / bs;
  const LinearWarmupSchedule schedule(config.learning_rate,
                                      steps_per_epoch * static_cast<std::size_t>(config.epochs),
                                      config.warmup_fraction);
  AdamW optimizer(config.optimizer);
  const auto params = model.parameters();
  Rng order_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);

  if (options.out_dir) std::filesystem::create_directories(*options.out_dir);
  const nlohmann::json config_json = config.to_json();

  RunRecord record;
  record.variant = std::string(to_string(config.model.variant));
  record.config = config_json;
  record.best_dev_f1 = -1.0;
  std::vector<Matrix> best_values;
  int since_best = 0;
  std::size_t step = 0;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    order_rng.shuffle(order);
    double loss_sum = 0.0;
    double lr = 0.0;
    for (std::size_t b = 0; b < n; b += bs) {
      const std::size_t end = std::min(n, b + bs);
      for (Parameter* p : params) p->zero_grad();
      for (std::size_t j = b; j < end; ++j) {
        const std::size_t idx = order[j];
        Tape tape;
        const Var loss = model.loss(tape, examples[idx]);
        const double value = loss.scalar();
        if (!std::isfinite(value)) {
          if (options.out_dir) {
            nlohmann::json diag;
            diag["epoch"] = epoch;
            diag["step"] = step;
            diag["sentence"] = idx;
            diag["loss"] = std::to_string(value);
            nlohmann::json norms;
            for (const Parameter* p : params) norms[p->name] = std::to_string(p->value.norm());
            diag["parameter_norms"] = norms;
            write_text(*options.out_dir / "diagnostics.json", diag.dump(2));
          }
          throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", step " +
                             std::to_string(step) + ", training sentence " + std::to_string(idx));
        }
        loss_sum += value;
        tape.backward(scale(loss, 1.0 / static_cast<double>(end - b)));
        tape.accumulate_grads(params);
      }
      lr = schedule.at(step);
      optimizer.step(params, lr);
      ++step;
    }

    EpochRecord er;
    er.epoch = epoch;
    er.train_loss = loss_sum / static_cast<double>(n);
    er.dev_f1 = score(model, data.dev);
    er.last_lr = lr;
    er.steps = step;
    er.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    record.epochs.push_back(er);
    if (options.on_epoch) options.on_epoch(er);

    const bool improved = data.dev.empty() || er.dev_f1 > record.best_dev_f1;
    if (options.out_dir) save_checkpoint(model, *options.out_dir / "last.ckpt", config_json);
    if (improved) {
      record.best_dev_f1 = er.dev_f1;
      record.best_epoch = epoch;
      best_values.clear();
      for (const Parameter* p : params) best_values.push_back(p->value);
      if (options.out_dir) save_checkpoint(model, *options.out_dir / "best.ckpt", config_json);
      since_best = 0;
    } else if (config.early_stopping_patience > 0 &&
               ++since_best >= config.early_stopping_patience) {
      record.early_stopped = true;
      break;
    }
  }

  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best_values[i];
  for (Parameter* p : params) p->grad.resize(0, 0);
  record.final_test_f1 = score(model, data.test);

  if (options.out_dir) {
    write_text(*options.out_dir / "run_record.jsonl", record.to_jsonl());
    write_text(*options.out_dir / "timings.jsonl", record.timings_jsonl());
    write_text(*options.out_dir / "run_summary.json", record.summary().dump(2) + "\n");
  }
  return {std::move(model), std::move(record)};
}

std::vector<RunRecord> run_ablation(const TrainConfig& base, std::span<const Variant> variants,
                                    const Dataset& data, const TrainOptions& options) {
  std::vector<RunRecord> out;
  for (Variant v : variants) {
    TrainConfig c = base;
    c.model.variant = v;
    TrainOptions o = options;
    if (options.out_dir) o.out_dir = *options.out_dir / std::string(to_string(v));
    out.push_back(train(c, data, o).record);
  }
  return out;
}

std::string format_ablation_table(std::span<const RunRecord> records) {
  std::ostringstream ss;
  ss << "variant              best_epoch  best_dev_f1  test_f1\n";
  for (const auto& r : records) {
    char line[128];
    std::snprintf(line, sizeof line, "%-20s %10d  %11.4f  %7.4f\n", r.variant.c_str(), r.best_epoch,
                  r.best_dev_f1, r.final_test_f1);
    ss << line;
  }
  return ss.str();
}

}  // namespace nermrc
