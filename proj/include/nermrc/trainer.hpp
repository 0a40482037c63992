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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "nermrc/model.hpp"
#include "nermrc/synthetic.hpp"

namespace nermrc {

/// Decoupled weight decay Adam. Decay skips single-row tensors (biases and
/// layer-norm scales).
struct OptimizerConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.01;
};

/// Where the training data comes from. Either `corpus` (a directory with
/// train/dev/test files) plus `catalog`, or `synthetic`.
struct DataConfig {
  std::string corpus;
  std::string catalog;
  std::optional<SyntheticConfig> synthetic;
  /// Overrides the synthetic catalog's option texts when set.
  std::optional<SourceKind> synthetic_source;
  bool repair_iob = false;
};

struct TrainConfig {
  double learning_rate = 8e-6;
  int epochs = 10;
  int batch_size = 2;
  double warmup_fraction = 0.1;
  std::uint64_t seed = 42;
  /// 0 disables early stopping on dev F1.
  int early_stopping_patience = 0;
  ModelConfig model;  // model.variant is the ablation setting
  OptimizerConfig optimizer;
  DataConfig data;

  /// Throws Error on out-of-range values.
  void validate() const;
  nlohmann::json to_json() const;
  /// Keys absent from `j` keep the values already in `base`.
  static TrainConfig from_json(const nlohmann::json& j, TrainConfig base);
  static TrainConfig from_json(const nlohmann::json& j);
};

/// Linear warmup from 0 to the peak, then linear decay to 0 at `total_steps`.
class LinearWarmupSchedule {
 public:
  LinearWarmupSchedule(double peak, std::size_t total_steps, double warmup_fraction);
  double at(std::size_t step) const;
  std::size_t total_steps() const { return total_; }
  std::size_t warmup_steps() const { return warmup_; }

 private:
  double peak_;
  std::size_t total_;
  std::size_t warmup_;
};

class AdamW {
 public:
  explicit AdamW(OptimizerConfig config) : config_(config) {}
  /// Applies one update from each parameter's `grad`, then leaves it alone.
  void step(std::span<Parameter* const> params, double lr);
  std::size_t steps() const { return t_; }

 private:
  OptimizerConfig config_;
  std::vector<Matrix> m_, v_;
  std::size_t t_ = 0;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;  // mean per-sentence loss
  double dev_f1 = 0.0;
  double last_lr = 0.0;
  std::size_t steps = 0;  // optimizer steps so far
  double wall_seconds = 0.0;
};

struct RunRecord {
  std::string variant;
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_dev_f1 = 0.0;
  double final_test_f1 = 0.0;  // best-dev parameters on the test split
  bool early_stopped = false;
  nlohmann::json config;

  /// One JSON object per epoch. Wall time is left out so equal runs give
  /// equal bytes; see timings_jsonl().
  std::string to_jsonl() const;
  std::string timings_jsonl() const;
  nlohmann::json summary() const;
};

struct Dataset {
  EntityCatalog catalog;
  std::vector<TaggedSentence> train, dev, test;
};

/// Resolves `config.data`. Relative corpus paths that do not exist are also
/// tried under $NERMRC_DATA_DIR.
Dataset load_dataset(const DataConfig& config);

struct TrainOptions {
  /// Checkpoints and run records go here when set.
  std::optional<std::filesystem::path> out_dir;
  std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainResult {
  Model model;  // best-dev parameters
  RunRecord record;
};

/// Throws NumericError on a non-finite loss, after writing diagnostics.json
/// into the output directory when there is one.
TrainResult train(const TrainConfig& config, const Dataset& data, const TrainOptions& options = {});

/// One run per variant on the same data; each variant gets its own
/// subdirectory under `options.out_dir`.
std::vector<RunRecord> run_ablation(const TrainConfig& base, std::span<const Variant> variants,
                                    const Dataset& data, const TrainOptions& options = {});

/// Plain-text comparison table.
std::string format_ablation_table(std::span<const RunRecord> records);

}  // namespace nermrc
