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

// Command-line front end. Everything goes through the C API in nermrc.h.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "nermrc/nermrc.h"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

int report(nermrc_status status) {
  if (status == NERMRC_OK) return 0;
  std::cerr << "error (" << nermrc_status_name(status) << "): " << nermrc_last_error() << '\n';
  return status == NERMRC_E_IO || status == NERMRC_E_INVALID_ARGUMENT ? kExitUsage : kExitFailure;
}

int print_owned(nermrc_status status, char* text) {
  if (status != NERMRC_OK) return report(status);
  std::cout << text << '\n';
  nermrc_string_free(text);
  return 0;
}

struct TrainFlags {
  std::string config_path;
  std::string out_dir = "runs/latest";
  std::string corpus, catalog, ablation;
  double learning_rate = 0, warmup_fraction = -1;
  int epochs = 0, batch_size = 0, patience = -1;
  long long seed = -1;
  int d_model = 0, enc_layers = -1, enc_heads = 0, max_len = 0;
  int hrca_heads = 0, hrca_head_dim = 0, hrca_layers = 0;
  bool no_residual = false, repair_iob = false, truncate = false;
  long long synthetic_seed = -1;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f, bool with_out_dir) {
  cmd->add_option("--config", f.config_path, "Experiment config JSON (flags override it)")
      ->check(CLI::ExistingFile);
  if (with_out_dir) cmd->add_option("--out-dir", f.out_dir, "Directory for checkpoints and run records");
  cmd->add_option("--corpus", f.corpus, "Corpus directory with train/dev/test files");
  cmd->add_option("--catalog", f.catalog, "Option catalog JSON");
  cmd->add_option("--synthetic-seed", f.synthetic_seed, "Train on the built-in synthetic corpus with this seed");
  cmd->add_option("--lr", f.learning_rate, "Peak learning rate");
  cmd->add_option("--epochs", f.epochs, "Training epochs");
  cmd->add_option("--batch-size", f.batch_size, "Sentences per optimizer step");
  cmd->add_option("--warmup-fraction", f.warmup_fraction, "Fraction of steps spent warming up");
  cmd->add_option("--seed", f.seed, "Initialisation and shuffling seed");
  cmd->add_option("--patience", f.patience, "Early-stopping patience on dev F1 (0 disables)");
  cmd->add_option("--d-model", f.d_model, "Encoder width");
  cmd->add_option("--encoder-layers", f.enc_layers, "Encoder layers");
  cmd->add_option("--encoder-heads", f.enc_heads, "Encoder attention heads");
  cmd->add_option("--max-len", f.max_len, "Maximum encoded sequence length");
  cmd->add_option("--hrca-heads", f.hrca_heads, "Reasoning-layer attention heads");
  cmd->add_option("--hrca-head-dim", f.hrca_head_dim, "Reasoning-layer per-head width");
  cmd->add_option("--hrca-layers", f.hrca_layers, "Stacked reasoning layers");
  cmd->add_flag("--no-hrca-residual", f.no_residual, "Drop residual + layer norm around reasoning steps");
  cmd->add_option("--ablation", f.ablation, "full | reconstruction_only | vanilla")
      ->check(CLI::IsMember({"full", "reconstruction_only", "vanilla"}));
  cmd->add_flag("--repair-iob", f.repair_iob, "Rewrite orphan I-X tags to B-X when loading");
  cmd->add_flag("--truncate", f.truncate, "Shorten overlong option/question text instead of failing");
}

/// Config file values first, then any flag that was given.
std::string merged_config(const CLI::App* cmd, const TrainFlags& f) {
  nlohmann::json j = nlohmann::json::object();
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    j = nlohmann::json::parse(in);
  }
  auto given = [&](const char* name) { return cmd->count(name) > 0; };
  if (given("--corpus")) j["data"]["corpus"] = f.corpus;
  if (given("--catalog")) j["data"]["catalog"] = f.catalog;
  if (given("--synthetic-seed")) j["data"]["synthetic"]["seed"] = f.synthetic_seed;
  if (given("--repair-iob")) j["data"]["repair_iob"] = true;
  if (given("--lr")) j["learning_rate"] = f.learning_rate;
  if (given("--epochs")) j["epochs"] = f.epochs;
  if (given("--batch-size")) j["batch_size"] = f.batch_size;
  if (given("--warmup-fraction")) j["warmup_fraction"] = f.warmup_fraction;
  if (given("--seed")) j["seed"] = f.seed;
  if (given("--patience")) j["early_stopping_patience"] = f.patience;
  if (given("--d-model")) j["encoder"]["d_model"] = f.d_model;
  if (given("--encoder-layers")) j["encoder"]["n_layers"] = f.enc_layers;
  if (given("--encoder-heads")) j["encoder"]["n_heads"] = f.enc_heads;
  if (given("--max-len")) j["encoder"]["max_len"] = f.max_len;
  if (given("--truncate")) j["encoder"]["truncate"] = true;
  if (given("--hrca-heads")) j["hrca"]["n_heads"] = f.hrca_heads;
  if (given("--hrca-head-dim")) j["hrca"]["head_dim"] = f.hrca_head_dim;
  if (given("--hrca-layers")) j["hrca"]["n_layers"] = f.hrca_layers;
  if (given("--no-hrca-residual")) j["hrca"]["residual"] = false;
  if (given("--ablation")) j["ablation"] = f.ablation;
  return j.dump();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nermrc: named-entity recognition as multiple-choice reading comprehension"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", nermrc_version());
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Silence warnings");

  // stats
  auto* stats = app.add_subcommand("stats", "Print corpus statistics as JSON");
  std::string stats_corpus, stats_catalog;
  bool stats_repair = false;
  stats->add_option("--corpus", stats_corpus, "Corpus file or directory")->required();
  stats->add_option("--catalog", stats_catalog, "Option catalog JSON (for type count and option length)");
  stats->add_flag("--repair-iob", stats_repair, "Rewrite orphan I-X tags to B-X");

  // reconstruct
  auto* rec = app.add_subcommand("reconstruct", "Write multiple-choice triplets as JSON lines");
  std::string rec_corpus, rec_catalog, rec_out;
  bool rec_repair = false;
  rec->add_option("--corpus", rec_corpus, "Corpus file or directory")->required();
  rec->add_option("--catalog", rec_catalog, "Option catalog JSON")->required();
  rec->add_option("--out", rec_out, "Output JSON-lines path")->required();
  rec->add_flag("--repair-iob", rec_repair, "Rewrite orphan I-X tags to B-X");

  // train
  auto* train = app.add_subcommand("train", "Train a model; writes checkpoints and run records");
  TrainFlags train_flags;
  add_train_flags(train, train_flags, true);

  // infer
  auto* inf = app.add_subcommand("infer", "Tag a corpus with a trained checkpoint (CoNLL output)");
  std::string inf_ckpt, inf_corpus, inf_out;
  inf->add_option("--checkpoint", inf_ckpt, "Checkpoint file")->required();
  inf->add_option("--corpus", inf_corpus, "Corpus file or directory")->required();
  inf->add_option("--out", inf_out, "Output CoNLL path")->required();

  // eval
  auto* ev = app.add_subcommand("eval", "Span-level micro F1 of predictions against gold, as JSON");
  std::string ev_gold, ev_pred;
  bool ev_repair = false;
  ev->add_option("--gold", ev_gold, "Gold CoNLL file")->required();
  ev->add_option("--pred", ev_pred, "Predicted CoNLL file")->required();
  ev->add_flag("--repair-iob", ev_repair, "Read orphan I-X as the start of a span");

  // ablate
  auto* abl = app.add_subcommand("ablate", "Train several variants on the same data and compare");
  TrainFlags abl_flags;
  abl_flags.out_dir = "runs/ablation";
  add_train_flags(abl, abl_flags, true);
  std::string variants = "full,reconstruction_only,vanilla";
  abl->add_option("--variants", variants, "Comma-separated variants");

  // synth
  auto* syn = app.add_subcommand("synth", "Write the seeded synthetic corpus and its catalog");
  std::string syn_out;
  unsigned long long syn_seed = 7;
  std::size_t syn_train = 50, syn_dev = 25, syn_test = 25;
  syn->add_option("--out-dir", syn_out, "Output directory")->required();
  syn->add_option("--seed", syn_seed, "Generator seed");
  syn->add_option("--train", syn_train, "Training sentences");
  syn->add_option("--dev", syn_dev, "Development sentences");
  syn->add_option("--test", syn_test, "Test sentences");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }
  nermrc_set_verbosity(quiet ? 0 : 1);

  if (*stats) {
    char* json = nullptr;
    const auto st = nermrc_stats(stats_corpus.c_str(), stats_catalog.empty() ? nullptr : stats_catalog.c_str(),
                                 stats_repair, &json);
    return print_owned(st, json);
  }
  if (*rec) {
    nermrc_corpus* corpus = nullptr;
    nermrc_catalog* catalog = nullptr;
    auto st = nermrc_corpus_load(rec_corpus.c_str(), rec_repair, &corpus);
    if (st == NERMRC_OK) st = nermrc_catalog_load(rec_catalog.c_str(), &catalog);
    if (st == NERMRC_OK) st = nermrc_reconstruct(corpus, catalog, rec_out.c_str());
    nermrc_corpus_free(corpus);
    nermrc_catalog_free(catalog);
    return report(st);
  }
  if (*train || *abl) {
    std::string config;
    try {
      config = merged_config(*train ? train : abl, *train ? train_flags : abl_flags);
    } catch (const std::exception& e) {
      std::cerr << "error: cannot read config: " << e.what() << '\n';
      return kExitUsage;
    }
    char* json = nullptr;
    const auto st = *train ? nermrc_train(config.c_str(), train_flags.out_dir.c_str(), &json)
                           : nermrc_ablate(config.c_str(), variants.c_str(), abl_flags.out_dir.c_str(), &json);
    return print_owned(st, json);
  }
  if (*inf) {
    nermrc_model* model = nullptr;
    auto st = nermrc_model_load(inf_ckpt.c_str(), &model);
    if (st == NERMRC_OK) st = nermrc_model_infer(model, inf_corpus.c_str(), inf_out.c_str());
    nermrc_model_free(model);
    return report(st);
  }
  if (*ev) {
    char* json = nullptr;
    const auto st = nermrc_eval(ev_gold.c_str(), ev_pred.c_str(), ev_repair, &json);
    return print_owned(st, json);
  }
  if (*syn) return report(nermrc_synth(syn_out.c_str(), syn_seed, syn_train, syn_dev, syn_test));
  return kExitUsage;
}
