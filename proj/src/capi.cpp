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

#include "nermrc/nermrc.h"

#include <atomic>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "json.hpp"

#include "nermrc/corpus_io.hpp"
#include "nermrc/error.hpp"
#include "nermrc/log.hpp"
#include "nermrc/metrics.hpp"
#include "nermrc/model.hpp"
#include "nermrc/reconstruction.hpp"
#include "nermrc/synthetic.hpp"
#include "nermrc/trainer.hpp"

struct nermrc_corpus {
  std::vector<nermrc::TaggedSentence> sentences;
  std::size_t iob_warnings = 0;
};

struct nermrc_catalog {
  nermrc::EntityCatalog catalog;
};

struct nermrc_model {
  nermrc::Model model;
};

namespace {

thread_local std::string g_last_error;

nermrc_status fail(nermrc_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <class F>
nermrc_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return NERMRC_OK;
  } catch (const nermrc::ParseError& e) {
    return fail(NERMRC_E_PARSE, e.what());
  } catch (const nermrc::CatalogError& e) {
    return fail(NERMRC_E_CATALOG, e.what());
  } catch (const nermrc::TruncationError& e) {
    return fail(NERMRC_E_TRUNCATION, e.what());
  } catch (const nermrc::ShapeError& e) {
    return fail(NERMRC_E_SHAPE, e.what());
  } catch (const nermrc::NumericError& e) {
    return fail(NERMRC_E_NUMERIC, e.what());
  } catch (const nermrc::IoError& e) {
    return fail(NERMRC_E_IO, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(NERMRC_E_IO, e.what());
  } catch (const nermrc::Error& e) {
    return fail(NERMRC_E_INVALID_ARGUMENT, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(NERMRC_E_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(NERMRC_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(NERMRC_E_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void log_iob_warnings(const std::vector<nermrc::IobWarning>& warnings, bool repaired) {
  for (const auto& w : warnings)
    nermrc::log_warning("line " + std::to_string(w.line) + ": orphan " + w.tag +
                        (repaired ? " repaired" : " (use --repair-iob to rewrite)"));
}

void require(bool ok, const char* what) {
  if (!ok) throw nermrc::Error(what);
}

std::vector<nermrc::TaggedSentence> load_all(const char* path, const nermrc::ParseOptions& opts) {
  std::vector<nermrc::TaggedSentence> out;
  for (auto& split : nermrc::load_corpus(path, opts))
    out.insert(out.end(), std::make_move_iterator(split.sentences.begin()),
               std::make_move_iterator(split.sentences.end()));
  return out;
}

std::vector<nermrc::Variant> parse_variants(const std::string& text) {
  std::vector<nermrc::Variant> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto v = nermrc::parse_variant(item);
    if (!v) throw nermrc::Error("unknown variant '" + item + "'");
    out.push_back(*v);
  }
  if (out.empty()) throw nermrc::Error("no variants requested");
  return out;
}

nermrc::TrainConfig parse_config(const char* config_json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(config_json);
  } catch (const nlohmann::json::exception& e) {
    throw nermrc::ParseError(std::string("experiment config is not valid JSON: ") + e.what(), 0);
  }
  return nermrc::TrainConfig::from_json(j);
}

}  // namespace

extern "C" {

const char* nermrc_version(void) { return "0.1.0"; }

const char* nermrc_status_name(nermrc_status status) {
  switch (status) {
    case NERMRC_OK: return "ok";
    case NERMRC_E_INVALID_ARGUMENT: return "invalid argument";
    case NERMRC_E_IO: return "i/o error";
    case NERMRC_E_PARSE: return "parse error";
    case NERMRC_E_CATALOG: return "catalog error";
    case NERMRC_E_SHAPE: return "shape error";
    case NERMRC_E_TRUNCATION: return "truncation error";
    case NERMRC_E_NUMERIC: return "numeric error";
    case NERMRC_E_INTERNAL: return "internal error";
  }
  return "unknown";
}

const char* nermrc_last_error(void) { return g_last_error.c_str(); }

void nermrc_string_free(char* s) { delete[] s; }

void nermrc_set_verbosity(int level) {
  if (level <= 0) nermrc::set_log_sink(nullptr);
  else
    nermrc::set_log_sink([](std::string_view msg) {
      std::fprintf(stderr, "warning: %.*s\n", static_cast<int>(msg.size()), msg.data());
    });
}

nermrc_status nermrc_corpus_load(const char* path, int repair_iob, nermrc_corpus** out) {
  return guarded([&] {
    require(path && out, "nermrc_corpus_load: null argument");
    std::vector<nermrc::IobWarning> warnings;
    nermrc::ParseOptions opts;
    opts.repair_iob = repair_iob != 0;
    opts.warnings = &warnings;
    auto c = std::make_unique<nermrc_corpus>();
    c->sentences = load_all(path, opts);
    c->iob_warnings = warnings.size();
    log_iob_warnings(warnings, repair_iob != 0);
    *out = c.release();
  });
}

nermrc_status nermrc_corpus_size(const nermrc_corpus* corpus, size_t* out) {
  return guarded([&] {
    require(corpus && out, "nermrc_corpus_size: null argument");
    *out = corpus->sentences.size();
  });
}

nermrc_status nermrc_corpus_iob_warnings(const nermrc_corpus* corpus, size_t* out) {
  return guarded([&] {
    require(corpus && out, "nermrc_corpus_iob_warnings: null argument");
    *out = corpus->iob_warnings;
  });
}

void nermrc_corpus_free(nermrc_corpus* corpus) { delete corpus; }

nermrc_status nermrc_catalog_load(const char* path, nermrc_catalog** out) {
  return guarded([&] {
    require(path && out, "nermrc_catalog_load: null argument");
    *out = new nermrc_catalog{nermrc::EntityCatalog::load(path)};
  });
}

nermrc_status nermrc_catalog_size(const nermrc_catalog* catalog, size_t* out) {
  return guarded([&] {
    require(catalog && out, "nermrc_catalog_size: null argument");
    *out = catalog->catalog.size();
  });
}

void nermrc_catalog_free(nermrc_catalog* catalog) { delete catalog; }

nermrc_status nermrc_stats(const char* corpus_path, const char* catalog_path, int repair_iob,
                           char** out_json) {
  return guarded([&] {
    require(corpus_path && out_json, "nermrc_stats: null argument");
    std::vector<nermrc::IobWarning> warnings;
    nermrc::ParseOptions opts;
    opts.repair_iob = repair_iob != 0;
    opts.warnings = &warnings;
    const auto splits = nermrc::load_corpus(corpus_path, opts);
    log_iob_warnings(warnings, repair_iob != 0);
    std::optional<nermrc::EntityCatalog> catalog;
    if (catalog_path && *catalog_path) {
      catalog = nermrc::EntityCatalog::load(catalog_path);
      for (const auto& split : splits)
        for (const auto& msg : nermrc::catalog_coverage(split.sentences, *catalog))
          nermrc::log_warning(split.name + ": " + msg);
    }
    const auto stats = nermrc::compute_stats(splits, catalog ? &*catalog : nullptr);
    *out_json = dup_string(stats.to_json());
  });
}

nermrc_status nermrc_reconstruct(const nermrc_corpus* corpus, const nermrc_catalog* catalog,
                                 const char* out_path) {
  return guarded([&] {
    require(corpus && catalog && out_path, "nermrc_reconstruct: null argument");
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw nermrc::IoError(std::string("cannot write ") + out_path);
    for (std::size_t i = 0; i < corpus->sentences.size(); ++i) {
      auto t = nermrc::reconstruct(corpus->sentences[i], catalog->catalog);
      t.origin = i;
      out << t.to_json() << '\n';
    }
  });
}

nermrc_status nermrc_train(const char* config_json, const char* out_dir, char** out_summary_json) {
  return guarded([&] {
    require(config_json && out_dir, "nermrc_train: null argument");
    const auto config = parse_config(config_json);
    const auto data = nermrc::load_dataset(config.data);
    nermrc::TrainOptions opts;
    opts.out_dir = out_dir;
    const auto result = nermrc::train(config, data, opts);
    if (out_summary_json) *out_summary_json = dup_string(result.record.summary().dump(2));
  });
}

nermrc_status nermrc_ablate(const char* config_json, const char* variants, const char* out_dir,
                            char** out_json) {
  return guarded([&] {
    require(config_json && variants, "nermrc_ablate: null argument");
    const auto config = parse_config(config_json);
    const auto data = nermrc::load_dataset(config.data);
    nermrc::TrainOptions opts;
    if (out_dir && *out_dir) opts.out_dir = out_dir;
    const auto list = parse_variants(variants);
    const auto records = nermrc::run_ablation(config, list, data, opts);
    if (out_json) {
      auto arr = nlohmann::json::array();
      for (const auto& r : records) arr.push_back(r.summary());
      nlohmann::json j;
      j["runs"] = arr;
      j["table"] = nermrc::format_ablation_table(records);
      *out_json = dup_string(j.dump(2));
    }
  });
}

nermrc_status nermrc_model_load(const char* checkpoint_path, nermrc_model** out) {
  return guarded([&] {
    require(checkpoint_path && out, "nermrc_model_load: null argument");
    *out = new nermrc_model{nermrc::load_checkpoint(checkpoint_path)};
  });
}

nermrc_status nermrc_model_infer(const nermrc_model* model, const char* corpus_path,
                                 const char* out_path) {
  return guarded([&] {
    require(model && corpus_path && out_path, "nermrc_model_infer: null argument");
    nermrc::ParseOptions opts;
    opts.allow_untagged = true;
    const auto sentences = load_all(corpus_path, opts);
    const auto predicted = nermrc::infer(model->model, sentences);
    nermrc::write_conll(out_path, predicted);
  });
}

void nermrc_model_free(nermrc_model* model) { delete model; }

nermrc_status nermrc_eval(const char* gold_path, const char* pred_path, int repair_iob,
                          char** out_json) {
  return guarded([&] {
    require(gold_path && pred_path && out_json, "nermrc_eval: null argument");
    nermrc::ParseOptions opts;
    const auto gold = load_all(gold_path, opts);
    const auto pred = load_all(pred_path, opts);
    if (gold.size() != pred.size())
      throw nermrc::ParseError("gold has " + std::to_string(gold.size()) +
                                   " sentences but prediction has " + std::to_string(pred.size()),
                               0);
    std::vector<nermrc::TagSequence> g, p;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (gold[i].surfaces() != pred[i].surfaces())
        throw nermrc::ParseError("sentence " + std::to_string(i + 1) +
                                     " differs between gold and prediction",
                                 pred[i].source_line);
      g.push_back(gold[i].tags());
      p.push_back(pred[i].tags());
    }
    *out_json = dup_string(nermrc::micro_f1(g, p, repair_iob != 0).to_json());
  });
}

nermrc_status nermrc_synth(const char* out_dir, unsigned long long seed, size_t n_train,
                           size_t n_dev, size_t n_test) {
  return guarded([&] {
    require(out_dir != nullptr, "nermrc_synth: null argument");
    nermrc::write_synthetic(out_dir, {seed, n_train, n_dev, n_test});
  });
}

}  // extern "C"
