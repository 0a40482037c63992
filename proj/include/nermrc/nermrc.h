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

/* C interface to the nermrc library.
 *
 * Every function returns a nermrc_status. On failure the message of the most
 * recent error on the calling thread is available from nermrc_last_error().
 * Strings returned through `char**` are owned by the caller and released with
 * nermrc_string_free(). Handles are released with their matching _free().
 */
#ifndef NERMRC_NERMRC_H_
#define NERMRC_NERMRC_H_

#include <stddef.h>

#if defined(_WIN32)
#define NERMRC_API __declspec(dllexport)
#else
#define NERMRC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nermrc_status {
  NERMRC_OK = 0,
  NERMRC_E_INVALID_ARGUMENT = 1,
  NERMRC_E_IO = 2,
  NERMRC_E_PARSE = 3,
  NERMRC_E_CATALOG = 4,
  NERMRC_E_SHAPE = 5,
  NERMRC_E_TRUNCATION = 6,
  NERMRC_E_NUMERIC = 7,
  NERMRC_E_INTERNAL = 8
} nermrc_status;

typedef struct nermrc_corpus nermrc_corpus;
typedef struct nermrc_catalog nermrc_catalog;
typedef struct nermrc_model nermrc_model;

NERMRC_API const char* nermrc_version(void);
NERMRC_API const char* nermrc_status_name(nermrc_status status);
/* Message of the last failure on this thread; empty string if none. */
NERMRC_API const char* nermrc_last_error(void);
NERMRC_API void nermrc_string_free(char* s);
/* 0 silences library warnings, 1 (default) writes them to stderr. */
NERMRC_API void nermrc_set_verbosity(int level);

/* Corpora. `path` is a CoNLL file or a directory of train/dev/test files; all
 * splits are concatenated in that order. */
NERMRC_API nermrc_status nermrc_corpus_load(const char* path, int repair_iob,
                                            nermrc_corpus** out);
NERMRC_API nermrc_status nermrc_corpus_size(const nermrc_corpus* corpus, size_t* out);
/* Number of orphan I- tags seen while loading (repaired or not). */
NERMRC_API nermrc_status nermrc_corpus_iob_warnings(const nermrc_corpus* corpus, size_t* out);
NERMRC_API void nermrc_corpus_free(nermrc_corpus* corpus);

NERMRC_API nermrc_status nermrc_catalog_load(const char* path, nermrc_catalog** out);
NERMRC_API nermrc_status nermrc_catalog_size(const nermrc_catalog* catalog, size_t* out);
NERMRC_API void nermrc_catalog_free(nermrc_catalog* catalog);

/* Statistics JSON for a corpus path; `catalog_path` may be NULL. */
NERMRC_API nermrc_status nermrc_stats(const char* corpus_path, const char* catalog_path,
                                      int repair_iob, char** out_json);

/* Writes one JSON triplet per sentence (passage, question, options,
 * label_matrix) to `out_path`. */
NERMRC_API nermrc_status nermrc_reconstruct(const nermrc_corpus* corpus,
                                            const nermrc_catalog* catalog, const char* out_path);

/* Trains from an experiment config (JSON text). Checkpoints and run records
 * are written to `out_dir`; the run summary is returned as JSON. */
NERMRC_API nermrc_status nermrc_train(const char* config_json, const char* out_dir,
                                      char** out_summary_json);

/* Trains one run per comma-separated variant ("full,reconstruction_only,
 * vanilla") and returns a JSON array of run summaries. */
NERMRC_API nermrc_status nermrc_ablate(const char* config_json, const char* variants,
                                       const char* out_dir, char** out_json);

NERMRC_API nermrc_status nermrc_model_load(const char* checkpoint_path, nermrc_model** out);
/* Writes CoNLL predictions (token and predicted tag per line). Input lines may
 * carry one column (token only) or more (the last one is ignored). */
NERMRC_API nermrc_status nermrc_model_infer(const nermrc_model* model, const char* corpus_path,
                                            const char* out_path);
NERMRC_API void nermrc_model_free(nermrc_model* model);

/* Span-level micro F1 of two CoNLL files, as JSON. */
NERMRC_API nermrc_status nermrc_eval(const char* gold_path, const char* pred_path, int repair_iob,
                                     char** out_json);

/* Writes a seeded synthetic corpus (train/dev/test + catalog.json). */
NERMRC_API nermrc_status nermrc_synth(const char* out_dir, unsigned long long seed, size_t n_train,
                                      size_t n_dev, size_t n_test);

#ifdef __cplusplus
}
#endif

#endif /* NERMRC_NERMRC_H_ */
