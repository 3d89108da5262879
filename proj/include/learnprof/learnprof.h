/*
 * Copyright 2026 The Learnprof Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * learnprof C API.
 *
 * Conventions:
 *  - Every fallible call returns lp_status. On failure, lp_last_error()
 *    describes the problem for the calling thread until its next call.
 *  - Strings returned through char** are NUL-terminated, owned by the
 *    caller and released with lp_string_free().
 *  - Handles are opaque and released with their *_free function; passing
 *    NULL to a *_free function is a no-op.
 *  - Structured inputs and outputs are UTF-8 JSON text.
 */

#ifndef LEARNPROF_LEARNPROF_H
#define LEARNPROF_LEARNPROF_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define LP_API __declspec(dllexport)
#else
#define LP_API __attribute__((visibility("default")))
#endif

typedef enum lp_status {
  LP_OK = 0,
  LP_ERR_INVALID_ARGUMENT = 1,
  LP_ERR_PARSE = 2,
  LP_ERR_VALIDATION = 3,
  LP_ERR_NOT_FOUND = 4,
  LP_ERR_IO = 5,
  LP_ERR_INSUFFICIENT_DATA = 6,
  LP_ERR_NUMERICAL = 7,
  LP_ERR_UNAVAILABLE = 8,
  LP_ERR_INTERNAL = 9
} lp_status;

LP_API const char* lp_version(void);
LP_API const char* lp_status_name(lp_status status);
LP_API const char* lp_last_error(void);
LP_API void lp_string_free(char* s);

/* Parses TOML text into the equivalent JSON document. */
LP_API lp_status lp_toml_to_json(const char* toml, char** out_json);

/* ---- Quizzes ---------------------------------------------------------- */

typedef struct lp_quiz lp_quiz;

LP_API lp_status lp_quiz_parse(const char* toml, const char* name, lp_quiz** out);
LP_API void lp_quiz_free(lp_quiz* quiz);
LP_API lp_status lp_quiz_to_json(const lp_quiz* quiz, char** out_json);
LP_API lp_status lp_quiz_to_toml(const lp_quiz* quiz, char** out_toml);
/* Grades one submission (wire form) against a question of the quiz. */
LP_API lp_status lp_quiz_grade(const lp_quiz* quiz, const char* question_id,
                               const char* submission_json, int* out_score,
                               char** out_normalized);

/* Validates quiz files. `paths_json` is an array of file paths;
 * `oracle_command` (nullable) is a shell command that reads a program on
 * stdin and prints {"compiles": bool, "stdout": string}. Writes an array of
 * reports and sets *out_has_errors. */
LP_API lp_status lp_validate_files(const char* paths_json, const char* oracle_command,
                                   char** out_reports_json, int* out_has_errors);

/* ---- Book ------------------------------------------------------------- */

/* config: {"bookRoot", "quizDir", "outputDir", "commitHash"?, "oracleCommand"?}.
 * Result: {"ok", "errors": [...], "reports": [...], "manifest": {...}}. */
LP_API lp_status lp_book_build(const char* config_json, char** out_result_json, int* out_ok);

/* Replaces quiz directives in one chapter. `quizzes_json` maps each
 * directive path to {"name", ...quiz JSON}. */
LP_API lp_status lp_book_expand_chapter(const char* chapter, const char* chapter_path,
                                        const char* quizzes_json, const char* commit_hash,
                                        char** out_text);

/* ---- Telemetry -------------------------------------------------------- */

typedef struct lp_store lp_store;
typedef struct lp_service lp_service;
typedef struct lp_server lp_server;

/* `path` NULL gives an in-memory store. */
LP_API lp_status lp_store_open(const char* path, lp_store** out);
LP_API void lp_store_free(lp_store* store);
LP_API size_t lp_store_size(const lp_store* store);
/* filter: {"kind"?, "fromMs"?, "toMs"?}; NULL exports everything. */
LP_API lp_status lp_store_export(const lp_store* store, const char* filter_json,
                                 char** out_ndjson);

/* `manifests_json` (nullable) is an array of book manifests whose questions
 * count as known. The store must outlive the service. */
LP_API lp_status lp_service_create(lp_store* store, const char* export_token,
                                   const char* manifests_json, lp_service** out);
LP_API void lp_service_free(lp_service* service);
LP_API lp_status lp_service_post_answers(lp_service* service, const char* body,
                                         int* out_http_status, char** out_response);
LP_API lp_status lp_service_post_bug_report(lp_service* service, const char* body,
                                            int* out_http_status, char** out_response);
/* Nullable arguments are treated as absent. */
LP_API lp_status lp_service_export(const lp_service* service, const char* authorization,
                                   const char* kind, const char* from, const char* to,
                                   int* out_http_status, char** out_body);

/* Serves the service over HTTP on a background thread. Port 0 picks a free
 * port, reported through out_port. The service must outlive the server. */
LP_API lp_status lp_server_start(lp_service* service, const char* host, int port,
                                 lp_server** out, int* out_port);
/* Stops serving and releases the server. */
LP_API void lp_server_free(lp_server* server);

/* GET {base_url}/api/export{query} with a bearer token. */
LP_API lp_status lp_fetch_export(const char* base_url, const char* token, const char* query,
                                 int* out_http_status, char** out_body);

/* ---- Responses -------------------------------------------------------- */

typedef struct lp_dataset lp_dataset;

/* Loads an event export, regrading against the given manifests (a JSON
 * array; the first is the current book). Writes load statistics. */
LP_API lp_status lp_dataset_load(const char* export_ndjson, size_t length,
                                 const char* manifests_json, lp_dataset** out,
                                 char** out_stats_json);
/* Reads the canonical response NDJSON written by lp_dataset_to_ndjson. */
LP_API lp_status lp_dataset_from_ndjson(const char* ndjson, size_t length, lp_dataset** out);
LP_API void lp_dataset_free(lp_dataset* dataset);
LP_API size_t lp_dataset_record_count(const lp_dataset* dataset);
LP_API size_t lp_dataset_reader_count(const lp_dataset* dataset);
LP_API lp_status lp_dataset_to_ndjson(const lp_dataset* dataset, char** out_ndjson);
LP_API lp_status lp_dataset_first_attempts(const lp_dataset* dataset, lp_dataset** out);
/* Keeps the triers of the given set. */
LP_API lp_status lp_dataset_triers(const lp_dataset* dataset, lp_dataset** out);
/* Reader counts, trier threshold and load statistics. */
LP_API lp_status lp_dataset_summary(const lp_dataset* dataset, char** out_json);
/* Last-chapter histograms for all readers, triers and dabblers. */
LP_API lp_status lp_dataset_dropoff(const lp_dataset* dataset, char** out_json);

/* ---- Analyses --------------------------------------------------------- */

/* options: {"itemRest"?: bool, "maxSubsetK"?: int, "threads"?: int} */
LP_API lp_status lp_ctt_analyze(const lp_dataset* dataset, const char* options_json,
                                char** out_json);
/* options: {"epochs"?, "stepSize"?, "seed"?, "threads"?, "iccTables"?: bool} */
LP_API lp_status lp_irt_fit(const lp_dataset* dataset, const char* options_json,
                            char** out_json);

/* `interventions` is TOML or JSON text; options: {"pooled"?: bool, "alpha"?}.
 * Writes JSON reports and a text table (either out pointer may be NULL). */
LP_API lp_status lp_interventions_evaluate(const lp_dataset* dataset, const char* interventions,
                                           const char* options_json, char** out_json,
                                           char** out_table);
/* Same, from summaries: [{"name", "beforeMean", "nBefore", "afterMean",
 * "nAfter"}] treated as 0/1 samples. */
LP_API lp_status lp_interventions_from_summaries(const char* rows_json, const char* options_json,
                                                 char** out_json, char** out_table);
/* Benjamini-Hochberg adjustment of n values, written to `out`. */
LP_API lp_status lp_bh_adjust(const double* p_values, size_t n, double* out);

typedef struct lp_power_result {
  double n_continuous;
  int64_t n_per_group;
  int64_t n_total;
} lp_power_result;

LP_API lp_status lp_power_required(double effect_size, double alpha, double power,
                                   lp_power_result* out);
LP_API lp_status lp_simulated_power(double effect_size, int64_t n_per_group, double alpha,
                                    int trials, uint64_t seed, double* out_power);

/* config: {"ks"?: [int], "iterations"?, "seed"?, "maxResampleAttempts"?,
 * "threads"?, "chapters"?: [int]}. The dataset is the reader population. */
LP_API lp_status lp_simulate(const lp_dataset* dataset, const char* metric,
                             const char* config_json, char** out_csv, char** out_json);

/* Dashboard bundle. `extras_json` (nullable) may carry "irt",
 * "interventions", "generatedAt" and "maxSubsetK". */
LP_API lp_status lp_stats_bundle(const lp_dataset* dataset, const char* extras_json,
                                 char** out_json);

/* ---- Synthetic data --------------------------------------------------- */

/* config: {"items"?, "readers"?, "seed"?, "itemsPerChapter"?, "dropout"?,
 * "retryRate"?}. Writes the fixture book, truth.json and export.ndjson under
 * `dir` and returns a short summary. */
LP_API lp_status lp_synth_write(const char* config_json, const char* dir, char** out_summary);

#ifdef __cplusplus
}
#endif

#endif /* LEARNPROF_LEARNPROF_H */
