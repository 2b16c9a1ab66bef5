/* zreval.h
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

/* C interface to the zreval evaluation library.
 *
 * All entry points return zr_status; anything but ZR_OK leaves a
 * human-readable message in zr_last_error() (thread local, valid until the
 * next failing call on the same thread). Objects are opaque handles created
 * and destroyed through these functions; strings returned through char**
 * outputs are released with zr_string_free().
 */

#ifndef ZREVAL_H_
#define ZREVAL_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum zr_status {
  ZR_OK = 0,
  ZR_ERR_INVALID = 1,    /* bad argument or inconsistent configuration */
  ZR_ERR_IO = 2,         /* unreadable or unwritable path */
  ZR_ERR_PARSE = 3,      /* malformed input file */
  ZR_ERR_VALIDATION = 4, /* well-formed input violating an invariant */
  ZR_ERR_INTERNAL = 5
} zr_status;

typedef enum zr_metric { ZR_METRIC_COSINE = 0, ZR_METRIC_KL = 1 } zr_metric;

typedef enum zr_mode {
  ZR_MODE_WITHIN = 1,
  ZR_MODE_ACROSS = 2,
  ZR_MODE_BOTH = 3
} zr_mode;

typedef struct zr_alignment zr_alignment;
typedef struct zr_features zr_features;
typedef struct zr_classes zr_classes;
typedef struct zr_report zr_report;

const char* zr_version(void);
const char* zr_last_error(void);
void zr_string_free(char* s);

/* ---- gold alignment ---- */

zr_status zr_alignment_load(const char* phone_path, const char* word_path,
                            zr_alignment** out);
size_t zr_alignment_utterance_count(const zr_alignment* a);
void zr_alignment_free(zr_alignment* a);

/* ---- submissions ---- */

zr_status zr_features_load(const char* dir, int require_posteriorgram,
                           zr_features** out);
size_t zr_features_dimension(const zr_features* f);
void zr_features_free(zr_features* f);

zr_status zr_classes_load(const char* path, const zr_alignment* alignment,
                          zr_classes** out);
size_t zr_classes_count(const zr_classes* c);
void zr_classes_free(zr_classes* c);

/* ---- track 1: ABX ---- */

typedef struct zr_track1_options {
  zr_metric metric;
  zr_mode mode;
  double min_duration;   /* drop items with shorter center phones */
  uint64_t seed;         /* drives cell subsampling only */
  size_t triplet_cap;    /* exhaustive scoring up to this many triplets */
  int workers;           /* 0: ZREVAL_WORKERS or hardware concurrency */
  const char* language;  /* label used in the report; NULL = "default" */
  const char* manifest_path; /* duration-subset manifest; NULL = one subset */
} zr_track1_options;

void zr_track1_options_init(zr_track1_options* options);

zr_status zr_track1_run(const zr_alignment* alignment,
                        const zr_features* features,
                        const zr_track1_options* options, zr_report** out);

/* Batch form: a JSON array of {language, phones, words, features,
 * manifest?}; produces per-language rows plus an unweighted "avg" row. */
zr_status zr_track1_run_batch(const char* batch_path,
                              const zr_track1_options* options,
                              zr_report** out);

/* ---- track 2: term discovery ---- */

typedef struct zr_track2_options {
  size_t chunk_size;    /* utterances per evaluation chunk; 0 = exact */
  int workers;
  const char* language;
} zr_track2_options;

void zr_track2_options_init(zr_track2_options* options);

zr_status zr_track2_run(const zr_alignment* alignment,
                        const zr_classes* classes,
                        const zr_track2_options* options, zr_report** out);

/* Batch form: JSON array of {language, phones, words, classes}. */
zr_status zr_track2_run_batch(const char* batch_path,
                              const zr_track2_options* options,
                              zr_report** out);

/* ---- reports ---- */

/* Writes <prefix>.json and <prefix>.csv (plus <prefix>_pairs.csv when a
 * per-pair ABX breakdown is present). */
zr_status zr_report_write(const zr_report* report, const char* path_prefix);
zr_status zr_report_json(const zr_report* report, char** out);
/* Fetch one metric value; key layout mirrors the JSON rows. */
zr_status zr_report_metric(const zr_report* report, int track,
                           const char* language, const char* subset,
                           const char* name, double* out);
void zr_report_free(zr_report* report);

/* ---- validation and synthesis ---- */

/* Runs every parser in check-only mode. Returns ZR_OK iff all inputs are
 * valid; *diagnostics receives the full text report either way. Optional
 * paths may be NULL. */
zr_status zr_validate(const char* phone_path, const char* word_path,
                      const char* features_dir, const char* classes_path,
                      const char* manifest_path, zr_metric metric,
                      char** diagnostics);

/* Generates a synthetic corpus under out_dir (phones.txt, words.txt,
 * features/, classes_topline.txt, manifest.txt, synth_config.txt).
 * config_path NULL uses the built-in defaults; seed_override >= 0 replaces
 * the configured seed. */
zr_status zr_synth_generate(const char* config_path, int64_t seed_override,
                            const char* out_dir);

/* Returns the default generator configuration as `key = value` text. */
zr_status zr_synth_default_config(char** out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ZREVAL_H_ */
