// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

/* C interface to libqfe: quadratic functional encryption with projection,
 * and the encrypted credit-scoring pipeline built on it.
 *
 * Conventions
 *   - Every fallible call returns qfe_status; QFE_OK is zero.
 *   - On failure, qfe_last_error() describes the error. The text is
 *     thread-local and valid until the next failing call on that thread.
 *   - Objects are opaque handles released with the matching _free
 *     function. Free functions accept NULL.
 *   - Byte outputs are qfe_buffer values owned by the caller and released
 *     with qfe_buffer_free.
 *   - Integer matrices are row-major int64 arrays.
 */
#ifndef QFE_QFE_H_
#define QFE_QFE_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define QFE_API __attribute__((visibility("default")))
#else
#define QFE_API
#endif

typedef enum qfe_status {
  QFE_OK = 0,
  QFE_ERR_ARGUMENT = 1,
  QFE_ERR_BOUND = 2,
  QFE_ERR_DLOG_OUT_OF_RANGE = 3,
  QFE_ERR_KEY_MISMATCH = 4,
  QFE_ERR_FORMAT = 5,
  QFE_ERR_IO = 6,
  QFE_ERR_CONFIG = 7,
  QFE_ERR_CONNECTION = 8,
  QFE_ERR_DIVERGENCE = 9,
  QFE_ERR_DEGENERATE_DATASET = 10,
  QFE_ERR_PROTOCOL = 11,
  QFE_ERR_INTERNAL = 99
} qfe_status;

QFE_API const char* qfe_version(void);
QFE_API const char* qfe_status_name(qfe_status status);
QFE_API const char* qfe_last_error(void);
/* debug, info, warn, error or off; structured logs go to stderr. */
QFE_API qfe_status qfe_set_log_level(const char* level);

/* ---- Buffers ---- */

typedef struct qfe_buffer {
  uint8_t* data;
  size_t len;
} qfe_buffer;

QFE_API void qfe_buffer_free(qfe_buffer* buf);

/* ---- Randomness ---- */

typedef struct qfe_rng qfe_rng;

QFE_API qfe_status qfe_rng_new(qfe_rng** out); /* OS entropy */
QFE_API qfe_status qfe_rng_new_seeded(uint64_t seed, qfe_rng** out);
QFE_API void qfe_rng_free(qfe_rng* rng);

/* ---- Scheme primitives ---- */

typedef struct qfe_master_key qfe_master_key;
typedef struct qfe_ciphertext qfe_ciphertext;
typedef struct qfe_fe_key qfe_fe_key;

QFE_API qfe_status qfe_master_key_generate(size_t dim, qfe_rng* rng, qfe_master_key** out);
QFE_API size_t qfe_master_key_dim(const qfe_master_key* msk);
/* Master key for Pr^T x, pr is rows x cols with rows = dim(msk). */
QFE_API qfe_status qfe_master_key_project(const qfe_master_key* msk, const int64_t* pr, size_t rows, size_t cols,
                                          qfe_master_key** out);
QFE_API qfe_status qfe_master_key_serialize(const qfe_master_key* msk, qfe_buffer* out);
QFE_API qfe_status qfe_master_key_deserialize(const uint8_t* data, size_t len, qfe_master_key** out);
QFE_API void qfe_master_key_free(qfe_master_key* msk);

/* Encrypts (x, y), both of length dim(msk), entries bounded by |bound|. */
QFE_API qfe_status qfe_encrypt(const int64_t* x, const int64_t* y, size_t n, const qfe_master_key* msk,
                               qfe_rng* rng, int64_t bound, qfe_ciphertext** out);
QFE_API size_t qfe_ciphertext_dim(const qfe_ciphertext* ct);
QFE_API qfe_status qfe_ciphertext_project(const qfe_ciphertext* ct, const int64_t* pr, size_t rows, size_t cols,
                                          qfe_ciphertext** out);
QFE_API qfe_status qfe_ciphertext_serialize(const qfe_ciphertext* ct, qfe_buffer* out);
QFE_API qfe_status qfe_ciphertext_deserialize(const uint8_t* data, size_t len, qfe_ciphertext** out);
QFE_API void qfe_ciphertext_free(qfe_ciphertext* ct);

/* Key for the quadratic form x^T F y; f is dim x dim. */
QFE_API qfe_status qfe_derive_key(const qfe_master_key* msk, const int64_t* f, size_t dim, qfe_fe_key** out);
QFE_API qfe_status qfe_fe_key_serialize(const qfe_fe_key* key, qfe_buffer* out);
QFE_API qfe_status qfe_fe_key_deserialize(const uint8_t* data, size_t len, qfe_fe_key** out);
QFE_API void qfe_fe_key_free(qfe_fe_key* key);

/* x^T F y into *out when it lies in [-bound, bound];
 * QFE_ERR_DLOG_OUT_OF_RANGE otherwise. */
QFE_API qfe_status qfe_decrypt(const qfe_ciphertext* ct, const qfe_fe_key* key, const int64_t* f, size_t dim,
                               int64_t bound, int64_t* out);

/* ---- Operator commands (the qfe command-line tool is a thin shell over
 * these). Path arguments may be "-" for standard output where noted.
 * Numeric options left at zero take the value from the config file or the
 * built-in default. ---- */

/* level 0: progress and results, level 1: warnings. */
typedef void (*qfe_message_fn)(int level, const char* line, void* user);

typedef struct qfe_common_opts {
  const char* config_path; /* JSON run config, optional */
  qfe_message_fn on_message;
  void* user;
} qfe_common_opts;

typedef struct qfe_train_opts {
  qfe_common_opts common;
  const char* data_path;
  const char* model_path;
  const char* label_column;
  size_t epochs;
  size_t batch_size;
  size_t hidden;
  size_t workers;
  double learning_rate;
  int has_seed;
  uint64_t seed;
} qfe_train_opts;

typedef struct qfe_keygen_opts {
  qfe_common_opts common;
  const char* model_path;
  const char* out_dir;
  const char* prefix; /* writes <prefix>.auth, <prefix>.client, <prefix>.eval */
  int has_seed;
  uint64_t seed;
} qfe_keygen_opts;

typedef struct qfe_encrypt_opts {
  qfe_common_opts common;
  const char* client_bundle_path;
  const char* records_path;
  const char* out_path;
  size_t workers;
  int has_seed;
  uint64_t seed;
} qfe_encrypt_opts;

typedef struct qfe_score_opts {
  qfe_common_opts common;
  const char* eval_bundle_path;
  const char* ciphertexts_path;
  const char* out_path; /* JSONL, "-" for stdout */
  size_t workers;
  int with_timings;
} qfe_score_opts;

typedef struct qfe_serve_authority_opts {
  qfe_common_opts common;
  const char* state_path;
  const char* listen; /* host:port, NULL for env/config/default */
  const char* client_token;
} qfe_serve_authority_opts;

typedef struct qfe_serve_evaluator_opts {
  qfe_common_opts common;
  const char* listen;
  const char* eval_bundle_path; /* or fetch from the authority */
  const char* authority;
  size_t workers;
} qfe_serve_evaluator_opts;

typedef struct qfe_submit_opts {
  qfe_common_opts common;
  const char* evaluator;
  const char* client_bundle_path; /* or fetch from the authority */
  const char* authority;
  const char* client_token;
  const char* records_path;
  const char* out_path;
  size_t workers;
  int with_timings;
  int has_seed;
  uint64_t seed;
} qfe_submit_opts;

typedef struct qfe_bench_opts {
  qfe_common_opts common;
  const size_t* dims;
  size_t n_dims;
  const size_t* borrowers;
  size_t n_borrowers;
  size_t repetitions;
  size_t features;
  size_t workers;
  const size_t* speedup_workers; /* optional parallel_speedup table */
  size_t n_speedup_workers;
  const char* out_path; /* CSV, "-" for stdout */
  int has_seed;
  uint64_t seed;
} qfe_bench_opts;

typedef struct qfe_synth_opts {
  qfe_common_opts common;
  size_t rows;
  size_t features;
  double separation;
  int messy;
  uint64_t seed;
  const char* out_path;
} qfe_synth_opts;

/* Zero every field and set the documented defaults. */
QFE_API void qfe_train_opts_init(qfe_train_opts* o);
QFE_API void qfe_keygen_opts_init(qfe_keygen_opts* o);
QFE_API void qfe_encrypt_opts_init(qfe_encrypt_opts* o);
QFE_API void qfe_score_opts_init(qfe_score_opts* o);
QFE_API void qfe_serve_authority_opts_init(qfe_serve_authority_opts* o);
QFE_API void qfe_serve_evaluator_opts_init(qfe_serve_evaluator_opts* o);
QFE_API void qfe_submit_opts_init(qfe_submit_opts* o);
QFE_API void qfe_bench_opts_init(qfe_bench_opts* o);
QFE_API void qfe_synth_opts_init(qfe_synth_opts* o);

QFE_API qfe_status qfe_train(const qfe_train_opts* o);
QFE_API qfe_status qfe_keygen(const qfe_keygen_opts* o);
QFE_API qfe_status qfe_encrypt_records(const qfe_encrypt_opts* o);
QFE_API qfe_status qfe_score(const qfe_score_opts* o);
/* Services run until qfe_request_shutdown() is called. */
QFE_API qfe_status qfe_serve_authority(const qfe_serve_authority_opts* o);
QFE_API qfe_status qfe_serve_evaluator(const qfe_serve_evaluator_opts* o);
QFE_API qfe_status qfe_submit(const qfe_submit_opts* o);
QFE_API qfe_status qfe_bench(const qfe_bench_opts* o);
QFE_API qfe_status qfe_synth(const qfe_synth_opts* o);

/* Async-signal-safe. */
QFE_API void qfe_request_shutdown(void);

#ifdef __cplusplus
}
#endif

#endif /* QFE_QFE_H_ */
