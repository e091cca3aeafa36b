// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <cstring>
#include <vector>

#include "capi_internal.hpp"
#include "qfe/common/log.hpp"
#include "qfe/sgp/sgp.hpp"

struct qfe_rng {
  qfe::Rng rng;
};
struct qfe_master_key {
  qfe::MasterKey v;
};
struct qfe_ciphertext {
  qfe::Ciphertext v;
};
struct qfe_fe_key {
  qfe::FeKey v;
};

namespace qfe::capi {
namespace {

thread_local std::string g_last_error;

IntMatrix matrix_from(const int64_t* data, size_t rows, size_t cols) {
  if (rows == 0 || cols == 0) throw ArgumentError("matrix has a zero dimension");
  require(data, "matrix");
  return IntMatrix(rows, cols, std::vector<std::int64_t>(data, data + rows * cols));
}

void fill_buffer(const Bytes& b, qfe_buffer* out) {
  require(out, "out");
  out->data = static_cast<uint8_t*>(std::malloc(b.empty() ? 1 : b.size()));
  if (!out->data) throw std::bad_alloc();
  std::memcpy(out->data, b.data(), b.size());
  out->len = b.size();
}

}  // namespace

void set_last_error(const std::string& message) { g_last_error = message; }

}  // namespace qfe::capi

using namespace qfe;
using namespace qfe::capi;

extern "C" {

const char* qfe_version(void) { return "1.0.0"; }

const char* qfe_status_name(qfe_status status) {
  if (status == QFE_OK) return "ok";
  return error_code_name(static_cast<ErrorCode>(status));
}

const char* qfe_last_error(void) { return g_last_error.c_str(); }

qfe_status qfe_set_log_level(const char* level) {
  return guard([&] {
    require(level, "level");
    std::string s(level);
    if (s == "debug") set_log_level(LogLevel::kDebug);
    else if (s == "info") set_log_level(LogLevel::kInfo);
    else if (s == "warn") set_log_level(LogLevel::kWarn);
    else if (s == "error") set_log_level(LogLevel::kError);
    else if (s == "off") set_log_level(LogLevel::kOff);
    else throw ArgumentError("unknown log level '" + s + "'");
  });
}

void qfe_buffer_free(qfe_buffer* buf) {
  if (!buf) return;
  std::free(buf->data);
  buf->data = nullptr;
  buf->len = 0;
}

qfe_status qfe_rng_new(qfe_rng** out) {
  return guard([&] {
    require(out, "out");
    *out = new qfe_rng{Rng()};
  });
}

qfe_status qfe_rng_new_seeded(uint64_t seed, qfe_rng** out) {
  return guard([&] {
    require(out, "out");
    *out = new qfe_rng{Rng::from_seed(seed)};
  });
}

void qfe_rng_free(qfe_rng* rng) { delete rng; }

qfe_status qfe_master_key_generate(size_t dim, qfe_rng* rng, qfe_master_key** out) {
  return guard([&] {
    require(rng, "rng");
    require(out, "out");
    if (dim == 0) throw ArgumentError("dimension must be positive");
    *out = new qfe_master_key{generate_master_key(dim, setup(), rng->rng)};
  });
}

size_t qfe_master_key_dim(const qfe_master_key* msk) { return msk ? msk->v.dim() : 0; }

qfe_status qfe_master_key_project(const qfe_master_key* msk, const int64_t* pr, size_t rows, size_t cols,
                                  qfe_master_key** out) {
  return guard([&] {
    require(msk, "msk");
    require(out, "out");
    *out = new qfe_master_key{project_secret_key(msk->v, matrix_from(pr, rows, cols))};
  });
}

qfe_status qfe_master_key_serialize(const qfe_master_key* msk, qfe_buffer* out) {
  return guard([&] {
    require(msk, "msk");
    fill_buffer(serialize(msk->v), out);
  });
}

qfe_status qfe_master_key_deserialize(const uint8_t* data, size_t len, qfe_master_key** out) {
  return guard([&] {
    require(data, "data");
    require(out, "out");
    *out = new qfe_master_key{deserialize_master_key({data, len})};
  });
}

void qfe_master_key_free(qfe_master_key* msk) { delete msk; }

qfe_status qfe_encrypt(const int64_t* x, const int64_t* y, size_t n, const qfe_master_key* msk, qfe_rng* rng,
                       int64_t bound, qfe_ciphertext** out) {
  return guard([&] {
    require(x, "x");
    require(y, "y");
    require(msk, "msk");
    require(rng, "rng");
    require(out, "out");
    *out = new qfe_ciphertext{encrypt({x, n}, {y, n}, msk->v, rng->rng, bound)};
  });
}

size_t qfe_ciphertext_dim(const qfe_ciphertext* ct) { return ct ? ct->v.dim() : 0; }

qfe_status qfe_ciphertext_project(const qfe_ciphertext* ct, const int64_t* pr, size_t rows, size_t cols,
                                  qfe_ciphertext** out) {
  return guard([&] {
    require(ct, "ciphertext");
    require(out, "out");
    *out = new qfe_ciphertext{project_encryption(ct->v, matrix_from(pr, rows, cols))};
  });
}

qfe_status qfe_ciphertext_serialize(const qfe_ciphertext* ct, qfe_buffer* out) {
  return guard([&] {
    require(ct, "ciphertext");
    fill_buffer(serialize(ct->v), out);
  });
}

qfe_status qfe_ciphertext_deserialize(const uint8_t* data, size_t len, qfe_ciphertext** out) {
  return guard([&] {
    require(data, "data");
    require(out, "out");
    *out = new qfe_ciphertext{deserialize_ciphertext({data, len})};
  });
}

void qfe_ciphertext_free(qfe_ciphertext* ct) { delete ct; }

qfe_status qfe_derive_key(const qfe_master_key* msk, const int64_t* f, size_t dim, qfe_fe_key** out) {
  return guard([&] {
    require(msk, "msk");
    require(out, "out");
    *out = new qfe_fe_key{derive_key(msk->v, FMatrix(matrix_from(f, dim, dim)))};
  });
}

qfe_status qfe_fe_key_serialize(const qfe_fe_key* key, qfe_buffer* out) {
  return guard([&] {
    require(key, "key");
    fill_buffer(serialize(key->v), out);
  });
}

qfe_status qfe_fe_key_deserialize(const uint8_t* data, size_t len, qfe_fe_key** out) {
  return guard([&] {
    require(data, "data");
    require(out, "out");
    *out = new qfe_fe_key{deserialize_fe_key({data, len})};
  });
}

void qfe_fe_key_free(qfe_fe_key* key) { delete key; }

qfe_status qfe_decrypt(const qfe_ciphertext* ct, const qfe_fe_key* key, const int64_t* f, size_t dim, int64_t bound,
                       int64_t* out) {
  return guard([&] {
    require(ct, "ciphertext");
    require(key, "key");
    require(out, "out");
    *out = decrypt(ct->v, key->v, FMatrix(matrix_from(f, dim, dim)), bound);
  });
}

}  // extern "C"
