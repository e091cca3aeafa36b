// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include "qfe/sgp/sgp.hpp"

#include <cstdlib>
#include <string>

#include "qfe/common/tlv.hpp"
#include "qfe/pairing/dlog.hpp"

namespace qfe {
namespace {

std::string dims_msg(const char* what, std::size_t a, std::size_t b) {
  return std::string(what) + ": dimension " + std::to_string(a) + " does not match " + std::to_string(b);
}

void check_bound(std::span<const std::int64_t> v, std::int64_t bound, const char* name) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    // std::abs(INT64_MIN) is undefined; compare without negating.
    if (v[i] > bound || v[i] < -bound) {
      throw BoundError(std::string("encrypt: ") + name + "[" + std::to_string(i) + "] = " + std::to_string(v[i]) +
                       " exceeds message bound " + std::to_string(bound));
    }
  }
}

Scalar random_nonzero(Rng& rng) {
  for (;;) {
    Scalar s = Scalar::random(rng);
    if (!s.is_zero()) return s;
  }
}

void write_scalars(ByteWriter& w, std::span<const Scalar> v) {
  w.u32(static_cast<std::uint32_t>(v.size()));
  for (const auto& s : v) w.raw(s.to_bytes());
}

std::vector<Scalar> read_scalars(std::span<const std::uint8_t> in) {
  ByteReader r(in);
  std::uint32_t n = r.u32();
  if (static_cast<std::size_t>(n) * Scalar::kBytes != r.remaining()) throw FormatError("scalar vector length mismatch");
  std::vector<Scalar> out;
  out.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) out.push_back(Scalar::from_bytes(r.raw(Scalar::kBytes)));
  return out;
}

template <class P>
Bytes encode_pairs(const std::vector<std::array<P, 2>>& v) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(v.size()));
  for (const auto& pr : v) {
    w.raw(pr[0].to_bytes());
    w.raw(pr[1].to_bytes());
  }
  return w.take();
}

template <class P>
std::vector<std::array<P, 2>> decode_pairs(std::span<const std::uint8_t> in) {
  ByteReader r(in);
  std::uint32_t n = r.u32();
  if (static_cast<std::size_t>(n) * 2 * P::kBytes != r.remaining()) throw FormatError("point vector length mismatch");
  std::vector<std::array<P, 2>> out(n);
  for (auto& pr : out) {
    pr[0] = P::from_bytes(r.raw(P::kBytes));
    pr[1] = P::from_bytes(r.raw(P::kBytes));
  }
  return out;
}

void put_config(TlvWriter& w, const std::optional<Digest>& config) {
  if (config) w.field(tag::kQuantDigest, *config);
}

void get_config(const TlvReader& r, std::optional<Digest>* config) {
  if (!config) return;
  config->reset();
  if (auto v = r.find(tag::kQuantDigest)) {
    if (v->size() != 32) throw FormatError("config digest must be 32 bytes");
    Digest d;
    std::copy(v->begin(), v->end(), d.begin());
    *config = d;
  }
}

Digest digest_of(const IntMatrix& m) {
  ByteWriter w;
  w.str("qfe-fmatrix");
  w.u32(static_cast<std::uint32_t>(m.rows()));
  w.u32(static_cast<std::uint32_t>(m.cols()));
  for (auto v : m.data()) w.i64(v);
  return sha256(w.bytes());
}

}  // namespace

FMatrix::FMatrix(IntMatrix entries) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols()) {
    throw ArgumentError("F must be square, got " + std::to_string(m_.rows()) + "x" + std::to_string(m_.cols()));
  }
  if (m_.rows() == 0) throw ArgumentError("F must have dimension >= 1");
  for (std::size_t i = 0; i < m_.rows(); ++i) {
    for (std::size_t j = 0; j < m_.cols(); ++j) {
      std::int64_t v = m_(i, j);
      if (v == INT64_MIN) throw BoundError("F entry out of range");
      entry_bound_ = std::max(entry_bound_, std::abs(v));
      if (i != j && v != 0) diagonal_ = false;
    }
  }
  digest_ = digest_of(m_);
}

FMatrix FMatrix::diagonal(std::span<const std::int64_t> diag) {
  IntMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return FMatrix(std::move(m));
}

MasterKey generate_master_key(std::size_t dim, const GroupContext&, Rng& rng) {
  if (dim == 0) throw ArgumentError("generate_master_key: dim must be >= 1");
  MasterKey k;
  k.s.reserve(dim);
  k.t.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) k.s.push_back(Scalar::random(rng));
  for (std::size_t i = 0; i < dim; ++i) k.t.push_back(Scalar::random(rng));
  return k;
}

Ciphertext encrypt(std::span<const std::int64_t> x, std::span<const std::int64_t> y, const MasterKey& msk, Rng& rng,
                   std::int64_t message_bound) {
  const std::size_t n = msk.dim();
  if (x.size() != n) throw ArgumentError(dims_msg("encrypt x", x.size(), n));
  if (y.size() != n) throw ArgumentError(dims_msg("encrypt y", y.size(), n));
  if (message_bound < 0) throw ArgumentError("encrypt: negative message bound");
  check_bound(x, message_bound, "x");
  check_bound(y, message_bound, "y");

  const Scalar gamma = random_nonzero(rng);
  Scalar w00, w01, w10, w11, det;
  do {
    w00 = Scalar::random(rng);
    w01 = Scalar::random(rng);
    w10 = Scalar::random(rng);
    w11 = Scalar::random(rng);
    det = w00 * w11 - w01 * w10;
  } while (det.is_zero());
  const Scalar inv = det.inverse();
  // W^-T = [[w11, -w10], [-w01, w00]] / det
  const Scalar u00 = w11 * inv, u01 = -(w10 * inv), u10 = -(w01 * inv), u11 = w00 * inv;

  std::vector<Scalar> ea(2 * n);
  std::vector<Scalar> eb(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const Scalar xi = Scalar::from_i64(x[i]);
    const Scalar yi = Scalar::from_i64(y[i]);
    const Scalar gs = gamma * msk.s[i];
    ea[2 * i] = u00 * xi + u01 * gs;
    ea[2 * i + 1] = u10 * xi + u11 * gs;
    eb[2 * i] = w00 * yi - w01 * msk.t[i];
    eb[2 * i + 1] = w10 * yi - w11 * msk.t[i];
  }
  auto pa = g1_base_mul_batch(ea);
  auto pb = g2_base_mul_batch(eb);

  Ciphertext c;
  c.a.resize(n);
  c.b.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.a[i] = {pa[2 * i], pa[2 * i + 1]};
    c.b[i] = {pb[2 * i], pb[2 * i + 1]};
  }
  c.gamma = G1Point::base_mul(gamma);
  return c;
}

FeKey derive_key(const MasterKey& msk, const FMatrix& f) {
  const std::size_t n = msk.dim();
  if (f.dim() != n) throw ArgumentError(dims_msg("derive_key", f.dim(), n));
  Scalar acc;
  for (std::size_t i = 0; i < n; ++i) {
    if (f.is_diagonal()) {
      if (f(i, i) != 0) acc += Scalar::from_i64(f(i, i)) * msk.s[i] * msk.t[i];
      continue;
    }
    Scalar row;
    for (std::size_t j = 0; j < n; ++j) {
      if (f(i, j) != 0) row += Scalar::from_i64(f(i, j)) * msk.t[j];
    }
    acc += msk.s[i] * row;
  }
  return FeKey{G2Point::base_mul(acc), n, f.digest()};
}

GtPoint decrypt_to_target(const Ciphertext& c, const FeKey& key, const FMatrix& f) {
  const std::size_t n = c.dim();
  if (c.b.size() != n) throw ArgumentError(dims_msg("decrypt ciphertext", c.b.size(), n));
  if (key.dim != n) throw ArgumentError(dims_msg("decrypt key", key.dim, n));
  if (f.dim() != n) throw ArgumentError(dims_msg("decrypt F", f.dim(), n));
  if (key.f_digest != f.digest()) {
    throw KeyMismatchError("decrypt: FE key was derived for a different function matrix");
  }

  std::vector<std::pair<G1Point, G2Point>> terms;
  terms.reserve(2 * n + 1);
  std::vector<G1Point> p0, p1;
  std::vector<std::int64_t> coeffs;
  for (std::size_t j = 0; j < n; ++j) {
    // Column j: A_j = sum_i F_ij a_i, paired with b_j.
    p0.clear();
    p1.clear();
    coeffs.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (f(i, j) == 0) continue;
      p0.push_back(c.a[i][0]);
      p1.push_back(c.a[i][1]);
      coeffs.push_back(f(i, j));
    }
    if (coeffs.empty()) continue;
    terms.emplace_back(multi_exp_combine(p0, coeffs), c.b[j][0]);
    terms.emplace_back(multi_exp_combine(p1, coeffs), c.b[j][1]);
  }
  terms.emplace_back(c.gamma, key.key);
  return pair_product(terms);
}

std::int64_t decrypt(const Ciphertext& c, const FeKey& key, const FMatrix& f, std::int64_t bound) {
  GtPoint v = decrypt_to_target(c, key, f);
  return dlog_bounded(v, setup().gt, bound);
}

Ciphertext project_encryption(const Ciphertext& c, const IntMatrix& pr) {
  const std::size_t n = c.dim();
  if (pr.rows() != n) throw ArgumentError(dims_msg("project_encryption", pr.rows(), n));
  if (pr.cols() == 0 || pr.cols() > n) {
    throw ArgumentError("project_encryption: output dimension " + std::to_string(pr.cols()) + " must be in [1, " +
                        std::to_string(n) + "]");
  }
  std::vector<G1Point> a0(n), a1(n);
  std::vector<G2Point> b0(n), b1(n);
  for (std::size_t i = 0; i < n; ++i) {
    a0[i] = c.a[i][0];
    a1[i] = c.a[i][1];
    b0[i] = c.b[i][0];
    b1[i] = c.b[i][1];
  }
  Ciphertext out;
  out.a.resize(pr.cols());
  out.b.resize(pr.cols());
  for (std::size_t k = 0; k < pr.cols(); ++k) {
    const auto col = pr.column(k);
    out.a[k] = {multi_exp_combine(a0, col), multi_exp_combine(a1, col)};
    out.b[k] = {multi_exp_combine(b0, col), multi_exp_combine(b1, col)};
  }
  out.gamma = c.gamma;
  return out;
}

MasterKey project_secret_key(const MasterKey& msk, const IntMatrix& pr) {
  const std::size_t n = msk.dim();
  if (pr.rows() != n) throw ArgumentError(dims_msg("project_secret_key", pr.rows(), n));
  if (pr.cols() == 0 || pr.cols() > n) {
    throw ArgumentError("project_secret_key: output dimension " + std::to_string(pr.cols()) + " must be in [1, " +
                        std::to_string(n) + "]");
  }
  MasterKey out;
  out.s.resize(pr.cols());
  out.t.resize(pr.cols());
  for (std::size_t k = 0; k < pr.cols(); ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (pr(i, k) == 0) continue;
      const Scalar p = Scalar::from_i64(pr(i, k));
      out.s[k] += p * msk.s[i];
      out.t[k] += p * msk.t[i];
    }
  }
  return out;
}

Bytes serialize(const MasterKey& msk, const std::optional<Digest>& config) {
  TlvWriter w(magic::kMasterKey);
  w.u32(tag::kDim, static_cast<std::uint32_t>(msk.dim()));
  ByteWriter s, t;
  write_scalars(s, msk.s);
  write_scalars(t, msk.t);
  w.field(tag::kMskS, s.bytes()).field(tag::kMskT, t.bytes());
  put_config(w, config);
  return w.finish();
}

Bytes serialize(const Ciphertext& c, const std::optional<Digest>& config) {
  TlvWriter w(magic::kCiphertext);
  w.u32(tag::kDim, static_cast<std::uint32_t>(c.dim()));
  w.field(tag::kCtA, encode_pairs(c.a));
  w.field(tag::kCtB, encode_pairs(c.b));
  w.field(tag::kCtGamma, c.gamma.to_bytes());
  put_config(w, config);
  return w.finish();
}

Bytes serialize(const FeKey& k, const std::optional<Digest>& config) {
  TlvWriter w(magic::kFeKey);
  w.u32(tag::kDim, static_cast<std::uint32_t>(k.dim));
  w.field(tag::kFekKey, k.key.to_bytes());
  w.field(tag::kFekDigest, k.f_digest);
  put_config(w, config);
  return w.finish();
}

MasterKey deserialize_master_key(std::span<const std::uint8_t> in, std::optional<Digest>* config) {
  TlvReader r(in, magic::kMasterKey);
  const std::uint32_t dim = r.require_u32(tag::kDim);
  MasterKey k{read_scalars(r.require(tag::kMskS)), read_scalars(r.require(tag::kMskT))};
  if (dim == 0 || k.s.size() != dim || k.t.size() != dim) throw FormatError("master key dimension mismatch");
  get_config(r, config);
  return k;
}

Ciphertext deserialize_ciphertext(std::span<const std::uint8_t> in, std::optional<Digest>* config) {
  TlvReader r(in, magic::kCiphertext);
  const std::uint32_t dim = r.require_u32(tag::kDim);
  Ciphertext c;
  c.a = decode_pairs<G1Point>(r.require(tag::kCtA));
  c.b = decode_pairs<G2Point>(r.require(tag::kCtB));
  c.gamma = G1Point::from_bytes(r.require(tag::kCtGamma));
  if (dim == 0 || c.a.size() != dim || c.b.size() != dim) throw FormatError("ciphertext dimension mismatch");
  get_config(r, config);
  return c;
}

FeKey deserialize_fe_key(std::span<const std::uint8_t> in, std::optional<Digest>* config) {
  TlvReader r(in, magic::kFeKey);
  FeKey k;
  k.dim = r.require_u32(tag::kDim);
  if (k.dim == 0) throw FormatError("FE key dimension must be >= 1");
  k.key = G2Point::from_bytes(r.require(tag::kFekKey));
  auto d = r.require(tag::kFekDigest);
  if (d.size() != k.f_digest.size()) throw FormatError("FE key digest must be 32 bytes");
  std::copy(d.begin(), d.end(), k.f_digest.begin());
  get_config(r, config);
  return k;
}

}  // namespace qfe
