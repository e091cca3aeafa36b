// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

// Symmetric-key quadratic functional encryption (SGP construction) with
// linear projection of ciphertexts and master keys.
//
// Master key: s, t in Z_r^n.
// Encrypt(x, y): sample gamma and an invertible 2x2 matrix W, then
//   a_i = g1^(W^-T (x_i, gamma s_i)),  b_i = g2^(W (y_i, -t_i)),  c = g1^gamma
// so that <a_i, b_j> = x_i y_j - gamma s_i t_j in the exponent.
// DeriveKey(F): g2^(s^T F t).
// Decrypt: prod_ij e(a_i, b_j)^F_ij * e(c, key) = gt^(x^T F y), then a
// bounded discrete log.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qfe/common/bytes.hpp"
#include "qfe/common/matrix.hpp"
#include "qfe/common/rng.hpp"
#include "qfe/pairing/group.hpp"

namespace qfe {

struct MasterKey {
  std::vector<Scalar> s;
  std::vector<Scalar> t;

  std::size_t dim() const { return s.size(); }
  friend bool operator==(const MasterKey&, const MasterKey&) = default;
};

struct Ciphertext {
  std::vector<std::array<G1Point, 2>> a;  // encodes x
  std::vector<std::array<G2Point, 2>> b;  // encodes y
  G1Point gamma;                          // g1^gamma, shared randomizer

  std::size_t dim() const { return a.size(); }
  friend bool operator==(const Ciphertext&, const Ciphertext&) = default;
};

// Square integer matrix defining the quadratic form x^T F y.
class FMatrix {
 public:
  explicit FMatrix(IntMatrix entries);
  static FMatrix diagonal(std::span<const std::int64_t> diag);

  std::size_t dim() const { return m_.rows(); }
  const IntMatrix& entries() const { return m_; }
  std::int64_t operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  std::int64_t entry_bound() const { return entry_bound_; }
  bool is_diagonal() const { return diagonal_; }
  const Digest& digest() const { return digest_; }

 private:
  IntMatrix m_;
  std::int64_t entry_bound_ = 0;
  bool diagonal_ = true;
  Digest digest_{};
};

struct FeKey {
  G2Point key;  // g2^(s^T F t)
  std::size_t dim = 0;
  Digest f_digest{};

  friend bool operator==(const FeKey&, const FeKey&) = default;
};

MasterKey generate_master_key(std::size_t dim, const GroupContext& ctx, Rng& rng);

// Entries of x and y must satisfy |v| <= message_bound (BoundError).
Ciphertext encrypt(std::span<const std::int64_t> x, std::span<const std::int64_t> y, const MasterKey& msk,
                   Rng& rng, std::int64_t message_bound);

FeKey derive_key(const MasterKey& msk, const FMatrix& f);

// gt^(x^T F y) without the discrete log. Checks dims and the F digest.
GtPoint decrypt_to_target(const Ciphertext& c, const FeKey& key, const FMatrix& f);

// x^T F y. Throws KeyMismatchError if key was derived for another F and
// DlogRangeError if the value lies outside [-bound, bound].
std::int64_t decrypt(const Ciphertext& c, const FeKey& key, const FMatrix& f, std::int64_t bound);

// Projection by an n x d integer matrix: the result encrypts Pr^T x (and
// Pr^T y) under project_secret_key(msk, pr).
Ciphertext project_encryption(const Ciphertext& c, const IntMatrix& pr);
MasterKey project_secret_key(const MasterKey& msk, const IntMatrix& pr);

// Binary files. The optional digest ties an artifact to a quantization
// config and is checked by the pipeline.
Bytes serialize(const MasterKey& msk, const std::optional<Digest>& config = std::nullopt);
Bytes serialize(const Ciphertext& c, const std::optional<Digest>& config = std::nullopt);
Bytes serialize(const FeKey& k, const std::optional<Digest>& config = std::nullopt);
MasterKey deserialize_master_key(std::span<const std::uint8_t> in, std::optional<Digest>* config = nullptr);
Ciphertext deserialize_ciphertext(std::span<const std::uint8_t> in, std::optional<Digest>* config = nullptr);
FeKey deserialize_fe_key(std::span<const std::uint8_t> in, std::optional<Digest>* config = nullptr);

}  // namespace qfe
