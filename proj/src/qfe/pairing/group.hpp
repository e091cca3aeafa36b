// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

// Curve-agnostic view of the bilinear group used by the FE scheme. Nothing
// above this header touches field or curve internals.
//
// Byte layout (see docs/FORMATS.md):
//   Scalar   32 bytes, big-endian canonical value < r
//   G1Point  48 bytes, compressed (ZCash BLS12-381 flag bits)
//   G2Point  96 bytes, compressed, x.c1 || x.c0
//   GtPoint 576 bytes, 12 big-endian Fp coefficients in tower order
// Vectors of any of these are a u32 little-endian count followed by the
// fixed-size encodings.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qfe/common/bytes.hpp"
#include "qfe/common/rng.hpp"
#include "qfe/pairing/pairing.hpp"

namespace qfe {

class Scalar {
 public:
  static constexpr std::size_t kBytes = 32;

  Scalar() = default;
  explicit Scalar(const bls12_381::Fr& v) : v_(v) {}

  static Scalar zero() { return Scalar(); }
  static Scalar one() { return Scalar(bls12_381::Fr::one()); }
  // Negative values map to r - |v|.
  static Scalar from_i64(std::int64_t v) { return Scalar(bls12_381::Fr::from_i64(v)); }
  static Scalar random(Rng& rng);

  const bls12_381::Fr& fr() const { return v_; }
  bool is_zero() const { return v_.is_zero(); }

  friend bool operator==(const Scalar&, const Scalar&) = default;
  friend Scalar operator+(const Scalar& a, const Scalar& b) { return Scalar(a.v_ + b.v_); }
  friend Scalar operator-(const Scalar& a, const Scalar& b) { return Scalar(a.v_ - b.v_); }
  friend Scalar operator*(const Scalar& a, const Scalar& b) { return Scalar(a.v_ * b.v_); }
  Scalar operator-() const { return Scalar(-v_); }
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar inverse() const { return Scalar(v_.inverse()); }

  std::array<std::uint8_t, kBytes> to_bytes() const;
  static Scalar from_bytes(std::span<const std::uint8_t> in);

 private:
  bls12_381::Fr v_;
};

class G1Point {
 public:
  static constexpr std::size_t kBytes = 48;

  G1Point() = default;  // identity
  explicit G1Point(const bls12_381::G1Affine& a) : p_(a) {}

  static G1Point generator();
  static G1Point identity() { return G1Point(); }
  // generator^k via the fixed-base table.
  static G1Point base_mul(const Scalar& k);

  bool is_identity() const { return p_.infinity; }
  const bls12_381::G1Affine& affine() const { return p_; }

  G1Point mul(const Scalar& k) const;
  friend G1Point operator+(const G1Point& a, const G1Point& b);
  G1Point negated() const { return G1Point(p_.negated()); }
  friend bool operator==(const G1Point& a, const G1Point& b) { return a.p_ == b.p_; }

  std::array<std::uint8_t, kBytes> to_bytes() const;
  // Rejects non-canonical encodings, off-curve points and points outside
  // the prime-order subgroup.
  static G1Point from_bytes(std::span<const std::uint8_t> in);

 private:
  bls12_381::G1Affine p_;
};

class G2Point {
 public:
  static constexpr std::size_t kBytes = 96;

  G2Point() = default;
  explicit G2Point(const bls12_381::G2Affine& a) : p_(a) {}

  static G2Point generator();
  static G2Point identity() { return G2Point(); }
  static G2Point base_mul(const Scalar& k);

  bool is_identity() const { return p_.infinity; }
  const bls12_381::G2Affine& affine() const { return p_; }

  G2Point mul(const Scalar& k) const;
  friend G2Point operator+(const G2Point& a, const G2Point& b);
  G2Point negated() const { return G2Point(p_.negated()); }
  friend bool operator==(const G2Point& a, const G2Point& b) { return a.p_ == b.p_; }

  std::array<std::uint8_t, kBytes> to_bytes() const;
  static G2Point from_bytes(std::span<const std::uint8_t> in);

 private:
  bls12_381::G2Affine p_;
};

class GtPoint {
 public:
  static constexpr std::size_t kBytes = 576;

  GtPoint() : v_(bls12_381::Fp12::one()) {}
  explicit GtPoint(const bls12_381::Fp12& v) : v_(v) {}

  static GtPoint identity() { return GtPoint(); }
  bool is_identity() const { return v_.is_one(); }
  const bls12_381::Fp12& value() const { return v_; }

  friend GtPoint operator*(const GtPoint& a, const GtPoint& b) { return GtPoint(a.v_ * b.v_); }
  GtPoint& operator*=(const GtPoint& o) { return *this = *this * o; }
  friend bool operator==(const GtPoint& a, const GtPoint& b) { return a.v_ == b.v_; }
  // Elements of the pairing target group are unitary, so the inverse is
  // the conjugate.
  GtPoint inverse() const { return GtPoint(v_.conjugate()); }
  GtPoint pow(const Scalar& k) const { return GtPoint(v_.pow(k.fr().to_canonical())); }
  GtPoint pow(std::int64_t k) const;

  // 64-bit fingerprint of the canonical representation.
  std::uint64_t fingerprint() const;

  std::array<std::uint8_t, kBytes> to_bytes() const;
  // Checks field canonicity and membership in the order-r subgroup.
  static GtPoint from_bytes(std::span<const std::uint8_t> in);

 private:
  bls12_381::Fp12 v_;
};

// The fixed BLS12-381 parameter set. Immutable; safe to share.
struct GroupContext {
  std::array<std::uint8_t, 32> group_order;  // r, big-endian
  G1Point g1;
  G2Point g2;
  GtPoint gt;  // pair(g1, g2)
};

// Deterministic: every call returns the same context.
const GroupContext& setup();

GtPoint pair(const G1Point& a, const G2Point& b);
GtPoint pair_product(std::span<const std::pair<G1Point, G2Point>> terms);

// prod points[i]^coeffs[i]. Throws ArgumentError on length mismatch.
G1Point multi_exp_combine(std::span<const G1Point> points, std::span<const Scalar> coeffs);
G2Point multi_exp_combine(std::span<const G2Point> points, std::span<const Scalar> coeffs);
G1Point multi_exp_combine(std::span<const G1Point> points, std::span<const std::int64_t> coeffs);
G2Point multi_exp_combine(std::span<const G2Point> points, std::span<const std::int64_t> coeffs);

// Batched conversions; one field inversion for the whole vector.
std::vector<G1Point> g1_base_mul_batch(std::span<const Scalar> ks);
std::vector<G2Point> g2_base_mul_batch(std::span<const Scalar> ks);

template <class P>
void write_points(ByteWriter& w, std::span<const P> pts) {
  w.u32(static_cast<std::uint32_t>(pts.size()));
  for (const auto& p : pts) w.raw(p.to_bytes());
}

template <class P>
std::vector<P> read_points(ByteReader& r) {
  std::uint32_t n = r.u32();
  if (static_cast<std::size_t>(n) * P::kBytes > r.remaining()) throw FormatError("point vector overruns input");
  std::vector<P> out;
  out.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) out.push_back(P::from_bytes(r.raw(P::kBytes)));
  return out;
}

}  // namespace qfe
