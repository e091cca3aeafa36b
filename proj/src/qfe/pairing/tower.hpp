// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

// Extension tower for BLS12-381:
//   Fp2  = Fp[u]  / (u^2 + 1)
//   Fp6  = Fp2[v] / (v^3 - (u + 1))
//   Fp12 = Fp6[w] / (w^2 - v)

#pragma once

#include <optional>

#include "qfe/pairing/field.hpp"

namespace qfe::bls12_381 {

struct Fp2 {
  Fp c0;
  Fp c1;

  static Fp2 zero() { return {}; }
  static Fp2 one() { return {Fp::one(), Fp::zero()}; }

  bool is_zero() const { return c0.is_zero() && c1.is_zero(); }
  friend bool operator==(const Fp2&, const Fp2&) = default;

  friend Fp2 operator+(const Fp2& a, const Fp2& b) { return {a.c0 + b.c0, a.c1 + b.c1}; }
  friend Fp2 operator-(const Fp2& a, const Fp2& b) { return {a.c0 - b.c0, a.c1 - b.c1}; }
  Fp2 operator-() const { return {-c0, -c1}; }
  friend Fp2 operator*(const Fp2& a, const Fp2& b) {
    Fp aa = a.c0 * b.c0;
    Fp bb = a.c1 * b.c1;
    return {aa - bb, (a.c0 + a.c1) * (b.c0 + b.c1) - aa - bb};
  }
  friend Fp2 operator*(const Fp2& a, const Fp& s) { return {a.c0 * s, a.c1 * s}; }
  Fp2& operator+=(const Fp2& o) { return *this = *this + o; }
  Fp2& operator-=(const Fp2& o) { return *this = *this - o; }
  Fp2& operator*=(const Fp2& o) { return *this = *this * o; }

  Fp2 square() const {
    Fp t = c0 * c1;
    return {(c0 + c1) * (c0 - c1), t + t};
  }
  Fp2 doubled() const { return *this + *this; }
  Fp2 conjugate() const { return {c0, -c1}; }
  // Multiplication by the cubic non-residue u + 1.
  Fp2 mul_by_nonresidue() const { return {c0 - c1, c0 + c1}; }
  Fp2 frobenius() const { return conjugate(); }
  Fp2 inverse() const {
    Fp t = (c0.square() + c1.square()).inverse();
    return {c0 * t, -(c1 * t)};
  }

  template <std::size_t M>
  Fp2 pow(const std::array<u64, M>& exp) const {
    Fp2 acc = one();
    for (std::size_t i = limbs::bit_length(exp); i-- > 0;) {
      acc = acc.square();
      if (limbs::bit(exp, i)) acc *= *this;
    }
    return acc;
  }

  std::optional<Fp2> sqrt() const;

  // Ordering used by compressed point encodings: compare c1, then c0.
  bool lexicographically_largest() const {
    if (!c1.is_zero()) return c1.lexicographically_largest();
    return c0.lexicographically_largest();
  }
};

struct Fp6 {
  Fp2 c0;
  Fp2 c1;
  Fp2 c2;

  static Fp6 zero() { return {}; }
  static Fp6 one() { return {Fp2::one(), Fp2::zero(), Fp2::zero()}; }

  bool is_zero() const { return c0.is_zero() && c1.is_zero() && c2.is_zero(); }
  friend bool operator==(const Fp6&, const Fp6&) = default;

  friend Fp6 operator+(const Fp6& a, const Fp6& b) { return {a.c0 + b.c0, a.c1 + b.c1, a.c2 + b.c2}; }
  friend Fp6 operator-(const Fp6& a, const Fp6& b) { return {a.c0 - b.c0, a.c1 - b.c1, a.c2 - b.c2}; }
  Fp6 operator-() const { return {-c0, -c1, -c2}; }
  friend Fp6 operator*(const Fp6& a, const Fp6& b) {
    Fp2 aa = a.c0 * b.c0;
    Fp2 bb = a.c1 * b.c1;
    Fp2 cc = a.c2 * b.c2;
    Fp2 t1 = ((a.c1 + a.c2) * (b.c1 + b.c2) - bb - cc).mul_by_nonresidue() + aa;
    Fp2 t2 = (a.c0 + a.c1) * (b.c0 + b.c1) - aa - bb + cc.mul_by_nonresidue();
    Fp2 t3 = (a.c0 + a.c2) * (b.c0 + b.c2) - aa + bb - cc;
    return {t1, t2, t3};
  }
  Fp6& operator+=(const Fp6& o) { return *this = *this + o; }
  Fp6& operator-=(const Fp6& o) { return *this = *this - o; }
  Fp6& operator*=(const Fp6& o) { return *this = *this * o; }

  Fp6 square() const { return *this * *this; }
  // Multiplication by v.
  Fp6 mul_by_nonresidue() const { return {c2.mul_by_nonresidue(), c0, c1}; }

  Fp6 mul_by_1(const Fp2& b1) const {
    return {(c2 * b1).mul_by_nonresidue(), c0 * b1, c1 * b1};
  }

  Fp6 mul_by_01(const Fp2& b0, const Fp2& b1) const {
    Fp2 aa = c0 * b0;
    Fp2 bb = c1 * b1;
    Fp2 t1 = (c2 * b1).mul_by_nonresidue() + aa;
    Fp2 t2 = (b0 + b1) * (c0 + c1) - aa - bb;
    Fp2 t3 = c2 * b0 + bb;
    return {t1, t2, t3};
  }

  Fp6 inverse() const {
    Fp2 t0 = c0.square() - (c1 * c2).mul_by_nonresidue();
    Fp2 t1 = c2.square().mul_by_nonresidue() - c0 * c1;
    Fp2 t2 = c1.square() - c0 * c2;
    Fp2 t = c0 * t0 + (c2 * t1 + c1 * t2).mul_by_nonresidue();
    Fp2 ti = t.inverse();
    return {t0 * ti, t1 * ti, t2 * ti};
  }

  Fp6 frobenius() const;
};

struct Fp12 {
  Fp6 c0;
  Fp6 c1;

  static Fp12 zero() { return {}; }
  static Fp12 one() { return {Fp6::one(), Fp6::zero()}; }

  bool is_zero() const { return c0.is_zero() && c1.is_zero(); }
  bool is_one() const { return *this == one(); }
  friend bool operator==(const Fp12&, const Fp12&) = default;

  friend Fp12 operator*(const Fp12& a, const Fp12& b) {
    Fp6 aa = a.c0 * b.c0;
    Fp6 bb = a.c1 * b.c1;
    Fp6 c1 = (a.c0 + a.c1) * (b.c0 + b.c1) - aa - bb;
    Fp6 c0 = bb.mul_by_nonresidue() + aa;
    return {c0, c1};
  }
  Fp12& operator*=(const Fp12& o) { return *this = *this * o; }

  Fp12 square() const {
    Fp6 ab = c0 * c1;
    Fp6 sum = c0 + c1;
    Fp6 t = c1.mul_by_nonresidue() + c0;
    Fp6 r0 = t * sum - ab - ab.mul_by_nonresidue();
    return {r0, ab + ab};
  }

  Fp12 conjugate() const { return {c0, -c1}; }

  Fp12 inverse() const {
    Fp6 t = (c0.square() - c1.square().mul_by_nonresidue()).inverse();
    return {c0 * t, -(c1 * t)};
  }

  // Sparse multiplication by an element with non-zero coefficients at
  // positions 0, 1 and 4 (the shape of a Miller-loop line evaluation).
  Fp12 mul_by_014(const Fp2& b0, const Fp2& b1, const Fp2& b4) const {
    Fp6 aa = c0.mul_by_01(b0, b1);
    Fp6 bb = c1.mul_by_1(b4);
    Fp2 o = b1 + b4;
    Fp6 r1 = (c1 + c0).mul_by_01(b0, o) - aa - bb;
    Fp6 r0 = bb.mul_by_nonresidue() + aa;
    return {r0, r1};
  }

  Fp12 frobenius() const;
  Fp12 frobenius(int times) const {
    Fp12 r = *this;
    for (int i = 0; i < times; ++i) r = r.frobenius();
    return r;
  }

  template <std::size_t M>
  Fp12 pow(const std::array<u64, M>& exp) const {
    Fp12 acc = one();
    for (std::size_t i = limbs::bit_length(exp); i-- > 0;) {
      acc = acc.square();
      if (limbs::bit(exp, i)) acc *= *this;
    }
    return acc;
  }
};

}  // namespace qfe::bls12_381
