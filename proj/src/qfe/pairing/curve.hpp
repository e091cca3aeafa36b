// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

// Short Weierstrass curves y^2 = x^3 + b (a = 0) in Jacobian coordinates.
// G1 lives over Fp with b = 4, G2 over Fp2 on the sextic twist with
// b = 4(u + 1).

#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "qfe/pairing/tower.hpp"

namespace qfe::bls12_381 {

template <class F>
struct Affine {
  F x{};
  F y{};
  bool infinity = true;

  friend bool operator==(const Affine& a, const Affine& b) {
    if (a.infinity || b.infinity) return a.infinity == b.infinity;
    return a.x == b.x && a.y == b.y;
  }

  Affine negated() const {
    if (infinity) return *this;
    return {x, -y, false};
  }
};

template <class Curve>
class Jacobian {
 public:
  using F = typename Curve::Field;
  using AffinePoint = Affine<F>;

  Jacobian() : x_(F::zero()), y_(F::one()), z_(F::zero()) {}
  Jacobian(const AffinePoint& a) {  // NOLINT: implicit lift is convenient
    if (a.infinity) {
      *this = Jacobian();
    } else {
      x_ = a.x;
      y_ = a.y;
      z_ = F::one();
    }
  }

  static Jacobian identity() { return Jacobian(); }
  static Jacobian generator() { return Jacobian(Curve::generator()); }

  bool is_identity() const { return z_.is_zero(); }

  const F& x() const { return x_; }
  const F& y() const { return y_; }
  const F& z() const { return z_; }

  friend bool operator==(const Jacobian& a, const Jacobian& b) {
    if (a.is_identity() || b.is_identity()) return a.is_identity() == b.is_identity();
    F z1z1 = a.z_.square();
    F z2z2 = b.z_.square();
    if (!(a.x_ * z2z2 == b.x_ * z1z1)) return false;
    return a.y_ * z2z2 * b.z_ == b.y_ * z1z1 * a.z_;
  }

  Jacobian negated() const {
    Jacobian r = *this;
    r.y_ = -r.y_;
    return r;
  }

  // dbl-2009-l
  Jacobian doubled() const {
    if (is_identity()) return *this;
    F a = x_.square();
    F b = y_.square();
    F c = b.square();
    F d = ((x_ + b).square() - a - c).doubled();
    F e = a.doubled() + a;
    F f = e.square();
    Jacobian r;
    r.x_ = f - d.doubled();
    F c8 = c.doubled().doubled().doubled();
    r.y_ = e * (d - r.x_) - c8;
    r.z_ = (y_ * z_).doubled();
    return r;
  }

  // add-2007-bl
  friend Jacobian operator+(const Jacobian& p, const Jacobian& q) {
    if (p.is_identity()) return q;
    if (q.is_identity()) return p;
    F z1z1 = p.z_.square();
    F z2z2 = q.z_.square();
    F u1 = p.x_ * z2z2;
    F u2 = q.x_ * z1z1;
    F s1 = p.y_ * q.z_ * z2z2;
    F s2 = q.y_ * p.z_ * z1z1;
    F h = u2 - u1;
    F rr = (s2 - s1).doubled();
    if (h.is_zero()) {
      if (rr.is_zero()) return p.doubled();
      return identity();
    }
    F i = h.doubled().square();
    F j = h * i;
    F v = u1 * i;
    Jacobian r;
    r.x_ = rr.square() - j - v.doubled();
    r.y_ = rr * (v - r.x_) - (s1 * j).doubled();
    r.z_ = ((p.z_ + q.z_).square() - z1z1 - z2z2) * h;
    return r;
  }

  // madd-2007-bl
  Jacobian add_mixed(const AffinePoint& q) const {
    if (q.infinity) return *this;
    if (is_identity()) return Jacobian(q);
    F z1z1 = z_.square();
    F u2 = q.x * z1z1;
    F s2 = q.y * z_ * z1z1;
    F h = u2 - x_;
    F rr = (s2 - y_).doubled();
    if (h.is_zero()) {
      if (rr.is_zero()) return doubled();
      return identity();
    }
    F hh = h.square();
    F i = hh.doubled().doubled();
    F j = h * i;
    F v = x_ * i;
    Jacobian r;
    r.x_ = rr.square() - j - v.doubled();
    r.y_ = rr * (v - r.x_) - (y_ * j).doubled();
    r.z_ = (z_ + h).square() - z1z1 - hh;
    return r;
  }

  Jacobian& operator+=(const Jacobian& o) { return *this = *this + o; }

  AffinePoint to_affine() const {
    if (is_identity()) return {};
    F zi = z_.inverse();
    F zi2 = zi.square();
    return {x_ * zi2, y_ * zi2 * zi, false};
  }

  // Unsigned 4-bit fixed-window multiplication by a little-endian limb array.
  template <std::size_t N>
  Jacobian mul(const std::array<u64, N>& k) const {
    std::array<Jacobian, 16> table;
    table[0] = identity();
    for (std::size_t i = 1; i < 16; ++i) table[i] = table[i - 1] + *this;
    Jacobian acc;
    std::size_t bits = limbs::bit_length(k);
    std::size_t windows = (bits + 3) / 4;
    for (std::size_t w = windows; w-- > 0;) {
      acc = acc.doubled().doubled().doubled().doubled();
      unsigned digit = static_cast<unsigned>((k[(4 * w) / 64] >> ((4 * w) % 64)) & 0xf);
      if (digit != 0) acc += table[digit];
    }
    return acc;
  }

  Jacobian mul(const Fr& k) const { return mul(k.to_canonical()); }

  Jacobian mul_signed(std::int64_t k) const {
    std::array<u64, 1> mag{k < 0 ? static_cast<u64>(-(k + 1)) + 1 : static_cast<u64>(k)};
    Jacobian r = mul(mag);
    return k < 0 ? r.negated() : r;
  }

  // Membership in the prime-order subgroup.
  bool in_subgroup() const { return mul(Fr::modulus()).is_identity(); }

 private:
  F x_;
  F y_;
  F z_;
};

template <class F>
bool on_curve(const Affine<F>& p, const F& b) {
  if (p.infinity) return true;
  return p.y.square() == p.x.square() * p.x + b;
}

// Converts to affine with a single shared inversion.
template <class Curve>
std::vector<Affine<typename Curve::Field>> batch_normalize(std::span<const Jacobian<Curve>> pts) {
  using F = typename Curve::Field;
  std::vector<Affine<F>> out(pts.size());
  std::vector<F> prefix(pts.size());
  F acc = F::one();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    prefix[i] = acc;
    if (!pts[i].is_identity()) acc *= pts[i].z();
  }
  F inv = acc.inverse();
  for (std::size_t i = pts.size(); i-- > 0;) {
    if (pts[i].is_identity()) continue;
    F zi = inv * prefix[i];
    inv *= pts[i].z();
    F zi2 = zi.square();
    out[i] = {pts[i].x() * zi2, pts[i].y() * zi2 * zi, false};
  }
  return out;
}

// Pippenger bucket method over signed scalars. Scalars are canonical values
// modulo r; those above r/2 are treated as negative.
template <class Curve>
Jacobian<Curve> multi_exp(std::span<const Affine<typename Curve::Field>> points,
                          std::span<const Fr::Limbs> scalars) {
  using Point = Jacobian<Curve>;
  using AffineP = Affine<typename Curve::Field>;
  const std::size_t n = points.size();
  if (n == 0) return Point::identity();

  Fr::Limbs half = Fr::modulus();
  limbs::shr1(half);
  std::vector<Fr::Limbs> mags(n);
  std::vector<AffineP> pts(points.begin(), points.end());
  std::size_t max_bits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mags[i] = scalars[i];
    if (!limbs::geq(half, mags[i])) {
      Fr::Limbs m = Fr::modulus();
      limbs::sub(m, mags[i]);
      mags[i] = m;
      pts[i] = pts[i].negated();
    }
    max_bits = std::max(max_bits, limbs::bit_length(mags[i]));
  }
  if (max_bits == 0) return Point::identity();

  std::size_t best_c = 1;
  std::size_t best_cost = SIZE_MAX;
  for (std::size_t c = 1; c <= 16; ++c) {
    std::size_t cost = ((max_bits + c - 1) / c) * (n + (std::size_t{2} << c));
    if (cost < best_cost) {
      best_cost = cost;
      best_c = c;
    }
  }
  const std::size_t c = best_c;
  const std::size_t windows = (max_bits + c - 1) / c;

  auto digit_at = [&](const Fr::Limbs& k, std::size_t lo) {
    std::size_t d = 0;
    for (std::size_t b = 0; b < c && lo + b < 256; ++b) {
      if (limbs::bit(k, lo + b)) d |= std::size_t{1} << b;
    }
    return d;
  };

  Point acc;
  std::vector<Point> buckets((std::size_t{1} << c) - 1);
  for (std::size_t w = windows; w-- > 0;) {
    for (std::size_t s = 0; s < c; ++s) acc = acc.doubled();
    std::fill(buckets.begin(), buckets.end(), Point::identity());
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t d = digit_at(mags[i], w * c);
      if (d != 0) buckets[d - 1] = buckets[d - 1].add_mixed(pts[i]);
    }
    Point running;
    Point sum;
    for (std::size_t b = buckets.size(); b-- > 0;) {
      running += buckets[b];
      sum += running;
    }
    acc += sum;
  }
  return acc;
}

struct G1Curve {
  using Field = Fp;
  static const Fp& b();
  static const Affine<Fp>& generator();
};

struct G2Curve {
  using Field = Fp2;
  static const Fp2& b();
  static const Affine<Fp2>& generator();
};

using G1Jacobian = Jacobian<G1Curve>;
using G2Jacobian = Jacobian<G2Curve>;
using G1Affine = Affine<Fp>;
using G2Affine = Affine<Fp2>;

// k * generator using precomputed 8-bit comb tables.
G1Jacobian g1_mul_generator(const Fr& k);
G2Jacobian g2_mul_generator(const Fr& k);

}  // namespace qfe::bls12_381
