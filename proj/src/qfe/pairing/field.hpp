// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

// Prime fields in Montgomery form over 64-bit limbs.
//
// Elements are always fully reduced, so two equal field values share one
// limb representation. Hashing the Montgomery limbs directly is therefore
// sound (the discrete-log tables rely on this).

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <type_traits>

#if defined(__x86_64__)
#include <immintrin.h>
#endif

namespace qfe::bls12_381 {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

namespace limbs {

template <std::size_t N>
constexpr bool geq(const std::array<u64, N>& a, const std::array<u64, N>& b) {
  for (std::size_t i = N; i-- > 0;) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return true;
}

template <std::size_t N>
constexpr u64 add(std::array<u64, N>& a, const std::array<u64, N>& b) {
#if defined(__x86_64__)
  if (!std::is_constant_evaluated()) {
    unsigned char c = 0;
    for (std::size_t i = 0; i < N; ++i) {
      unsigned long long out;
      c = _addcarry_u64(c, a[i], b[i], &out);
      a[i] = out;
    }
    return c;
  }
#endif
  u64 carry = 0;
  for (std::size_t i = 0; i < N; ++i) {
    u128 t = static_cast<u128>(a[i]) + b[i] + carry;
    a[i] = static_cast<u64>(t);
    carry = static_cast<u64>(t >> 64);
  }
  return carry;
}

template <std::size_t N>
constexpr u64 sub(std::array<u64, N>& a, const std::array<u64, N>& b) {
#if defined(__x86_64__)
  if (!std::is_constant_evaluated()) {
    unsigned char c = 0;
    for (std::size_t i = 0; i < N; ++i) {
      unsigned long long out;
      c = _subborrow_u64(c, a[i], b[i], &out);
      a[i] = out;
    }
    return c;
  }
#endif
  u64 borrow = 0;
  for (std::size_t i = 0; i < N; ++i) {
    u128 t = static_cast<u128>(a[i]) - b[i] - borrow;
    a[i] = static_cast<u64>(t);
    borrow = static_cast<u64>(t >> 64) & 1;
  }
  return borrow;
}

template <std::size_t N>
constexpr bool is_zero(const std::array<u64, N>& a) {
  for (u64 v : a) {
    if (v != 0) return false;
  }
  return true;
}

template <std::size_t N>
constexpr bool bit(const std::array<u64, N>& a, std::size_t i) {
  return (a[i / 64] >> (i % 64)) & 1;
}

template <std::size_t N>
constexpr std::size_t bit_length(const std::array<u64, N>& a) {
  for (std::size_t i = N; i-- > 0;) {
    if (a[i] != 0) return i * 64 + (64 - static_cast<std::size_t>(__builtin_clzll(a[i])));
  }
  return 0;
}

// a >>= 1
template <std::size_t N>
constexpr void shr1(std::array<u64, N>& a) {
  for (std::size_t i = 0; i < N; ++i) {
    a[i] >>= 1;
    if (i + 1 < N) a[i] |= a[i + 1] << 63;
  }
}

// Divides in place by a small divisor, returns the remainder.
template <std::size_t N>
constexpr u64 div_small(std::array<u64, N>& a, u64 d) {
  u128 rem = 0;
  for (std::size_t i = N; i-- > 0;) {
    u128 cur = (rem << 64) | a[i];
    a[i] = static_cast<u64>(cur / d);
    rem = cur % d;
  }
  return static_cast<u64>(rem);
}

}  // namespace limbs

// Params must provide kLimbs, kModulus, kR2 (R^2 mod m), kOne (R mod m),
// and kInv (-m^{-1} mod 2^64). The modulus must leave the top bit of the
// highest limb clear.
template <class Params>
class MontgomeryField {
 public:
  static constexpr std::size_t kLimbs = Params::kLimbs;
  static constexpr std::size_t kBytes = kLimbs * 8;
  using Limbs = std::array<u64, kLimbs>;

  constexpr MontgomeryField() = default;

  static constexpr MontgomeryField zero() { return MontgomeryField(); }
  static constexpr MontgomeryField one() { return from_raw(Params::kOne); }

  static constexpr MontgomeryField from_raw(const Limbs& mont) {
    MontgomeryField f;
    f.v_ = mont;
    return f;
  }

  static constexpr const Limbs& modulus() { return Params::kModulus; }

  // Requires canonical < modulus.
  static constexpr MontgomeryField from_canonical(const Limbs& canonical) {
    return from_raw(canonical) * from_raw(Params::kR2);
  }

  static constexpr MontgomeryField from_u64(u64 v) {
    Limbs l{};
    l[0] = v;
    return from_canonical(l);
  }

  // Negative values map to modulus - |v|.
  static constexpr MontgomeryField from_i64(std::int64_t v) {
    if (v >= 0) return from_u64(static_cast<u64>(v));
    return -from_u64(static_cast<u64>(-(v + 1)) + 1);
  }

  constexpr Limbs to_canonical() const {
    Limbs one{};
    one[0] = 1;
    return (*this * from_raw(one)).v_;
  }

  constexpr const Limbs& raw() const { return v_; }

  constexpr bool is_zero() const { return limbs::is_zero(v_); }
  constexpr bool is_one() const { return v_ == Params::kOne; }

  friend constexpr bool operator==(const MontgomeryField& a, const MontgomeryField& b) {
    return a.v_ == b.v_;
  }

  friend constexpr MontgomeryField operator+(MontgomeryField a, const MontgomeryField& b) {
    limbs::add(a.v_, b.v_);
    a.reduce_once();
    return a;
  }

  friend constexpr MontgomeryField operator-(MontgomeryField a, const MontgomeryField& b) {
    if (limbs::sub(a.v_, b.v_)) limbs::add(a.v_, Params::kModulus);
    return a;
  }

  constexpr MontgomeryField operator-() const {
    if (is_zero()) return *this;
    MontgomeryField r = from_raw(Params::kModulus);
    limbs::sub(r.v_, v_);
    return r;
  }

  // CIOS Montgomery multiplication without the extra carry word; valid
  // because the modulus leaves the top limb below 2^63 - 1.
  friend constexpr MontgomeryField operator*(const MontgomeryField& a, const MontgomeryField& b) {
    constexpr std::size_t N = kLimbs;
    const auto& q = Params::kModulus;
    u64 t[N] = {};
#pragma GCC unroll 8
    for (std::size_t i = 0; i < N; ++i) {
      u128 s = static_cast<u128>(a.v_[0]) * b.v_[i] + t[0];
      u64 hi_a = static_cast<u64>(s >> 64);
      u64 t0 = static_cast<u64>(s);
      u64 m = t0 * Params::kInv;
      u128 r = static_cast<u128>(m) * q[0] + t0;
      u64 hi_c = static_cast<u64>(r >> 64);
#pragma GCC unroll 8
      for (std::size_t j = 1; j < N; ++j) {
        s = static_cast<u128>(a.v_[j]) * b.v_[i] + t[j] + hi_a;
        hi_a = static_cast<u64>(s >> 64);
        r = static_cast<u128>(m) * q[j] + static_cast<u64>(s) + hi_c;
        hi_c = static_cast<u64>(r >> 64);
        t[j - 1] = static_cast<u64>(r);
      }
      t[N - 1] = hi_c + hi_a;
    }
    MontgomeryField out;
    for (std::size_t i = 0; i < N; ++i) out.v_[i] = t[i];
    out.reduce_once();
    return out;
  }

  constexpr MontgomeryField& operator+=(const MontgomeryField& o) { return *this = *this + o; }
  constexpr MontgomeryField& operator-=(const MontgomeryField& o) { return *this = *this - o; }
  constexpr MontgomeryField& operator*=(const MontgomeryField& o) { return *this = *this * o; }

  constexpr MontgomeryField square() const { return *this * *this; }
  constexpr MontgomeryField doubled() const { return *this + *this; }

  template <std::size_t M>
  constexpr MontgomeryField pow(const std::array<u64, M>& exp) const {
    MontgomeryField acc = one();
    for (std::size_t i = limbs::bit_length(exp); i-- > 0;) {
      acc = acc.square();
      if (limbs::bit(exp, i)) acc *= *this;
    }
    return acc;
  }

  // Fermat inversion; the inverse of zero is zero.
  constexpr MontgomeryField inverse() const {
    Limbs e = Params::kModulus;
    Limbs two{};
    two[0] = 2;
    limbs::sub(e, two);
    return pow(e);
  }

  // Square root for moduli congruent to 3 mod 4.
  std::optional<MontgomeryField> sqrt() const {
    static_assert(Params::kModulus[0] % 4 == 3);
    Limbs e = Params::kModulus;
    Limbs one_l{};
    one_l[0] = 1;
    limbs::add(e, one_l);
    limbs::shr1(e);
    limbs::shr1(e);
    MontgomeryField r = pow(e);
    if (r.square() == *this) return r;
    return std::nullopt;
  }

  // True when the canonical value exceeds (modulus - 1) / 2.
  bool lexicographically_largest() const {
    Limbs half = Params::kModulus;
    limbs::shr1(half);  // (m - 1) / 2 for odd m
    Limbs c = to_canonical();
    return !limbs::geq(half, c);
  }

  static std::optional<MontgomeryField> from_bytes_be(std::span<const std::uint8_t> in) {
    if (in.size() != kBytes) return std::nullopt;
    Limbs l{};
    for (std::size_t i = 0; i < kBytes; ++i) {
      std::size_t limb = (kBytes - 1 - i) / 8;
      l[limb] = (l[limb] << 8) | in[i];
    }
    if (limbs::geq(l, Params::kModulus)) return std::nullopt;
    return from_canonical(l);
  }

  void to_bytes_be(std::span<std::uint8_t> out) const {
    Limbs c = to_canonical();
    for (std::size_t i = 0; i < kBytes; ++i) {
      std::size_t limb = (kBytes - 1 - i) / 8;
      std::size_t shift = 8 * ((kBytes - 1 - i) % 8);
      out[i] = static_cast<std::uint8_t>(c[limb] >> shift);
    }
  }

 private:
  // Subtracts the modulus when the value is in [m, 2m).
  constexpr void reduce_once() {
    Limbs t = v_;
    if (limbs::sub(t, Params::kModulus) == 0) v_ = t;
  }

  Limbs v_{};
};

struct FpParams {
  static constexpr std::size_t kLimbs = 6;
  static constexpr std::array<u64, 6> kModulus{
      0xb9feffffffffaaabULL, 0x1eabfffeb153ffffULL, 0x6730d2a0f6b0f624ULL,
      0x64774b84f38512bfULL, 0x4b1ba7b6434bacd7ULL, 0x1a0111ea397fe69aULL};
  static constexpr std::array<u64, 6> kR2{
      0xf4df1f341c341746ULL, 0x0a76e6a609d104f1ULL, 0x8de5476c4c95b6d5ULL,
      0x67eb88a9939d83c0ULL, 0x9a793e85b519952dULL, 0x11988fe592cae3aaULL};
  static constexpr std::array<u64, 6> kOne{
      0x760900000002fffdULL, 0xebf4000bc40c0002ULL, 0x5f48985753c758baULL,
      0x77ce585370525745ULL, 0x5c071a97a256ec6dULL, 0x15f65ec3fa80e493ULL};
  static constexpr u64 kInv = 0x89f3fffcfffcfffdULL;
};

struct FrParams {
  static constexpr std::size_t kLimbs = 4;
  static constexpr std::array<u64, 4> kModulus{
      0xffffffff00000001ULL, 0x53bda402fffe5bfeULL, 0x3339d80809a1d805ULL,
      0x73eda753299d7d48ULL};
  static constexpr std::array<u64, 4> kR2{
      0xc999e990f3f29c6dULL, 0x2b6cedcb87925c23ULL, 0x05d314967254398fULL,
      0x0748d9d99f59ff11ULL};
  static constexpr std::array<u64, 4> kOne{
      0x00000001fffffffeULL, 0x5884b7fa00034802ULL, 0x998c4fefecbc4ff5ULL,
      0x1824b159acc5056fULL};
  static constexpr u64 kInv = 0xfffffffeffffffffULL;
};

// Base field of BLS12-381.
using Fp = MontgomeryField<FpParams>;
// Scalar field (the prime group order r).
using Fr = MontgomeryField<FrParams>;

// |x| for the curve parameter x = -0xd201000000010000.
inline constexpr u64 kBlsX = 0xd201000000010000ULL;

}  // namespace qfe::bls12_381
