// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include "qfe/pairing/tower.hpp"

namespace qfe::bls12_381 {
namespace {

using FpLimbs = Fp::Limbs;

// (p - 1) / k for small k dividing p - 1.
FpLimbs p_minus_one_over(u64 k) {
  FpLimbs e = Fp::modulus();
  FpLimbs one{};
  one[0] = 1;
  limbs::sub(e, one);
  limbs::div_small(e, k);
  return e;
}

struct FrobeniusConstants {
  Fp2 v1;   // xi^((p-1)/3)
  Fp2 v2;   // xi^(2(p-1)/3)
  Fp2 w1;   // xi^((p-1)/6)

  FrobeniusConstants() {
    const Fp2 xi{Fp::one(), Fp::one()};
    v1 = xi.pow(p_minus_one_over(3));
    v2 = v1.square();
    w1 = xi.pow(p_minus_one_over(6));
  }
};

const FrobeniusConstants& frobenius_constants() {
  static const FrobeniusConstants c;
  return c;
}

}  // namespace

std::optional<Fp2> Fp2::sqrt() const {
  if (is_zero()) return Fp2::zero();
  FpLimbs e = Fp::modulus();
  FpLimbs three{};
  three[0] = 3;
  limbs::sub(e, three);
  limbs::shr1(e);
  limbs::shr1(e);  // (p - 3) / 4
  Fp2 a1 = pow(e);
  Fp2 alpha = a1 * (a1 * *this);
  Fp2 x0 = a1 * *this;
  const Fp2 minus_one = -Fp2::one();
  Fp2 x;
  if (alpha == minus_one) {
    x = Fp2{Fp::zero(), Fp::one()} * x0;
  } else {
    Fp2 b = (Fp2::one() + alpha).pow(p_minus_one_over(2));
    x = b * x0;
  }
  if (x.square() == *this) return x;
  return std::nullopt;
}

Fp6 Fp6::frobenius() const {
  const auto& k = frobenius_constants();
  return {c0.frobenius(), c1.frobenius() * k.v1, c2.frobenius() * k.v2};
}

Fp12 Fp12::frobenius() const {
  const auto& k = frobenius_constants();
  Fp6 a = c0.frobenius();
  Fp6 b = c1.frobenius();
  return {a, {b.c0 * k.w1, b.c1 * k.w1, b.c2 * k.w1}};
}

}  // namespace qfe::bls12_381
