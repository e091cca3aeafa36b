// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include "qfe/pairing/pairing.hpp"

#include <vector>

namespace qfe::bls12_381 {
namespace {

// Running point of the Miller loop in Jacobian coordinates on the twist.
struct TwistPoint {
  Fp2 x;
  Fp2 y;
  Fp2 z;
};

struct LineCoeffs {
  Fp2 c0;
  Fp2 c1;
  Fp2 c2;
};

// Doubling with tangent line (Costello-Lange-Naehrig, Algorithm 26).
LineCoeffs doubling_step(TwistPoint& r) {
  Fp2 tmp0 = r.x.square();
  Fp2 tmp1 = r.y.square();
  Fp2 tmp2 = tmp1.square();
  Fp2 tmp3 = ((tmp1 + r.x).square() - tmp0 - tmp2).doubled();
  Fp2 tmp4 = tmp0.doubled() + tmp0;
  Fp2 tmp6 = r.x + tmp4;
  Fp2 tmp5 = tmp4.square();
  Fp2 zsquared = r.z.square();
  r.x = tmp5 - tmp3 - tmp3;
  r.z = (r.z + r.y).square() - tmp1 - zsquared;
  r.y = (tmp3 - r.x) * tmp4;
  tmp2 = tmp2.doubled().doubled().doubled();
  r.y -= tmp2;
  tmp3 = -(tmp4 * zsquared).doubled();
  tmp6 = tmp6.square() - tmp0 - tmp5;
  tmp1 = tmp1.doubled().doubled();
  tmp6 = tmp6 - tmp1;
  tmp0 = (r.z * zsquared).doubled();
  return {tmp0, tmp3, tmp6};
}

// Addition of an affine twist point with chord line (Algorithm 27).
LineCoeffs addition_step(TwistPoint& r, const G2Affine& q) {
  Fp2 zsquared = r.z.square();
  Fp2 ysquared = q.y.square();
  Fp2 t0 = zsquared * q.x;
  Fp2 t1 = ((q.y + r.z).square() - ysquared - zsquared) * zsquared;
  Fp2 t2 = t0 - r.x;
  Fp2 t3 = t2.square();
  Fp2 t4 = t3.doubled().doubled();
  Fp2 t5 = t4 * t2;
  Fp2 t6 = t1 - r.y - r.y;
  Fp2 t9 = t6 * q.x;
  Fp2 t7 = t4 * r.x;
  r.x = t6.square() - t5 - t7 - t7;
  r.z = (r.z + t2).square() - zsquared - t3;
  Fp2 t10 = q.y + r.z;
  Fp2 t8 = (t7 - r.x) * t6;
  t0 = (r.y * t5).doubled();
  r.y = t8 - t0;
  t10 = t10.square() - ysquared;
  Fp2 ztsquared = r.z.square();
  t10 = t10 - ztsquared;
  t9 = t9.doubled() - t10;
  t10 = r.z.doubled();
  t6 = -t6;
  t1 = t6.doubled();
  return {t10, t1, t9};
}

Fp12 ell(const Fp12& f, const LineCoeffs& c, const G1Affine& p) {
  Fp2 c0 = c.c0 * p.y;
  Fp2 c1 = c.c1 * p.x;
  return f.mul_by_014(c.c2, c1, c0);
}

// Fp4 squaring helper for cyclotomic squaring.
std::pair<Fp2, Fp2> fp4_square(const Fp2& a, const Fp2& b) {
  Fp2 t0 = a.square();
  Fp2 t1 = b.square();
  Fp2 c0 = t1.mul_by_nonresidue() + t0;
  Fp2 c1 = (a + b).square() - t0 - t1;
  return {c0, c1};
}

// Granger-Scott squaring, valid in the cyclotomic subgroup.
Fp12 cyclotomic_square(const Fp12& f) {
  Fp2 z0 = f.c0.c0;
  Fp2 z4 = f.c0.c1;
  Fp2 z3 = f.c0.c2;
  Fp2 z2 = f.c1.c0;
  Fp2 z1 = f.c1.c1;
  Fp2 z5 = f.c1.c2;

  auto [t0, t1] = fp4_square(z0, z1);
  z0 = t0 - z0;
  z0 = z0.doubled() + t0;
  z1 = t1 + z1;
  z1 = z1.doubled() + t1;

  auto [s0, s1] = fp4_square(z2, z3);
  auto [s2, s3] = fp4_square(z4, z5);
  z4 = s0 - z4;
  z4 = z4.doubled() + s0;
  z5 = s1 + z5;
  z5 = z5.doubled() + s1;

  Fp2 u = s3.mul_by_nonresidue();
  z2 = u + z2;
  z2 = z2.doubled() + u;
  z3 = s2 - z3;
  z3 = z3.doubled() + s2;

  return {{z0, z4, z3}, {z2, z1, z5}};
}

// f^x for the (negative) curve parameter x.
Fp12 cyclotomic_exp(const Fp12& f) {
  Fp12 tmp = Fp12::one();
  bool found_one = false;
  for (int b = 63; b >= 0; --b) {
    bool bit = (kBlsX >> b) & 1;
    if (found_one) {
      tmp = cyclotomic_square(tmp);
    } else {
      found_one = bit;
    }
    if (bit) tmp *= f;
  }
  return tmp.conjugate();
}

Fp12 easy_part(const Fp12& f) {
  // f^((p^6 - 1)(p^2 + 1))
  Fp12 t = f.conjugate() * f.inverse();
  return t.frobenius(2) * t;
}

}  // namespace

Fp12 multi_miller_loop(std::span<const PairingTerm> terms) {
  std::vector<const PairingTerm*> active;
  std::vector<TwistPoint> r;
  for (const auto& t : terms) {
    if (t.first.infinity || t.second.infinity) continue;
    active.push_back(&t);
    r.push_back({t.second.x, t.second.y, Fp2::one()});
  }
  Fp12 f = Fp12::one();
  if (active.empty()) return f;

  const u64 loop = kBlsX >> 1;
  bool found_one = false;
  for (int b = 63; b >= 0; --b) {
    bool bit = (loop >> b) & 1;
    if (!found_one) {
      found_one = bit;
      continue;
    }
    for (std::size_t i = 0; i < active.size(); ++i) {
      f = ell(f, doubling_step(r[i]), active[i]->first);
    }
    if (bit) {
      for (std::size_t i = 0; i < active.size(); ++i) {
        f = ell(f, addition_step(r[i], active[i]->second), active[i]->first);
      }
    }
    f = f.square();
  }
  for (std::size_t i = 0; i < active.size(); ++i) {
    f = ell(f, doubling_step(r[i]), active[i]->first);
  }
  return f.conjugate();
}

Fp12 final_exponentiation(const Fp12& f) {
  Fp12 t2 = easy_part(f);
  Fp12 t1 = cyclotomic_square(t2).conjugate();
  Fp12 t3 = cyclotomic_exp(t2);
  Fp12 t4 = cyclotomic_square(t3);
  Fp12 t5 = t1 * t3;
  t1 = cyclotomic_exp(t5);
  Fp12 t0 = cyclotomic_exp(t1);
  Fp12 t6 = cyclotomic_exp(t0);
  t6 *= t4;
  t4 = cyclotomic_exp(t6);
  t5 = t5.conjugate();
  t4 *= t5 * t2;
  t5 = t2.conjugate();
  t1 *= t2;
  t1 = t1.frobenius(3);
  t6 *= t5;
  t6 = t6.frobenius();
  t3 *= t0;
  t3 = t3.frobenius(2);
  t3 *= t1;
  t3 *= t6;
  return t3 * t4;
}

Fp12 final_exponentiation_reference(const Fp12& f) {
  // (p^4 - p^2 + 1) / r, little-endian limbs.
  static const std::array<u64, 20> kHardExponent = [] {
    const char* hex =
        "f686b3d807d01c0bd38c3195c899ed3cde88eeb996ca394506632528d6a9a2f230063cf081517f68f7764c28b6f8ae5a"
        "72bce8d63cb9f827eca0ba621315b2076995003fc77a17988f8761bdc51dc2378b9039096d1b767f17fcbde783765915"
        "c97f36c6f18212ed0b283ed237db421d160aeb6a1e79983774940996754c8c71a2629b0dea236905ce937335d5b68fa9"
        "912aae208ccf1e516c3f438e3ba79";
    std::array<u64, 20> l{};
    std::size_t len = 0;
    while (hex[len] != '\0') ++len;
    for (std::size_t i = 0; i < len; ++i) {
      char ch = hex[len - 1 - i];
      u64 nib = (ch >= '0' && ch <= '9') ? static_cast<u64>(ch - '0')
                                         : static_cast<u64>(ch - 'a' + 10);
      l[i / 16] |= nib << (4 * (i % 16));
    }
    return l;
  }();
  return easy_part(f).pow(kHardExponent);
}

Fp12 pairing(const G1Affine& p, const G2Affine& q) {
  PairingTerm t{p, q};
  return final_exponentiation(multi_miller_loop(std::span<const PairingTerm>(&t, 1)));
}

Fp12 multi_pairing(std::span<const PairingTerm> terms) {
  return final_exponentiation(multi_miller_loop(terms));
}

}  // namespace qfe::bls12_381
