// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include "qfe/pairing/curve.hpp"

#include <array>

namespace qfe::bls12_381 {
namespace {

Fp fp_hex(const char* hex) {
  Fp::Limbs l{};
  std::size_t len = 0;
  while (hex[len] != '\0') ++len;
  for (std::size_t i = 0; i < len; ++i) {
    char ch = hex[len - 1 - i];
    u64 nib = (ch >= '0' && ch <= '9') ? static_cast<u64>(ch - '0')
                                       : static_cast<u64>((ch | 0x20) - 'a' + 10);
    l[i / 16] |= nib << (4 * (i % 16));
  }
  return Fp::from_canonical(l);
}

// Comb table: entry [w][k - 1] holds k * 2^(8w) * G in affine form.
template <class Curve>
class GeneratorTable {
 public:
  static constexpr std::size_t kWindows = 32;

  GeneratorTable() {
    using Point = Jacobian<Curve>;
    std::vector<Point> all;
    all.reserve(kWindows * 255);
    Point base = Point::generator();
    for (std::size_t w = 0; w < kWindows; ++w) {
      Point acc = base;
      for (std::size_t k = 1; k <= 255; ++k) {
        all.push_back(acc);
        acc = acc + base;
      }
      base = acc;  // 256 * base
    }
    entries_ = batch_normalize<Curve>(all);
  }

  Jacobian<Curve> mul(const Fr& k) const {
    auto c = k.to_canonical();
    Jacobian<Curve> acc;
    for (std::size_t w = 0; w < kWindows; ++w) {
      unsigned byte = static_cast<unsigned>((c[w / 8] >> (8 * (w % 8))) & 0xff);
      if (byte != 0) acc = acc.add_mixed(entries_[w * 255 + byte - 1]);
    }
    return acc;
  }

 private:
  std::vector<Affine<typename Curve::Field>> entries_;
};

}  // namespace

const Fp& G1Curve::b() {
  static const Fp b = Fp::from_u64(4);
  return b;
}

const Affine<Fp>& G1Curve::generator() {
  static const Affine<Fp> g{
      fp_hex("17f1d3a73197d7942695638c4fa9ac0fc3688c4f9774b905a14e3a3f171bac586c55e83ff97a1aeffb3af00adb22c6bb"),
      fp_hex("08b3f481e3aaa0f1a09e30ed741d8ae4fcf5e095d5d00af600db18cb2c04b3edd03cc744a2888ae40caa232946c5e7e1"),
      false};
  return g;
}

const Fp2& G2Curve::b() {
  static const Fp2 b{Fp::from_u64(4), Fp::from_u64(4)};
  return b;
}

const Affine<Fp2>& G2Curve::generator() {
  static const Affine<Fp2> g{
      {fp_hex("024aa2b2f08f0a91260805272dc51051c6e47ad4fa403b02b4510b647ae3d1770bac0326a805bbefd48056c8c121bdb8"),
       fp_hex("13e02b6052719f607dacd3a088274f65596bd0d09920b61ab5da61bbdc7f5049334cf11213945d57e5ac7d055d042b7e")},
      {fp_hex("0ce5d527727d6e118cc9cdc6da2e351aadfd9baa8cbdd3a76d429a695160d12c923ac9cc3baca289e193548608b82801"),
       fp_hex("0606c4a02ea734cc32acd2b02bc28b99cb3e287e85a763af267492ab572e99ab3f370d275cec1da1aaa9075ff05f79be")},
      false};
  return g;
}

G1Jacobian g1_mul_generator(const Fr& k) {
  static const GeneratorTable<G1Curve> table;
  return table.mul(k);
}

G2Jacobian g2_mul_generator(const Fr& k) {
  static const GeneratorTable<G2Curve> table;
  return table.mul(k);
}

}  // namespace qfe::bls12_381
