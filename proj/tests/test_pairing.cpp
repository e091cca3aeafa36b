// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include <vector>

#include "doctest.h"
#include "qfe/pairing/dlog.hpp"
#include "qfe/pairing/group.hpp"

using namespace qfe;

namespace {

std::string hex(std::span<const std::uint8_t> b) { return to_hex(b); }

}  // namespace

TEST_CASE("field arithmetic sanity") {
  using bls12_381::Fp;
  using bls12_381::Fp2;
  using bls12_381::Fp12;
  Fp a = Fp::from_u64(123456789);
  CHECK(a * a.inverse() == Fp::one());
  CHECK((-a) + a == Fp::zero());
  CHECK(Fp::from_i64(-5) + Fp::from_u64(5) == Fp::zero());
  auto r = (a.square()).sqrt();
  REQUIRE(r.has_value());
  CHECK((*r == a || *r == -a));

  Fp2 b{Fp::from_u64(7), Fp::from_u64(11)};
  CHECK(b * b.inverse() == Fp2::one());
  auto s = b.square().sqrt();
  REQUIRE(s.has_value());
  CHECK((*s == b || *s == -b));

  // Frobenius is the p-th power map.
  Fp12 f = setup().gt.value();
  CHECK(f.frobenius() == f.pow(Fp::modulus()));
}

TEST_CASE("setup is deterministic and consistent") {
  const GroupContext& a = setup();
  const GroupContext& b = setup();
  CHECK(a.g1.to_bytes() == b.g1.to_bytes());
  CHECK(a.g2.to_bytes() == b.g2.to_bytes());
  CHECK(a.gt.to_bytes() == b.gt.to_bytes());
  CHECK(pair(a.g1, a.g2) == a.gt);
  CHECK(!a.gt.is_identity());
  CHECK(a.gt.pow(Scalar::from_i64(0)).is_identity());
  CHECK(hex(a.group_order) == "73eda753299d7d483339d80809a1d80553bda402fffe5bfeffffffff00000001");
  // The target generator has order r.
  bls12_381::Fr::Limbs r = bls12_381::Fr::modulus();
  CHECK(a.gt.value().pow(r).is_one());
}

TEST_CASE("compressed encodings match the independent affine oracle") {
  // Expected values from tests/oracles/bls_vectors.py.
  CHECK(hex(G1Point::generator().to_bytes()) ==
        "97f1d3a73197d7942695638c4fa9ac0fc3688c4f9774b905a14e3a3f171bac586c55e83ff97a1aeffb3af00adb22c6bb");
  CHECK(hex(G1Point::base_mul(Scalar::from_i64(5)).to_bytes()) ==
        "b0e7791fb972fe014159aa33a98622da3cdc98ff707965e536d8636b5fcc5ac7a91a8c46e59a00dca575af0f18fb13dc");
  CHECK(hex(G2Point::generator().to_bytes()) ==
        "93e02b6052719f607dacd3a088274f65596bd0d09920b61ab5da61bbdc7f5049334cf11213945d57e5ac7d055d042b7e"
        "024aa2b2f08f0a91260805272dc51051c6e47ad4fa403b02b4510b647ae3d1770bac0326a805bbefd48056c8c121bdb8");
  CHECK(hex(G2Point::base_mul(Scalar::from_i64(5)).to_bytes()) ==
        "80fb837804dba8213329db46608b6c121d973363c1234a86dd183baff112709cf97096c5e9a1a770ee9d7dc641a894d6"
        "0411a5de6730ffece671a9f21d65028cc0f1102378de124562cb1ff49db6f004fcd14d683024b0548eff3d1468df2688");

  // 2^100 + 7 exercises the comb table and the generic ladder.
  Scalar k = Scalar::one();
  for (int i = 0; i < 100; ++i) k = k + k;
  k = k + Scalar::from_i64(7);
  const char* g1k = "b68b4ab32a2d26c22f46aa5d3abd8ed8b62baa13e3267c33ad89c70fa3809b5ba3d5b0b49da701e767638bd33283f693";
  CHECK(hex(G1Point::base_mul(k).to_bytes()) == g1k);
  CHECK(hex(G1Point::generator().mul(k).to_bytes()) == g1k);
  const char* g2k =
      "b7e5d0d509ada15fd08f91c1b0547f4b07e060bfddbd7e0e3bff07a222a51515537d99a22c11d191bf01071e492eaa63"
      "0677dbd06fee5fe80c7b22b0da9d7e0fe239a35db82a443f6b1976215e61aa57dfad13be7afd884e8153e328440754d4";
  CHECK(hex(G2Point::base_mul(k).to_bytes()) == g2k);
  CHECK(hex(G2Point::generator().mul(k).to_bytes()) == g2k);
}

TEST_CASE("pairing examples") {
  const auto& ctx = setup();
  SUBCASE("identity maps to identity") {
    CHECK(pair(G1Point::identity(), ctx.g2).is_identity());
    CHECK(pair(ctx.g1, G2Point::identity()).is_identity());
  }
  SUBCASE("pair(g1^3, g2^5) == gt^15") {
    auto lhs = pair(G1Point::base_mul(Scalar::from_i64(3)), G2Point::base_mul(Scalar::from_i64(5)));
    CHECK(lhs == ctx.gt.pow(std::int64_t{15}));
  }
  SUBCASE("pair(g1^2, g2^3) == gt^6") {
    auto lhs = pair(G1Point::base_mul(Scalar::from_i64(2)), G2Point::base_mul(Scalar::from_i64(3)));
    CHECK(lhs == ctx.gt.pow(std::int64_t{6}));
  }
  SUBCASE("additivity in the first argument") {
    auto lhs = pair(G1Point::base_mul(Scalar::from_i64(7)), ctx.g2) *
               pair(G1Point::base_mul(Scalar::from_i64(11)), ctx.g2);
    CHECK(lhs == pair(G1Point::base_mul(Scalar::from_i64(18)), ctx.g2));
  }
  SUBCASE("negative exponents") {
    auto lhs = pair(G1Point::base_mul(Scalar::from_i64(-4)), ctx.g2);
    CHECK(lhs == ctx.gt.pow(std::int64_t{-4}));
    CHECK(lhs * ctx.gt.pow(std::int64_t{4}) == GtPoint::identity());
  }
}

TEST_CASE("final exponentiation chain is the cube of the reference") {
  using namespace bls12_381;
  PairingTerm t{G1Curve::generator(), G2Curve::generator()};
  Fp12 ml = multi_miller_loop(std::span<const PairingTerm>(&t, 1));
  Fp12 ref = final_exponentiation_reference(ml);
  CHECK(final_exponentiation(ml) == ref.pow(std::array<u64, 1>{3}));
  CHECK(ref.pow(Fr::modulus()).is_one());
}

TEST_CASE("property: bilinearity on random exponents") {
  Rng rng = Rng::from_seed(7);
  const auto& ctx = setup();
  for (int i = 0; i < 100; ++i) {
    Scalar a = Scalar::random(rng);
    Scalar b = Scalar::random(rng);
    GtPoint lhs = pair(G1Point::base_mul(a), G2Point::base_mul(b));
    CHECK(lhs == ctx.gt.pow(a * b));
  }
}

TEST_CASE("pair_product equals the product of single pairings") {
  Rng rng = Rng::from_seed(8);
  std::vector<std::pair<G1Point, G2Point>> terms;
  GtPoint expected;
  for (int i = 0; i < 5; ++i) {
    auto p = G1Point::base_mul(Scalar::random(rng));
    auto q = G2Point::base_mul(Scalar::random(rng));
    terms.emplace_back(p, q);
    expected *= pair(p, q);
  }
  terms.emplace_back(G1Point::identity(), setup().g2);
  CHECK(pair_product(terms) == expected);
}

TEST_CASE("multi_exp_combine") {
  Rng rng = Rng::from_seed(11);
  SUBCASE("all-zero coefficients give the identity") {
    std::vector<G1Point> pts{G1Point::base_mul(Scalar::random(rng)), G1Point::base_mul(Scalar::random(rng))};
    std::vector<std::int64_t> zeros{0, 0};
    CHECK(multi_exp_combine(pts, zeros).is_identity());
  }
  SUBCASE("single point with coefficient one") {
    std::vector<G2Point> pts{G2Point::base_mul(Scalar::random(rng))};
    std::vector<std::int64_t> one{1};
    CHECK(multi_exp_combine(pts, one) == pts[0]);
  }
  SUBCASE("signed coefficients match the naive loop") {
    std::vector<G1Point> pts;
    for (int i = 0; i < 4; ++i) pts.push_back(G1Point::base_mul(Scalar::random(rng)));
    std::vector<std::int64_t> c{1, -2, 3, 5};
    G1Point naive;
    for (std::size_t i = 0; i < pts.size(); ++i) naive = naive + pts[i].mul(Scalar::from_i64(c[i]));
    CHECK(multi_exp_combine(pts, c) == naive);
  }
  SUBCASE("length mismatch") {
    std::vector<G1Point> pts{setup().g1};
    std::vector<std::int64_t> c{1, 2};
    CHECK_THROWS_AS(multi_exp_combine(pts, c), ArgumentError);
  }
}

TEST_CASE("property: multi_exp_combine equals the naive product") {
  Rng rng = Rng::from_seed(12);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t len = 1 + rng.below(32);
    std::vector<G1Point> pts;
    std::vector<Scalar> ks;
    G1Point naive;
    for (std::size_t i = 0; i < len; ++i) {
      pts.push_back(G1Point::base_mul(Scalar::random(rng)));
      // Mix full-width and small signed coefficients.
      Scalar k = (trial % 2 == 0) ? Scalar::random(rng)
                                  : Scalar::from_i64(static_cast<std::int64_t>(rng.below(41)) - 20);
      ks.push_back(k);
      naive = naive + pts.back().mul(k);
    }
    CHECK(multi_exp_combine(pts, ks) == naive);
  }
  for (int trial = 0; trial < 10; ++trial) {
    std::size_t len = 1 + rng.below(32);
    std::vector<G2Point> pts;
    std::vector<std::int64_t> ks;
    G2Point naive;
    for (std::size_t i = 0; i < len; ++i) {
      pts.push_back(G2Point::base_mul(Scalar::random(rng)));
      ks.push_back(static_cast<std::int64_t>(rng.below(2001)) - 1000);
      naive = naive + pts.back().mul(Scalar::from_i64(ks.back()));
    }
    CHECK(multi_exp_combine(pts, ks) == naive);
  }
}

TEST_CASE("dlog_bounded examples") {
  const GtPoint& base = setup().gt;
  CHECK(dlog_bounded(GtPoint::identity(), base, 0) == 0);
  CHECK(dlog_bounded(GtPoint::identity(), base, 12345) == 0);

  // Brute-force oracle for v = -7 over [-100, 100].
  GtPoint target = base.pow(std::int64_t{-7});
  std::int64_t brute = 1000;
  for (std::int64_t v = -100; v <= 100; ++v) {
    if (base.pow(v) == target) brute = v;
  }
  REQUIRE(brute == -7);
  CHECK(dlog_bounded(target, base, 100) == brute);

  CHECK(dlog_bounded(base.pow(std::int64_t{54321}), base, std::int64_t{1} << 20) == 54321);
  CHECK(dlog_bounded(base.pow(std::int64_t{-(1 << 20)}), base, std::int64_t{1} << 20) == -(1 << 20));
}

TEST_CASE("dlog_bounded rejects exponents outside the window") {
  const GtPoint& base = setup().gt;
  CHECK_THROWS_AS(dlog_bounded(base.pow(std::int64_t{101}), base, 100), DlogRangeError);
  CHECK_THROWS_AS(dlog_bounded(base.pow(std::int64_t{-101}), base, 100), DlogRangeError);
  CHECK_THROWS_AS(dlog_bounded(base, base, -1), ArgumentError);
  // A random element is (overwhelmingly) outside any small window.
  Rng rng = Rng::from_seed(5);
  CHECK_THROWS_AS(dlog_bounded(base.pow(Scalar::random(rng)), base, 1000), DlogRangeError);
}

TEST_CASE("property: dlog_bounded recovers a dense sample of the window") {
  const GtPoint& base = setup().gt;
  const std::int64_t bound = 10000;
  auto table = bsgs_table(base, bound);
  CHECK(table->baby_steps() == 142);  // ceil(sqrt(20001))
  GtPoint cur = base.pow(-bound);
  int checked = 0;
  for (std::int64_t v = -bound; v <= bound; ++v, cur *= base) {
    if (v % 7 != 0 && std::abs(v) < bound - 3 && std::abs(v) > 3) continue;
    CHECK(table->solve(cur) == v);
    ++checked;
  }
  CHECK(checked > 2800);
}

TEST_CASE("serialization round trips and rejects malformed input") {
  Rng rng = Rng::from_seed(21);
  for (int i = 0; i < 20; ++i) {
    Scalar s = Scalar::random(rng);
    CHECK(Scalar::from_bytes(s.to_bytes()) == s);
    G1Point p = G1Point::base_mul(s);
    CHECK(G1Point::from_bytes(p.to_bytes()) == p);
    G2Point q = G2Point::base_mul(s);
    CHECK(G2Point::from_bytes(q.to_bytes()) == q);
  }
  CHECK(G1Point::from_bytes(G1Point::identity().to_bytes()).is_identity());
  CHECK(G2Point::from_bytes(G2Point::identity().to_bytes()).is_identity());
  GtPoint t = setup().gt.pow(Scalar::random(rng));
  CHECK(GtPoint::from_bytes(t.to_bytes()) == t);

  auto bad = G1Point::generator().to_bytes();
  bad[0] &= 0x7f;  // uncompressed flag cleared
  CHECK_THROWS_AS(G1Point::from_bytes(bad), FormatError);
  std::array<std::uint8_t, 32> big{};
  big.fill(0xff);
  CHECK_THROWS_AS(Scalar::from_bytes(big), FormatError);
  CHECK_THROWS_AS(G1Point::from_bytes(std::span<const std::uint8_t>(big)), FormatError);

  // Gt bytes of a non-subgroup element (2 in Fp12) are rejected.
  std::array<std::uint8_t, 576> gt_bad{};
  gt_bad[47] = 2;
  CHECK_THROWS_AS(GtPoint::from_bytes(gt_bad), FormatError);
}

TEST_CASE("points off the prime-order subgroup are rejected") {
  using namespace bls12_381;
  // Walk x = 1, 2, ... until x^3 + 4 is a square; such points lie on E(Fp)
  // but almost surely not in the order-r subgroup (cofactor > 1).
  int found = 0;
  for (u64 xi = 1; found < 3; ++xi) {
    Fp x = Fp::from_u64(xi);
    auto y = (x.square() * x + G1Curve::b()).sqrt();
    if (!y) continue;
    G1Affine a{x, *y, false};
    REQUIRE(!G1Jacobian(a).in_subgroup());
    CHECK_THROWS_AS(G1Point::from_bytes(G1Point(a).to_bytes()), FormatError);
    ++found;
  }
  found = 0;
  for (u64 xi = 1; found < 3; ++xi) {
    Fp2 x{Fp::from_u64(xi), Fp::one()};
    auto y = (x.square() * x + G2Curve::b()).sqrt();
    if (!y) continue;
    G2Affine a{x, *y, false};
    REQUIRE(!G2Jacobian(a).in_subgroup());
    CHECK_THROWS_AS(G2Point::from_bytes(G2Point(a).to_bytes()), FormatError);
    ++found;
  }
}
