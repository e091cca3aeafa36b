// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include "qfe/pairing/group.hpp"

#include <optional>

namespace qfe {

using namespace bls12_381;

namespace {

constexpr std::uint8_t kCompressedFlag = 0x80;
constexpr std::uint8_t kInfinityFlag = 0x40;
constexpr std::uint8_t kSignFlag = 0x20;

// Fast membership tests: sigma(P) == -x^2 P on G1 and psi(P) == x P on G2.
// The endomorphism constants are derived at start-up and validated on the
// generators; if validation ever failed the slow [r]P test is used.
struct Endomorphisms {
  std::optional<Fp> beta;
  std::optional<Fp2> psi_x;
  std::optional<Fp2> psi_y;

  Endomorphisms() {
    Fp::Limbs e = Fp::modulus();
    Fp::Limbs one{};
    one[0] = 1;
    limbs::sub(e, one);
    Fp::Limbs third = e;
    limbs::div_small(third, 3);
    Fp::Limbs half = e;
    limbs::div_small(half, 2);

    Fp omega = Fp::one();
    for (u64 g = 2; omega.is_one(); ++g) omega = Fp::from_u64(g).pow(third);
    const G1Jacobian gen1 = G1Jacobian::generator();
    const G1Jacobian target1 = gen1.mul(std::array<u64, 1>{kBlsX}).mul(std::array<u64, 1>{kBlsX}).negated();
    for (const Fp& cand : {omega, omega.square()}) {
      G1Affine a = gen1.to_affine();
      a.x = a.x * cand;
      if (G1Jacobian(a) == target1) beta = cand;
    }

    const Fp2 xi{Fp::one(), Fp::one()};
    Fp2 cx = xi.pow(third).inverse();
    Fp2 cy = xi.pow(half).inverse();
    const G2Jacobian gen2 = G2Jacobian::generator();
    G2Affine a = gen2.to_affine();
    G2Affine psi{a.x.frobenius() * cx, a.y.frobenius() * cy, false};
    if (G2Jacobian(psi) == gen2.mul(std::array<u64, 1>{kBlsX}).negated()) {
      psi_x = cx;
      psi_y = cy;
    }
  }
};

const Endomorphisms& endomorphisms() {
  static const Endomorphisms e;
  return e;
}

bool g1_in_subgroup(const G1Affine& p) {
  if (p.infinity) return true;
  const auto& e = endomorphisms();
  if (!e.beta) return G1Jacobian(p).in_subgroup();
  G1Affine s = p;
  s.x = s.x * *e.beta;
  const std::array<u64, 1> x{kBlsX};
  return G1Jacobian(s) == G1Jacobian(p).mul(x).mul(x).negated();
}

bool g2_in_subgroup(const G2Affine& p) {
  if (p.infinity) return true;
  const auto& e = endomorphisms();
  if (!e.psi_x) return G2Jacobian(p).in_subgroup();
  G2Affine psi{p.x.frobenius() * *e.psi_x, p.y.frobenius() * *e.psi_y, false};
  return G2Jacobian(psi) == G2Jacobian(p).mul(std::array<u64, 1>{kBlsX}).negated();
}

std::vector<Fr::Limbs> canonical(std::span<const Scalar> ks) {
  std::vector<Fr::Limbs> out;
  out.reserve(ks.size());
  for (const auto& k : ks) out.push_back(k.fr().to_canonical());
  return out;
}

std::vector<Scalar> to_scalars(std::span<const std::int64_t> cs) {
  std::vector<Scalar> out;
  out.reserve(cs.size());
  for (auto c : cs) out.push_back(Scalar::from_i64(c));
  return out;
}

}  // namespace

// ---- Scalar -------------------------------------------------------------

Scalar Scalar::random(Rng& rng) {
  // Rejection sampling over 255-bit candidates; r > 2^254 so fewer than
  // half the draws are rejected.
  for (;;) {
    Fr::Limbs l{};
    for (auto& limb : l) limb = rng.next_u64();
    l[3] &= 0x7fffffffffffffffULL;
    if (!limbs::geq(l, Fr::modulus())) return Scalar(Fr::from_canonical(l));
  }
}

std::array<std::uint8_t, Scalar::kBytes> Scalar::to_bytes() const {
  std::array<std::uint8_t, kBytes> out{};
  v_.to_bytes_be(out);
  return out;
}

Scalar Scalar::from_bytes(std::span<const std::uint8_t> in) {
  auto v = Fr::from_bytes_be(in);
  if (!v) throw FormatError("scalar encoding is not canonical");
  return Scalar(*v);
}

// ---- G1 -----------------------------------------------------------------

G1Point G1Point::generator() { return G1Point(G1Curve::generator()); }

G1Point G1Point::base_mul(const Scalar& k) { return G1Point(g1_mul_generator(k.fr()).to_affine()); }

G1Point G1Point::mul(const Scalar& k) const { return G1Point(G1Jacobian(p_).mul(k.fr()).to_affine()); }

G1Point operator+(const G1Point& a, const G1Point& b) {
  return G1Point((G1Jacobian(a.p_) + G1Jacobian(b.p_)).to_affine());
}

std::array<std::uint8_t, G1Point::kBytes> G1Point::to_bytes() const {
  std::array<std::uint8_t, kBytes> out{};
  if (p_.infinity) {
    out[0] = kCompressedFlag | kInfinityFlag;
    return out;
  }
  p_.x.to_bytes_be(out);
  out[0] |= kCompressedFlag;
  if (p_.y.lexicographically_largest()) out[0] |= kSignFlag;
  return out;
}

G1Point G1Point::from_bytes(std::span<const std::uint8_t> in) {
  if (in.size() != kBytes) throw FormatError("G1 encoding must be 48 bytes");
  const std::uint8_t flags = in[0];
  if (!(flags & kCompressedFlag)) throw FormatError("G1 encoding is not compressed");
  std::array<std::uint8_t, kBytes> body{};
  std::copy(in.begin(), in.end(), body.begin());
  body[0] &= 0x1f;
  if (flags & kInfinityFlag) {
    bool clean = !(flags & kSignFlag);
    for (auto b : body) clean = clean && b == 0;
    if (!clean) throw FormatError("non-canonical G1 identity encoding");
    return G1Point();
  }
  auto x = Fp::from_bytes_be(body);
  if (!x) throw FormatError("G1 x-coordinate out of range");
  auto y = (x->square() * *x + G1Curve::b()).sqrt();
  if (!y) throw FormatError("G1 point is not on the curve");
  if (y->lexicographically_largest() != static_cast<bool>(flags & kSignFlag)) *y = -*y;
  G1Affine a{*x, *y, false};
  if (!g1_in_subgroup(a)) throw FormatError("G1 point is not in the prime-order subgroup");
  return G1Point(a);
}

// ---- G2 -----------------------------------------------------------------

G2Point G2Point::generator() { return G2Point(G2Curve::generator()); }

G2Point G2Point::base_mul(const Scalar& k) { return G2Point(g2_mul_generator(k.fr()).to_affine()); }

G2Point G2Point::mul(const Scalar& k) const { return G2Point(G2Jacobian(p_).mul(k.fr()).to_affine()); }

G2Point operator+(const G2Point& a, const G2Point& b) {
  return G2Point((G2Jacobian(a.p_) + G2Jacobian(b.p_)).to_affine());
}

std::array<std::uint8_t, G2Point::kBytes> G2Point::to_bytes() const {
  std::array<std::uint8_t, kBytes> out{};
  if (p_.infinity) {
    out[0] = kCompressedFlag | kInfinityFlag;
    return out;
  }
  p_.x.c1.to_bytes_be(std::span<std::uint8_t>(out.data(), 48));
  p_.x.c0.to_bytes_be(std::span<std::uint8_t>(out.data() + 48, 48));
  out[0] |= kCompressedFlag;
  if (p_.y.lexicographically_largest()) out[0] |= kSignFlag;
  return out;
}

G2Point G2Point::from_bytes(std::span<const std::uint8_t> in) {
  if (in.size() != kBytes) throw FormatError("G2 encoding must be 96 bytes");
  const std::uint8_t flags = in[0];
  if (!(flags & kCompressedFlag)) throw FormatError("G2 encoding is not compressed");
  std::array<std::uint8_t, kBytes> body{};
  std::copy(in.begin(), in.end(), body.begin());
  body[0] &= 0x1f;
  if (flags & kInfinityFlag) {
    bool clean = !(flags & kSignFlag);
    for (auto b : body) clean = clean && b == 0;
    if (!clean) throw FormatError("non-canonical G2 identity encoding");
    return G2Point();
  }
  auto c1 = Fp::from_bytes_be(std::span<const std::uint8_t>(body.data(), 48));
  auto c0 = Fp::from_bytes_be(std::span<const std::uint8_t>(body.data() + 48, 48));
  if (!c0 || !c1) throw FormatError("G2 x-coordinate out of range");
  Fp2 x{*c0, *c1};
  auto y = (x.square() * x + G2Curve::b()).sqrt();
  if (!y) throw FormatError("G2 point is not on the curve");
  if (y->lexicographically_largest() != static_cast<bool>(flags & kSignFlag)) *y = -*y;
  G2Affine a{x, *y, false};
  if (!g2_in_subgroup(a)) throw FormatError("G2 point is not in the prime-order subgroup");
  return G2Point(a);
}

// ---- Gt -----------------------------------------------------------------

GtPoint GtPoint::pow(std::int64_t k) const {
  std::array<u64, 1> mag{k < 0 ? static_cast<u64>(-(k + 1)) + 1 : static_cast<u64>(k)};
  GtPoint r(v_.pow(mag));
  return k < 0 ? r.inverse() : r;
}

std::uint64_t GtPoint::fingerprint() const {
  // Montgomery limbs are canonical, so equal elements share limbs.
  std::uint64_t h = v_.c0.c0.c0.raw()[0] ^ (v_.c1.c2.c1.raw()[1] * 0x9e3779b97f4a7c15ULL);
  h ^= h >> 31;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 29;
  return h;
}

std::array<std::uint8_t, GtPoint::kBytes> GtPoint::to_bytes() const {
  std::array<std::uint8_t, kBytes> out{};
  const Fp* coeffs[12] = {&v_.c0.c0.c0, &v_.c0.c0.c1, &v_.c0.c1.c0, &v_.c0.c1.c1,
                          &v_.c0.c2.c0, &v_.c0.c2.c1, &v_.c1.c0.c0, &v_.c1.c0.c1,
                          &v_.c1.c1.c0, &v_.c1.c1.c1, &v_.c1.c2.c0, &v_.c1.c2.c1};
  for (int i = 0; i < 12; ++i) coeffs[i]->to_bytes_be(std::span<std::uint8_t>(out.data() + 48 * i, 48));
  return out;
}

GtPoint GtPoint::from_bytes(std::span<const std::uint8_t> in) {
  if (in.size() != kBytes) throw FormatError("Gt encoding must be 576 bytes");
  Fp12 v;
  Fp* coeffs[12] = {&v.c0.c0.c0, &v.c0.c0.c1, &v.c0.c1.c0, &v.c0.c1.c1, &v.c0.c2.c0, &v.c0.c2.c1,
                    &v.c1.c0.c0, &v.c1.c0.c1, &v.c1.c1.c0, &v.c1.c1.c1, &v.c1.c2.c0, &v.c1.c2.c1};
  for (int i = 0; i < 12; ++i) {
    auto c = Fp::from_bytes_be(in.subspan(48 * static_cast<std::size_t>(i), 48));
    if (!c) throw FormatError("Gt coefficient out of range");
    *coeffs[i] = *c;
  }
  if (v.is_zero() || !v.pow(Fr::modulus()).is_one()) throw FormatError("Gt element is not in the order-r subgroup");
  return GtPoint(v);
}

// ---- context and pairing --------------------------------------------------

const GroupContext& setup() {
  static const GroupContext ctx = [] {
    GroupContext c;
    Fr::modulus();
    Fr::Limbs r = Fr::modulus();
    for (std::size_t i = 0; i < 32; ++i) {
      c.group_order[31 - i] = static_cast<std::uint8_t>(r[i / 8] >> (8 * (i % 8)));
    }
    c.g1 = G1Point::generator();
    c.g2 = G2Point::generator();
    c.gt = pair(c.g1, c.g2);
    return c;
  }();
  return ctx;
}

GtPoint pair(const G1Point& a, const G2Point& b) { return GtPoint(pairing(a.affine(), b.affine())); }

GtPoint pair_product(std::span<const std::pair<G1Point, G2Point>> terms) {
  std::vector<PairingTerm> t;
  t.reserve(terms.size());
  for (const auto& [a, b] : terms) t.emplace_back(a.affine(), b.affine());
  return GtPoint(multi_pairing(t));
}

namespace {

template <class Curve, class Point>
Point combine(std::span<const Point> points, std::span<const Scalar> coeffs) {
  if (points.size() != coeffs.size()) {
    throw ArgumentError("multi_exp_combine: " + std::to_string(points.size()) + " points but " +
                        std::to_string(coeffs.size()) + " coefficients");
  }
  std::vector<Affine<typename Curve::Field>> aff;
  aff.reserve(points.size());
  for (const auto& p : points) aff.push_back(p.affine());
  auto ks = canonical(coeffs);
  return Point(multi_exp<Curve>(aff, ks).to_affine());
}

}  // namespace

G1Point multi_exp_combine(std::span<const G1Point> points, std::span<const Scalar> coeffs) {
  return combine<G1Curve>(points, coeffs);
}
G2Point multi_exp_combine(std::span<const G2Point> points, std::span<const Scalar> coeffs) {
  return combine<G2Curve>(points, coeffs);
}
G1Point multi_exp_combine(std::span<const G1Point> points, std::span<const std::int64_t> coeffs) {
  auto s = to_scalars(coeffs);
  return combine<G1Curve>(points, std::span<const Scalar>(s));
}
G2Point multi_exp_combine(std::span<const G2Point> points, std::span<const std::int64_t> coeffs) {
  auto s = to_scalars(coeffs);
  return combine<G2Curve>(points, std::span<const Scalar>(s));
}

std::vector<G1Point> g1_base_mul_batch(std::span<const Scalar> ks) {
  std::vector<G1Jacobian> j;
  j.reserve(ks.size());
  for (const auto& k : ks) j.push_back(g1_mul_generator(k.fr()));
  auto aff = batch_normalize<G1Curve>(j);
  return {aff.begin(), aff.end()};
}

std::vector<G2Point> g2_base_mul_batch(std::span<const Scalar> ks) {
  std::vector<G2Jacobian> j;
  j.reserve(ks.size());
  for (const auto& k : ks) j.push_back(g2_mul_generator(k.fr()));
  auto aff = batch_normalize<G2Curve>(j);
  return {aff.begin(), aff.end()};
}

}  // namespace qfe
