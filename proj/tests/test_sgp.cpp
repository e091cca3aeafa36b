// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include <vector>

#include "doctest.h"
#include "qfe/common/tlv.hpp"
#include "qfe/sgp/sgp.hpp"

using namespace qfe;

namespace {

constexpr std::int64_t kMsgBound = 1000;
constexpr std::int64_t kDlogBound = 1 << 20;

std::int64_t rand_in(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

std::vector<std::int64_t> rand_vec(Rng& rng, std::size_t n, std::int64_t lim) {
  std::vector<std::int64_t> v(n);
  for (auto& e : v) e = rand_in(rng, -lim, lim);
  return v;
}

IntMatrix rand_mat(Rng& rng, std::size_t r, std::size_t c, std::int64_t lim) {
  IntMatrix m(r, c);
  for (auto& e : m.data()) e = rand_in(rng, -lim, lim);
  return m;
}

// Direct double sum over all (i, j) terms.
std::int64_t brute(const IntMatrix& f, std::span<const std::int64_t> x, std::span<const std::int64_t> y) {
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < f.rows(); ++i)
    for (std::size_t j = 0; j < f.cols(); ++j) acc += f(i, j) * x[i] * y[j];
  return acc;
}

std::vector<std::int64_t> pr_t_times(const IntMatrix& pr, std::span<const std::int64_t> x) {
  std::vector<std::int64_t> out(pr.cols(), 0);
  for (std::size_t k = 0; k < pr.cols(); ++k)
    for (std::size_t i = 0; i < pr.rows(); ++i) out[k] += pr(i, k) * x[i];
  return out;
}

IntMatrix identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

}  // namespace

TEST_CASE("generate_master_key") {
  Rng rng = Rng::from_seed(1);
  const auto& ctx = setup();
  auto k5 = generate_master_key(5, ctx, rng);
  CHECK(k5.s.size() == 5);
  CHECK(k5.t.size() == 5);
  auto k130 = generate_master_key(130, ctx, rng);
  CHECK(k130.dim() == 130);
  CHECK(k130.t.size() == 130);

  Rng r1 = Rng::from_seed(99), r2 = Rng::from_seed(99);
  CHECK(generate_master_key(7, ctx, r1) == generate_master_key(7, ctx, r2));
  CHECK_THROWS_AS(generate_master_key(0, ctx, rng), ArgumentError);
}

TEST_CASE("encrypt/derive_key/decrypt examples") {
  Rng rng = Rng::from_seed(2);
  auto msk = generate_master_key(2, setup(), rng);
  std::vector<std::int64_t> x{2, 3}, y{4, 5};
  auto c = encrypt(x, y, msk, rng, kMsgBound);

  SUBCASE("identity F gives the inner product") {
    FMatrix f(identity(2));
    CHECK(decrypt(c, derive_key(msk, f), f, kDlogBound) == 2 * 4 + 3 * 5);
  }
  SUBCASE("upper triangular F") {
    FMatrix f(IntMatrix(2, 2, {1, 2, 0, 1}));
    CHECK(decrypt(c, derive_key(msk, f), f, kDlogBound) == 43);
  }
  SUBCASE("zero F") {
    FMatrix f(IntMatrix(2, 2));
    CHECK(decrypt(c, derive_key(msk, f), f, kDlogBound) == 0);
  }
  SUBCASE("x = y = (1,1) with identity") {
    std::vector<std::int64_t> ones{1, 1};
    auto c1 = encrypt(ones, ones, msk, rng, kMsgBound);
    FMatrix f(identity(2));
    CHECK(decrypt(c1, derive_key(msk, f), f, kDlogBound) == 2);
  }
  SUBCASE("zero plaintext decrypts to zero under any F") {
    std::vector<std::int64_t> z{0, 0};
    auto cz = encrypt(z, z, msk, rng, kMsgBound);
    for (int trial = 0; trial < 3; ++trial) {
      FMatrix f(rand_mat(rng, 2, 2, 10));
      CHECK(decrypt(cz, derive_key(msk, f), f, kDlogBound) == 0);
    }
  }
  SUBCASE("distinct F on one ciphertext") {
    FMatrix f1(IntMatrix(2, 2, {3, -1, 2, 0}));
    FMatrix f2(IntMatrix(2, 2, {-2, 0, 5, 7}));
    CHECK(decrypt(c, derive_key(msk, f1), f1, kDlogBound) == brute(f1.entries(), x, y));
    CHECK(decrypt(c, derive_key(msk, f2), f2, kDlogBound) == brute(f2.entries(), x, y));
  }
  SUBCASE("pipeline form encrypt(X, X)") {
    auto cx = encrypt(x, x, msk, rng, kMsgBound);
    FMatrix f = FMatrix::diagonal(std::vector<std::int64_t>{2, -3});
    CHECK(decrypt(cx, derive_key(msk, f), f, kDlogBound) == 2 * 4 - 3 * 9);
  }
}

TEST_CASE("random n=8 instance equals the brute-force double sum") {
  Rng rng = Rng::from_seed(3);
  auto msk = generate_master_key(8, setup(), rng);
  auto x = rand_vec(rng, 8, 10), y = rand_vec(rng, 8, 10);
  FMatrix f(rand_mat(rng, 8, 8, 10));
  auto c = encrypt(x, y, msk, rng, 10);
  CHECK(decrypt(c, derive_key(msk, f), f, 100000) == brute(f.entries(), x, y));
}

TEST_CASE("errors") {
  Rng rng = Rng::from_seed(4);
  auto msk = generate_master_key(3, setup(), rng);
  std::vector<std::int64_t> x{1, 2, 3}, shortv{1, 2};
  CHECK_THROWS_AS(encrypt(shortv, x, msk, rng, 10), ArgumentError);
  CHECK_THROWS_AS(encrypt(x, shortv, msk, rng, 10), ArgumentError);
  std::vector<std::int64_t> big{1, 11, 0};
  CHECK_THROWS_AS(encrypt(big, x, msk, rng, 10), BoundError);
  std::vector<std::int64_t> neg{1, -11, 0};
  CHECK_THROWS_AS(encrypt(x, neg, msk, rng, 10), BoundError);

  CHECK_THROWS_AS(derive_key(msk, FMatrix(identity(2))), ArgumentError);
  CHECK_THROWS_AS(FMatrix(IntMatrix(2, 3)), ArgumentError);

  auto c = encrypt(x, x, msk, rng, 10);
  FMatrix f1(identity(3));
  FMatrix f2(IntMatrix(3, 3, {2, 0, 0, 0, 1, 0, 0, 0, 1}));
  CHECK_THROWS_AS(decrypt(c, derive_key(msk, f1), f2, 1000), KeyMismatchError);
  // 1 + 4 + 9 = 14 lies outside a window of 10.
  CHECK_THROWS_AS(decrypt(c, derive_key(msk, f1), f1, 10), DlogRangeError);
  CHECK(decrypt(c, derive_key(msk, f1), f1, 14) == 14);

  CHECK_THROWS_AS(project_encryption(c, IntMatrix(2, 1, 1)), ArgumentError);
  CHECK_THROWS_AS(project_secret_key(msk, IntMatrix(4, 2, 1)), ArgumentError);
  CHECK_THROWS_AS(project_encryption(c, IntMatrix(3, 4, 1)), ArgumentError);
}

TEST_CASE("projection examples") {
  Rng rng = Rng::from_seed(5);
  const auto& ctx = setup();
  SUBCASE("identity projection") {
    auto msk = generate_master_key(3, ctx, rng);
    auto x = rand_vec(rng, 3, 10);
    auto c = encrypt(x, x, msk, rng, 10);
    auto pc = project_encryption(c, identity(3));
    auto pk = project_secret_key(msk, identity(3));
    CHECK(pk == msk);
    for (int trial = 0; trial < 3; ++trial) {
      FMatrix f(rand_mat(rng, 3, 3, 10));
      auto key = derive_key(msk, f);
      CHECK(decrypt(pc, key, f, 100000) == decrypt(c, key, f, 100000));
    }
  }
  SUBCASE("n=3, d=2") {
    auto msk = generate_master_key(3, ctx, rng);
    auto x = rand_vec(rng, 3, 10);
    IntMatrix pr = rand_mat(rng, 3, 2, 10);
    FMatrix f(rand_mat(rng, 2, 2, 10));
    auto pc = project_encryption(encrypt(x, x, msk, rng, 10), pr);
    auto pk = project_secret_key(msk, pr);
    CHECK(pc.dim() == 2);
    CHECK(pk.dim() == 2);
    auto px = pr_t_times(pr, x);
    CHECK(decrypt(pc, derive_key(pk, f), f, 1 << 22) == brute(f.entries(), px, px));
  }
  SUBCASE("zero projection") {
    auto msk = generate_master_key(3, ctx, rng);
    auto x = rand_vec(rng, 3, 10);
    IntMatrix pr(3, 2);
    auto pc = project_encryption(encrypt(x, x, msk, rng, 10), pr);
    auto pk = project_secret_key(msk, pr);
    FMatrix f(rand_mat(rng, 2, 2, 10));
    CHECK(decrypt(pc, derive_key(pk, f), f, 10) == 0);
  }
}

TEST_CASE("property: correctness on 100 random instances") {
  Rng rng = Rng::from_seed(6);
  const auto& ctx = setup();
  int ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 1 + rng.below(8);
    auto msk = generate_master_key(n, ctx, rng);
    auto x = rand_vec(rng, n, 10), y = rand_vec(rng, n, 10);
    FMatrix f(rand_mat(rng, n, n, 10));
    auto c = encrypt(x, y, msk, rng, 10);
    if (decrypt(c, derive_key(msk, f), f, 64000) == brute(f.entries(), x, y)) ++ok;
  }
  CHECK(ok == 100);
}

TEST_CASE("property: projection correctness on 50 random instances") {
  Rng rng = Rng::from_seed(7);
  const auto& ctx = setup();
  int ok = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 1 + rng.below(6);
    std::size_t d = 1 + rng.below(std::min<std::size_t>(3, n));
    auto msk = generate_master_key(n, ctx, rng);
    auto x = rand_vec(rng, n, 10);
    IntMatrix pr = rand_mat(rng, n, d, 10);
    FMatrix f(rand_mat(rng, d, d, 10));
    auto pc = project_encryption(encrypt(x, x, msk, rng, 10), pr);
    auto key = derive_key(project_secret_key(msk, pr), f);
    auto px = pr_t_times(pr, x);
    // |Pr^T x| <= 600 per entry, so |value| <= 9 * 10 * 600^2.
    if (decrypt(pc, key, f, 9 * 10 * 360000) == brute(f.entries(), px, px)) ++ok;
  }
  CHECK(ok == 50);
}

TEST_CASE("property: randomized ciphertexts agree under decryption") {
  Rng rng = Rng::from_seed(8);
  auto msk = generate_master_key(4, setup(), rng);
  auto x = rand_vec(rng, 4, 10), y = rand_vec(rng, 4, 10);
  auto c1 = encrypt(x, y, msk, rng, 10);
  auto c2 = encrypt(x, y, msk, rng, 10);
  CHECK(serialize(c1) != serialize(c2));
  for (int trial = 0; trial < 5; ++trial) {
    FMatrix f(rand_mat(rng, 4, 4, 10));
    auto key = derive_key(msk, f);
    CHECK(decrypt(c1, key, f, 100000) == decrypt(c2, key, f, 100000));
  }
}

TEST_CASE("property: linearity in the function matrix") {
  Rng rng = Rng::from_seed(9);
  auto msk = generate_master_key(5, setup(), rng);
  for (int trial = 0; trial < 5; ++trial) {
    auto x = rand_vec(rng, 5, 10), y = rand_vec(rng, 5, 10);
    auto c = encrypt(x, y, msk, rng, 10);
    IntMatrix m1 = rand_mat(rng, 5, 5, 10), m2 = rand_mat(rng, 5, 5, 10), sum(5, 5);
    for (std::size_t i = 0; i < sum.data().size(); ++i) sum.data()[i] = m1.data()[i] + m2.data()[i];
    FMatrix f1(m1), f2(m2), f12(sum);
    std::int64_t v1 = decrypt(c, derive_key(msk, f1), f1, 100000);
    std::int64_t v2 = decrypt(c, derive_key(msk, f2), f2, 100000);
    CHECK(v1 + v2 == decrypt(c, derive_key(msk, f12), f12, 200000));
  }
}

TEST_CASE("binary formats round-trip and are validated") {
  Rng rng = Rng::from_seed(10);
  auto msk = generate_master_key(3, setup(), rng);
  std::vector<std::int64_t> x{1, -2, 3};
  auto c = encrypt(x, x, msk, rng, 10);
  FMatrix f(identity(3));
  auto key = derive_key(msk, f);
  Digest cfg = sha256(std::string_view("cfg"));

  std::optional<Digest> got;
  CHECK(deserialize_master_key(serialize(msk, cfg), &got) == msk);
  CHECK(got == cfg);
  CHECK(deserialize_ciphertext(serialize(c), &got) == c);
  CHECK(!got.has_value());
  CHECK(deserialize_fe_key(serialize(key, cfg), &got) == key);
  CHECK(got == cfg);

  auto ct = serialize(c);
  CHECK(sniff_magic(ct) == magic::kCiphertext);
  CHECK_THROWS_AS(deserialize_master_key(ct), FormatError);
  auto truncated = ct;
  truncated.resize(truncated.size() - 5);
  CHECK_THROWS_AS(deserialize_ciphertext(truncated), FormatError);
  auto flipped = ct;
  flipped[40] ^= 0x01;  // inside the first G1 point
  CHECK_THROWS_AS(deserialize_ciphertext(flipped), FormatError);

  const std::uint16_t msk_tags[] = {tag::kMskS, tag::kMskT};
  CHECK(contains_any_tag(serialize(msk), msk_tags));
  CHECK(!contains_any_tag(serialize(key), msk_tags));
  CHECK(!contains_any_tag(ct, msk_tags));
}
