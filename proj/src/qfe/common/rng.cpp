// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include "qfe/common/rng.hpp"

#include <sodium.h>

#include <cstring>
#include <stdexcept>

namespace qfe {
namespace {

void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw std::runtime_error("libsodium initialisation failed");
}

}  // namespace

Rng::Rng() {
  ensure_sodium();
  randombytes_buf(key_.data(), key_.size());
}

Rng::Rng(const std::array<std::uint8_t, 32>& key) : key_(key) { ensure_sodium(); }

Rng Rng::from_seed(std::uint64_t seed) {
  ensure_sodium();
  std::uint8_t msg[16] = {'q', 'f', 'e', '-', 'r', 'n', 'g', 0};
  for (int i = 0; i < 8; ++i) msg[8 + i] = static_cast<std::uint8_t>(seed >> (8 * i));
  std::array<std::uint8_t, 32> key{};
  crypto_hash_sha256(key.data(), msg, sizeof msg);
  return Rng(key);
}

Rng Rng::derive(std::string_view label, std::uint64_t index) const {
  crypto_hash_sha256_state st;
  crypto_hash_sha256_init(&st);
  crypto_hash_sha256_update(&st, key_.data(), key_.size());
  crypto_hash_sha256_update(&st, reinterpret_cast<const unsigned char*>(label.data()), label.size());
  std::uint8_t idx[8];
  for (int i = 0; i < 8; ++i) idx[i] = static_cast<std::uint8_t>(index >> (8 * i));
  crypto_hash_sha256_update(&st, idx, sizeof idx);
  std::array<std::uint8_t, 32> key{};
  crypto_hash_sha256_final(&st, key.data());
  return Rng(key);
}

void Rng::refill() {
  static const std::uint8_t kZeros[256] = {};
  std::uint8_t nonce[crypto_stream_chacha20_ietf_NONCEBYTES] = {};
  // Each refill consumes 4 blocks of 64 bytes.
  crypto_stream_chacha20_ietf_xor_ic(buf_.data(), kZeros, buf_.size(), nonce,
                                     static_cast<std::uint32_t>(counter_), key_.data());
  counter_ += buf_.size() / 64;
  pos_ = 0;
}

void Rng::fill(std::span<std::uint8_t> out) {
  for (auto& b : out) {
    if (pos_ == buf_.size()) refill();
    b = buf_[pos_++];
  }
}

std::uint64_t Rng::next_u64() {
  std::uint8_t b[8];
  fill(b);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double Rng::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below(0)");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  for (;;) {
    std::uint64_t v = next_u64();
    if (v < limit) return v % n;
  }
}

}  // namespace qfe
