// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>

namespace qfe {

// ChaCha20 keystream generator. Seeded instances are fully deterministic;
// the default constructor draws its key from OS entropy. An Rng is a value:
// concurrent workers each need their own (see derive()).
class Rng {
 public:
  using result_type = std::uint64_t;

  Rng();  // OS entropy
  static Rng from_seed(std::uint64_t seed);

  // Independent child stream keyed by (this key, label, index). Does not
  // advance this generator.
  Rng derive(std::string_view label, std::uint64_t index) const;

  void fill(std::span<std::uint8_t> out);
  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 bits of precision.
  double uniform01();
  // Uniform in [0, n) without modulo bias; n > 0.
  std::uint64_t below(std::uint64_t n);

  result_type operator()() { return next_u64(); }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

 private:
  explicit Rng(const std::array<std::uint8_t, 32>& key);
  void refill();

  std::array<std::uint8_t, 32> key_{};
  std::uint64_t counter_ = 0;
  std::array<std::uint8_t, 256> buf_{};
  std::size_t pos_ = 256;
};

}  // namespace qfe
