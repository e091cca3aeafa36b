// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

// Bounded discrete logarithm in the pairing target group by baby-step
// giant-step over the symmetric window [-bound, bound].

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "qfe/pairing/group.hpp"

namespace qfe {

// Baby steps base^0 .. base^(m-1), m = ceil(sqrt(2 * bound + 1)), keyed by
// GtPoint::fingerprint in an open-addressing table. Immutable after
// construction and safe to share between threads.
class BsgsTable {
 public:
  BsgsTable(const GtPoint& base, std::int64_t bound);

  const GtPoint& base() const { return base_; }
  std::int64_t bound() const { return bound_; }
  std::uint64_t baby_steps() const { return m_; }

  // The unique v with |v| <= bound and base^v == target, if any. Giant
  // steps alternate sign outward from zero, so cost grows with |v| / m.
  std::optional<std::int64_t> solve(const GtPoint& target) const;

 private:
  std::optional<std::uint32_t> lookup(std::uint64_t key) const;
  bool accept(const GtPoint& current, std::int64_t j_candidate) const;

  GtPoint base_;
  std::int64_t bound_;
  std::uint64_t m_;
  GtPoint giant_up_;    // base^m
  GtPoint giant_down_;  // base^-m
  std::vector<std::uint64_t> keys_;
  std::vector<std::uint32_t> values_;
  std::uint64_t mask_ = 0;
};

// Process-wide cache keyed by (base, bound).
std::shared_ptr<const BsgsTable> bsgs_table(const GtPoint& base, std::int64_t bound);

// Throws DlogRangeError when no exponent lies in [-bound, bound] and
// ArgumentError when bound < 0.
std::int64_t dlog_bounded(const GtPoint& target, const GtPoint& base, std::int64_t bound);

}  // namespace qfe
