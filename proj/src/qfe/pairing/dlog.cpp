// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include "qfe/pairing/dlog.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <string>

namespace qfe {
namespace {

constexpr std::uint32_t kEmpty = std::numeric_limits<std::uint32_t>::max();
// Largest window the table can index with 32-bit baby-step values.
constexpr std::int64_t kMaxBound = std::int64_t{1} << 62;

std::uint64_t ceil_sqrt(std::uint64_t n) {
  auto s = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (s * s < n) ++s;
  while (s > 0 && (s - 1) * (s - 1) >= n) --s;
  return s;
}

}  // namespace

BsgsTable::BsgsTable(const GtPoint& base, std::int64_t bound) : base_(base), bound_(bound) {
  if (bound < 0) throw ArgumentError("dlog bound must be non-negative");
  if (bound > kMaxBound) throw ArgumentError("dlog bound too large");
  m_ = ceil_sqrt(2 * static_cast<std::uint64_t>(bound) + 1);
  if (m_ >= kEmpty) throw ArgumentError("dlog window needs more than 2^32 baby steps");

  const std::uint64_t capacity = std::bit_ceil(std::max<std::uint64_t>(16, 2 * m_));
  mask_ = capacity - 1;
  keys_.assign(capacity, 0);
  values_.assign(capacity, kEmpty);

  GtPoint cur = GtPoint::identity();
  for (std::uint64_t j = 0; j < m_; ++j) {
    const std::uint64_t key = cur.fingerprint();
    for (std::uint64_t slot = key & mask_;; slot = (slot + 1) & mask_) {
      if (values_[slot] == kEmpty) {
        keys_[slot] = key;
        values_[slot] = static_cast<std::uint32_t>(j);
        break;
      }
      if (keys_[slot] == key) break;  // keep the first exponent
    }
    cur *= base_;
  }
  giant_up_ = cur;  // base^m
  giant_down_ = cur.inverse();
}

std::optional<std::uint32_t> BsgsTable::lookup(std::uint64_t key) const {
  for (std::uint64_t slot = key & mask_;; slot = (slot + 1) & mask_) {
    if (values_[slot] == kEmpty) return std::nullopt;
    if (keys_[slot] == key) return values_[slot];
  }
}

bool BsgsTable::accept(const GtPoint& current, std::int64_t j) const {
  // Fingerprints can collide; confirm against the actual element.
  return base_.pow(j) == current;
}

std::optional<std::int64_t> BsgsTable::solve(const GtPoint& target) const {
  const auto m = static_cast<std::int64_t>(m_);
  const std::int64_t max_i = bound_ / m + 1;
  GtPoint up = target;    // target * base^(-i m)
  GtPoint down = target;  // target * base^(+i m)
  for (std::int64_t i = 0; i <= max_i; ++i) {
    if (i > 0) {
      up *= giant_down_;
      down *= giant_up_;
    }
    if (auto j = lookup(up.fingerprint()); j && accept(up, *j)) {
      std::int64_t v = i * m + static_cast<std::int64_t>(*j);
      if (v <= bound_) return v;
    }
    if (i > 0) {
      if (auto j = lookup(down.fingerprint()); j && accept(down, *j)) {
        std::int64_t v = static_cast<std::int64_t>(*j) - i * m;
        if (v >= -bound_) return v;
      }
    }
  }
  return std::nullopt;
}

std::shared_ptr<const BsgsTable> bsgs_table(const GtPoint& base, std::int64_t bound) {
  static std::mutex mu;
  static std::map<std::pair<std::uint64_t, std::int64_t>, std::shared_ptr<const BsgsTable>> cache;
  const auto key = std::make_pair(base.fingerprint(), bound);
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end() && it->second->base() == base) return it->second;
  auto table = std::make_shared<const BsgsTable>(base, bound);
  cache[key] = table;
  return table;
}

std::int64_t dlog_bounded(const GtPoint& target, const GtPoint& base, std::int64_t bound) {
  if (bound < 0) throw ArgumentError("dlog bound must be non-negative");
  auto v = bsgs_table(base, bound)->solve(target);
  if (!v) {
    throw DlogRangeError("dlog out of range: no exponent within +/-" + std::to_string(bound) +
                         " (check quantization scales)");
  }
  return *v;
}

}  // namespace qfe
