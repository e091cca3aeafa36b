// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include "qfe/data/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

namespace qfe {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string feature_name(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "f%03zu", i);
  return buf;
}

}  // namespace

double truncated_normal(Rng& rng, double limit) {
  for (;;) {
    // Box-Muller; one draw per pair is enough here.
    double u1 = rng.uniform01();
    double u2 = rng.uniform01();
    if (u1 <= 0.0) continue;
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    if (std::abs(z) <= limit) return z;
  }
}

CsvTable generate_synthetic(const SyntheticSpec& spec) {
  Rng rng = Rng::from_seed(spec.seed);
  CsvTable t;
  for (std::size_t i = 0; i < spec.features; ++i) t.header.push_back(feature_name(i));
  if (spec.messy) {
    t.header.push_back("opened_at");
    t.header.push_back("region");
    t.header.push_back("sparse_note");
  }
  t.header.push_back("default");

  // Per-feature direction of the label-1 shift and a base level/spread so
  // raw columns look like unscaled measurements.
  std::vector<double> sign(spec.features), base(spec.features), spread(spec.features);
  for (std::size_t i = 0; i < spec.features; ++i) {
    sign[i] = rng.below(2) ? 1.0 : -1.0;
    base[i] = 10.0 + 90.0 * rng.uniform01();
    spread[i] = 1.0 + 9.0 * rng.uniform01();
  }
  static const char* kRegions[] = {"north", "south", "east", "west"};

  for (std::size_t r = 0; r < spec.rows; ++r) {
    const int label = rng.uniform01() < spec.default_rate ? 1 : 0;
    const double centre = (label ? 0.5 : -0.5) * spec.separation;
    std::vector<CsvCell> row;
    for (std::size_t i = 0; i < spec.features; ++i) {
      double z = sign[i] * centre + truncated_normal(rng, 2.5);
      row.emplace_back(fmt(base[i] + spread[i] * z));
    }
    if (spec.messy) {
      if (spec.features > 0 && rng.below(50) == 0) row[rng.below(spec.features)].reset();
      int day = 1 + static_cast<int>(rng.below(28));
      int month = 1 + static_cast<int>(rng.below(12));
      char ts[64];
      std::snprintf(ts, sizeof ts, "20%02d-%02d-%02dT12:00:00Z", 15 + label * 3 + static_cast<int>(rng.below(3)),
                    month, day);
      row.emplace_back(std::string(ts));
      row.emplace_back(std::string(kRegions[rng.below(4)]));
      if (rng.below(10) < 7) {
        row.emplace_back(std::nullopt);
      } else {
        row.emplace_back(std::string("note"));
      }
    }
    row.emplace_back(std::to_string(label));
    t.rows.push_back(std::move(row));
  }
  return t;
}

RealMatrix random_unit_records(std::size_t rows, std::size_t n, Rng& rng) {
  RealMatrix m(rows, n);
  for (auto& v : m.data()) v = rng.uniform01();
  return m;
}

}  // namespace qfe
