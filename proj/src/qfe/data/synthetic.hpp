// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

// Synthetic lending-style data: one Gaussian cluster per label over n
// numeric features, noise truncated at 2.5 standard deviations.

#pragma once

#include <cstdint>

#include "qfe/common/matrix.hpp"
#include "qfe/common/rng.hpp"
#include "qfe/data/csv.hpp"

namespace qfe {

struct SyntheticSpec {
  std::size_t rows = 1000;
  std::size_t features = 130;
  double separation = 1.0;      // distance between cluster centres per feature, in noise std devs
  double default_rate = 0.5;    // fraction of label-1 rows
  std::uint64_t seed = 1;
  // Adds a timestamp column, a categorical column and scattered nulls so
  // the cleaning steps have something to do. Changes the feature count.
  bool messy = false;
};

// Columns f000..f{n-1} (plus extras when messy) and a "default" label column.
CsvTable generate_synthetic(const SyntheticSpec& spec);

// Standard normal draw truncated to [-limit, limit].
double truncated_normal(Rng& rng, double limit);

// rows x n matrix of uniform [0, 1) features, the shape preprocessed
// records take.
RealMatrix random_unit_records(std::size_t rows, std::size_t n, Rng& rng);

}  // namespace qfe
