// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

// Encryption and scoring benchmarks over (d, borrowers) cells.
//
// CSV, one row per successful cell; values are means over `rep` runs:
//   dim,borrowers,rep,encrypt_ms,score_ms,keygen_ms,project_ms,decrypt_ms,dlog_ms
// encrypt_ms and score_ms are wall times for the whole batch. project_ms,
// decrypt_ms and dlog_ms are summed over borrowers.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "qfe/data/quantize.hpp"

namespace qfe {

inline constexpr const char* kBenchCsvHeader =
    "dim,borrowers,rep,encrypt_ms,score_ms,keygen_ms,project_ms,decrypt_ms,dlog_ms";

struct BenchPlan {
  std::vector<std::size_t> attribute_dims{5, 10, 15, 20, 25, 50};  // projected dimension d
  std::vector<std::size_t> borrower_counts{1, 10, 50, 100, 200, 500, 1000};
  std::size_t repetitions = 5;
  std::uint64_t seed = 1;
  std::size_t features = 130;  // record dimension n
  std::size_t workers = 1;     // scoring pool, 0 = hardware threads
  QuantConfig config = QuantConfig::desk();

  // ArgumentError on empty lists, zeros or repetitions < 1.
  void validate() const;
  std::size_t cells() const { return attribute_dims.size() * borrower_counts.size(); }
};

struct BenchRow {
  std::size_t dim = 0;
  std::size_t borrowers = 0;
  std::size_t reps = 0;
  double encrypt_ms = 0, score_ms = 0, keygen_ms = 0, project_ms = 0, decrypt_ms = 0, dlog_ms = 0;
  double encrypt_sd = 0, score_sd = 0;
  bool failed = false;
  std::string error;
};

using BenchProgress = std::function<void(const BenchRow&)>;

// Rows come back in plan order. Repetition r of every cell runs before
// repetition r + 1 of any cell; progress fires once per cell during the
// last round. A cell that raises a library error is returned with
// failed = true and skips its remaining repetitions.
std::vector<BenchRow> run_bench(const BenchPlan& plan, const BenchProgress& progress = {});

// Successful rows only.
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);
std::string bench_csv(const std::vector<BenchRow>& rows);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;  // NaN with fewer than two distinct x values
  std::size_t points = 0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Encrypt time vs borrowers, per d, over the successful rows.
std::vector<std::pair<std::size_t, LinearFit>> encrypt_linearity(const std::vector<BenchRow>& rows);

struct SpeedupRow {
  std::size_t workers = 0;
  double score_ms = 0.0;
  double speedup = 1.0;      // relative to the first worker count
  bool identical = true;     // reports byte-equal to the first run's
};

// Scores the same encrypted batch once per worker count.
std::vector<SpeedupRow> parallel_speedup(std::size_t d, std::size_t borrowers,
                                         const std::vector<std::size_t>& worker_counts, std::uint64_t seed = 1,
                                         std::size_t features = 130, const QuantConfig& cfg = QuantConfig::desk());

}  // namespace qfe
