// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "qfe/bench/bench.hpp"

using namespace qfe;

namespace {

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("plan validation") {
  BenchPlan p;
  CHECK_NOTHROW(p.validate());
  CHECK(p.cells() == 42);
  p.borrower_counts = {0};
  CHECK_THROWS_AS(p.validate(), ArgumentError);
  p = BenchPlan{};
  p.repetitions = 0;
  CHECK_THROWS_AS(p.validate(), ArgumentError);
  p = BenchPlan{};
  p.attribute_dims = {};
  CHECK_THROWS_AS(p.validate(), ArgumentError);
  p = BenchPlan{};
  p.attribute_dims = {5, 0};
  CHECK_THROWS_AS(p.validate(), ArgumentError);
}

TEST_CASE("least-squares fit") {
  auto f = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r2 == doctest::Approx(1.0));
  auto g = fit_line({0, 1, 2, 3}, {0, 1, 0, 1});
  CHECK(g.r2 == doctest::Approx(0.2));
  CHECK(std::isnan(fit_line({2, 2}, {1, 3}).r2));
  CHECK_THROWS_AS(fit_line({1}, {}), ArgumentError);
}

TEST_CASE("small plan: one row per cell, frozen header, linear encrypt time") {
  BenchPlan p;
  p.attribute_dims = {2, 3};
  p.borrower_counts = {1, 4, 8};
  p.repetitions = 2;
  p.features = 8;
  std::size_t seen = 0;
  auto rows = run_bench(p, [&](const BenchRow&) { ++seen; });
  CHECK(seen == 6);
  REQUIRE(rows.size() == 6);
  for (const auto& r : rows) {
    CHECK_FALSE(r.failed);
    CHECK(r.reps == 2);
    CHECK(r.encrypt_ms > 0.0);
    CHECK(r.score_ms > 0.0);
    CHECK(r.decrypt_ms > 0.0);
    CHECK(r.project_ms > 0.0);
  }
  std::string csv = bench_csv(rows);
  CHECK(csv.rfind(std::string(kBenchCsvHeader) + "\n", 0) == 0);
  CHECK(count_lines(csv) == 7);
  CHECK(csv.find("\n3,8,2,") != std::string::npos);
  auto fits = encrypt_linearity(rows);
  REQUIRE(fits.size() == 2);
  for (const auto& [d, f] : fits) {
    CHECK(f.points == 3);
    CHECK(f.slope > 0.0);
    MESSAGE("d=" << d << " R^2=" << f.r2);
  }
}

TEST_CASE("failed cells are flagged and left out of the CSV") {
  BenchPlan p;
  p.attribute_dims = {2, 3};
  p.borrower_counts = {1};
  p.repetitions = 1;
  p.features = 8;
  // d = 3 needs a window above this ceiling; d = 2 fits.
  p.config.dlog_ceiling = score_bound(p.config, 8, 2);
  auto rows = run_bench(p);
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].failed);
  CHECK(rows[1].failed);
  CHECK(rows[1].error.find("config_error") == 0);
  CHECK(count_lines(bench_csv(rows)) == 2);
}

TEST_CASE("parallel scoring gives identical reports for 1, 2 and 4 workers") {
  auto t = parallel_speedup(3, 12, {1, 1, 2, 4}, 5, 8);
  REQUIRE(t.size() == 4);
  for (const auto& r : t) {
    CHECK(r.identical);
    CHECK(r.score_ms > 0.0);
  }
  CHECK(t[0].speedup == 1.0);
  CHECK_THROWS_AS(parallel_speedup(3, 2, {0}), ArgumentError);
}

TEST_CASE("scoring time grows with d at a fixed borrower count") {
  BenchPlan p;
  p.attribute_dims = {2, 16, 40};
  p.borrower_counts = {6};
  p.repetitions = 1;
  p.features = 40;
  auto rows = run_bench(p);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE_FALSE(rows[i].failed);
    CHECK(rows[i].score_ms >= rows[i - 1].score_ms);
  }
}
