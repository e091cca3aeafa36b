// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include "qfe/bench/bench.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "qfe/pairing/dlog.hpp"
#include "qfe/pipeline/pipeline.hpp"

namespace qfe {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<BorrowerRecord> fresh_records(std::size_t count, std::size_t n, const QuantConfig& cfg, Rng& rng) {
  std::vector<BorrowerRecord> out(count);
  std::vector<double> x(n);
  for (std::size_t b = 0; b < count; ++b) {
    for (auto& v : x) v = rng.uniform01();
    out[b] = {b, quantize_record(x, cfg)};
  }
  return out;
}

struct Moments {
  double sum = 0.0, sumsq = 0.0;
  std::size_t n = 0;
  void add(double v) {
    sum += v;
    sumsq += v * v;
    ++n;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
  double sd() const {
    if (n < 2) return 0.0;
    double m = mean();
    return std::sqrt(std::max(0.0, (sumsq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1)));
  }
};

struct CellStats {
  Moments enc, score, keygen, proj, dec, dlog;
  bool failed = false;
  std::string error;
};

void run_rep(const BenchPlan& plan, std::size_t d, std::size_t borrowers, std::size_t rep, CellStats& st) {
  Rng rng = Rng::from_seed(plan.seed).derive("cell", d * 1000003ULL + borrowers).derive("rep", rep);
  NetworkParams params = init_params(plan.features, d, kLabels, rng);
  QuantizedModel model = export_quantized(params, plan.config);
  AuthoritySetup s = authority_setup(model, setup(), rng);
  // Table construction is evaluator setup, kept out of the timings.
  bsgs_table(setup().gt, s.evaluator.dlog_bound);
  auto records = fresh_records(borrowers, plan.features, plan.config, rng);
  // Untimed warm-up: lazily built tables and cold caches.
  score_batch(encrypt_batch(std::span(records).first(1), s.client, rng.derive("warmup", 0), 1), s.evaluator, 1);

  auto t0 = Clock::now();
  auto encrypted = encrypt_batch(records, s.client, rng, 1);
  double e_ms = ms_since(t0);
  t0 = Clock::now();
  auto reports = score_batch(encrypted, s.evaluator, plan.workers);
  double s_ms = ms_since(t0);

  double p = 0, dc = 0, dl = 0;
  for (const auto& r : reports) {
    p += r.timings.project_ms;
    dc += r.timings.decrypt_ms;
    dl += r.timings.dlog_ms;
  }
  st.enc.add(e_ms);
  st.score.add(s_ms);
  st.keygen.add(s.keygen_ms);
  st.proj.add(p);
  st.dec.add(dc);
  st.dlog.add(dl);
}

BenchRow finish_cell(std::size_t d, std::size_t borrowers, std::size_t reps, const CellStats& st) {
  BenchRow row;
  row.dim = d;
  row.borrowers = borrowers;
  row.reps = reps;
  row.failed = st.failed;
  row.error = st.error;
  if (st.failed) return row;
  row.encrypt_ms = st.enc.mean();
  row.score_ms = st.score.mean();
  row.keygen_ms = st.keygen.mean();
  row.project_ms = st.proj.mean();
  row.decrypt_ms = st.dec.mean();
  row.dlog_ms = st.dlog.mean();
  row.encrypt_sd = st.enc.sd();
  row.score_sd = st.score.sd();
  return row;
}

}  // namespace

void BenchPlan::validate() const {
  if (attribute_dims.empty()) throw ArgumentError("bench plan has no dimensions");
  if (borrower_counts.empty()) throw ArgumentError("bench plan has no borrower counts");
  for (auto d : attribute_dims) {
    if (d == 0) throw ArgumentError("dimension must be positive");
  }
  for (auto b : borrower_counts) {
    if (b == 0) throw ArgumentError("borrower count must be positive");
  }
  if (repetitions < 1) throw ArgumentError("repetitions must be at least 1");
  if (features == 0) throw ArgumentError("feature count must be positive");
  config.validate();
}

std::vector<BenchRow> run_bench(const BenchPlan& plan, const BenchProgress& progress) {
  plan.validate();
  struct Cell {
    std::size_t d, b;
    CellStats st;
  };
  std::vector<Cell> cells;
  for (std::size_t d : plan.attribute_dims)
    for (std::size_t b : plan.borrower_counts) cells.push_back({d, b, {}});
  // Repetition-major order over the cells.
  for (std::size_t rep = 0; rep < plan.repetitions; ++rep) {
    const bool last = rep + 1 == plan.repetitions;
    for (auto& c : cells) {
      if (!c.st.failed) {
        try {
          run_rep(plan, c.d, c.b, rep, c.st);
        } catch (const Error& e) {
          c.st.failed = true;
          c.st.error = std::string(error_code_name(e.code())) + ": " + e.what();
        }
      }
      if (progress && last) progress(finish_cell(c.d, c.b, plan.repetitions, c.st));
    }
  }
  std::vector<BenchRow> rows;
  for (const auto& c : cells) rows.push_back(finish_cell(c.d, c.b, plan.repetitions, c.st));
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << kBenchCsvHeader << '\n';
  for (const auto& r : rows) {
    if (r.failed) continue;
    char buf[512];
    std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f\n", r.dim, r.borrowers, r.reps,
                  r.encrypt_ms, r.score_ms, r.keygen_ms, r.project_ms, r.decrypt_ms, r.dlog_ms);
    out << buf;
  }
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream s;
  write_bench_csv(s, rows);
  return s.str();
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ArgumentError("fit_line: length mismatch");
  LinearFit f;
  f.points = x.size();
  f.r2 = std::numeric_limits<double>::quiet_NaN();
  if (x.empty()) return f;
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) {
    f.intercept = my;
    return f;
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double e = y[i] - (f.intercept + f.slope * x[i]);
    ssr += e * e;
  }
  f.r2 = syy == 0.0 ? 1.0 : 1.0 - ssr / syy;
  return f;
}

std::vector<std::pair<std::size_t, LinearFit>> encrypt_linearity(const std::vector<BenchRow>& rows) {
  std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> by_dim;
  for (const auto& r : rows) {
    if (r.failed) continue;
    by_dim[r.dim].first.push_back(static_cast<double>(r.borrowers));
    by_dim[r.dim].second.push_back(r.encrypt_ms);
  }
  std::vector<std::pair<std::size_t, LinearFit>> out;
  for (const auto& [d, xy] : by_dim) out.emplace_back(d, fit_line(xy.first, xy.second));
  return out;
}

std::vector<SpeedupRow> parallel_speedup(std::size_t d, std::size_t borrowers,
                                         const std::vector<std::size_t>& worker_counts, std::uint64_t seed,
                                         std::size_t features, const QuantConfig& cfg) {
  if (worker_counts.empty()) throw ArgumentError("no worker counts given");
  for (auto w : worker_counts) {
    if (w == 0) throw ArgumentError("worker counts must be at least 1");
  }
  Rng rng = Rng::from_seed(seed).derive("speedup", d);
  NetworkParams params = init_params(features, d, kLabels, rng);
  AuthoritySetup s = authority_setup(export_quantized(params, cfg), setup(), rng);
  auto records = fresh_records(borrowers, features, cfg, rng);
  auto encrypted = encrypt_batch(records, s.client, rng, 0);
  bsgs_table(setup().gt, s.evaluator.dlog_bound);

  std::vector<SpeedupRow> out;
  std::string reference;
  for (std::size_t w : worker_counts) {
    auto t0 = Clock::now();
    auto reports = score_batch(encrypted, s.evaluator, w);
    SpeedupRow row;
    row.workers = w;
    row.score_ms = ms_since(t0);
    std::string text = to_jsonl(reports);
    if (out.empty()) reference = text;
    row.identical = text == reference;
    row.speedup = out.empty() ? 1.0 : out.front().score_ms / row.score_ms;
    out.push_back(row);
  }
  return out;
}

}  // namespace qfe
