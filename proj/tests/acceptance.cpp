// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "qfe/bench/bench.hpp"
#include "qfe/common/log.hpp"
#include "qfe/pairing/dlog.hpp"
#include "qfe/pipeline/pipeline.hpp"
#include "qfe/wire/services.hpp"

using namespace qfe;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

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

// Independent plaintext oracles: direct sums, no library helpers.
std::int64_t brute_form(const IntMatrix& f, std::span<const std::int64_t> x, std::span<const std::int64_t> y) {
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < f.rows(); ++i)
    for (std::size_t j = 0; j < f.cols(); ++j) acc += f(i, j) * x[i] * y[j];
  return acc;
}

std::vector<std::int64_t> brute_project(const IntMatrix& pr, std::span<const std::int64_t> x) {
  std::vector<std::int64_t> k(pr.cols(), 0);
  for (std::size_t j = 0; j < pr.cols(); ++j)
    for (std::size_t i = 0; i < pr.rows(); ++i) k[j] += pr(i, j) * x[i];
  return k;
}

std::vector<std::int64_t> brute_scores(std::span<const std::int64_t> x, const IntMatrix& pr, const IntMatrix& d) {
  auto k = brute_project(pr, x);
  std::vector<std::int64_t> s(d.cols(), 0);
  for (std::size_t l = 0; l < d.cols(); ++l)
    for (std::size_t j = 0; j < k.size(); ++j) s[l] += d(j, l) * k[j] * k[j];
  return s;
}

std::vector<double> unit_record(std::size_t n, Rng& rng) {
  std::vector<double> x(n);
  for (auto& v : x) v = rng.uniform01();
  return x;
}

// 1. SGP decrypt equals the brute-force bilinear form.
Outcome sgp_correctness() {
  Rng rng = Rng::from_seed(101);
  const auto t0 = Clock::now();
  int ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(8);
    auto msk = generate_master_key(n, setup(), rng);
    auto x = rand_vec(rng, n, 10), y = rand_vec(rng, n, 10);
    FMatrix f(rand_mat(rng, n, n, 10));
    auto c = encrypt(x, y, msk, rng, 10);
    // |x^T F y| <= 8 * 8 * 10^3
    if (decrypt(c, derive_key(msk, f), f, 64000) == brute_form(f.entries(), x, y)) ++ok;
  }
  const double s = seconds_since(t0);
  return {ok == 100 && s < 60.0, std::to_string(ok) + "/100 exact, " + fmt("%.1f s", s) + " (limit 60 s)"};
}

// 2. Projected ciphertext and key decrypt to (Pr^T x)^T F (Pr^T x).
Outcome projection_correctness() {
  Rng rng = Rng::from_seed(102);
  int ok = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(6);
    const std::size_t d = 1 + rng.below(std::min<std::size_t>(3, n));
    auto msk = generate_master_key(n, setup(), rng);
    auto x = rand_vec(rng, n, 10);
    IntMatrix pr = rand_mat(rng, n, d, 10);
    FMatrix f(rand_mat(rng, d, d, 10));
    auto pc = project_encryption(encrypt(x, x, msk, rng, 10), pr);
    auto key = derive_key(project_secret_key(msk, pr), f);
    auto k = brute_project(pr, x);
    if (decrypt(pc, key, f, 9 * 10 * 360000) == brute_form(f.entries(), k, k)) ++ok;
  }
  return {ok == 50, std::to_string(ok) + "/50 exact"};
}

// 3. square(x . Pr) . D_i == K^T Diag_i K in integers.
Outcome diagonal_identity() {
  Rng rng = Rng::from_seed(103);
  int ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.below(16), d = 1 + rng.below(8);
    auto x = rand_vec(rng, n, 16);
    IntMatrix pr = rand_mat(rng, n, d, 16), dm = rand_mat(rng, d, 2, 16);
    auto lhs = forward_int(x, pr, dm);
    auto k = project_record(x, pr);
    bool all = lhs == brute_scores(x, pr, dm);
    for (std::size_t i = 0; i < 2; ++i) {
      auto col = dm.column(i);
      all = all && lhs[i] == quadratic_form(k, diagonalize<std::int64_t>(col));
    }
    ok += all;
  }
  return {ok == 100, std::to_string(ok) + "/100 exact"};
}

// 4. FE path at n = 130, d = 20 reproduces the integer forward pass and
// stays within the quantization budget of the float network.
Outcome end_to_end_exactness() {
  const std::size_t n = 130, d = 20;
  const QuantConfig cfg = QuantConfig::desk();
  Rng rng = Rng::from_seed(104);
  NetworkParams p = init_params(n, d, kLabels, rng);
  QuantizedModel qm = export_quantized(p, cfg);
  AuthoritySetup s = authority_setup(qm, setup(), rng);
  ErrorBudget budget = quantization_error_budget(p.pr, p.d_mat, qm.pr_int, qm.d_int, cfg);
  bsgs_table(setup().gt, s.evaluator.dlog_bound);
  int exact = 0, within = 0;
  double worst = 0.0;
  const auto t0 = Clock::now();
  for (int i = 0; i < 100; ++i) {
    auto x = unit_record(n, rng);
    auto q = quantize_record(x, cfg);
    auto raw = evaluator_score(client_encrypt(q, s.client, rng), s.evaluator);
    exact += raw == brute_scores(q.values, qm.pr_int, qm.d_int);
    auto fe = probabilities(raw, cfg);
    auto fl = softmax(forward(x, p));
    double gap = std::max(std::abs(fe[0] - fl[0]), std::abs(fe[1] - fl[1]));
    worst = std::max(worst, gap);
    within += gap <= budget.probability;
  }
  return {exact == 100 && within == 100,
          std::to_string(exact) + "/100 exact, " + std::to_string(within) + "/100 within budget (max gap " +
              fmt("%.2e", worst) + ", budget " + fmt("%.2e", budget.probability) + "), " +
              fmt("%.1f s", seconds_since(t0))};
}

double loss_only(const RealMatrix& x, const std::vector<int>& y, const NetworkParams& p) {
  Gradients g;
  return loss_and_gradients(x, y, p, g);
}

// 5. Analytic gradients vs central differences.
Outcome gradient_check() {
  Rng rng = Rng::from_seed(105);
  double worst = 0.0;
  int ok = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.below(4), d = 1 + rng.below(3), rows = 1 + rng.below(5);
    NetworkParams p{RealMatrix(n, d), RealMatrix(d, 2)};
    for (auto& v : p.pr.data()) v = 0.8 * (2.0 * rng.uniform01() - 1.0);
    for (auto& v : p.d_mat.data()) v = 0.8 * (2.0 * rng.uniform01() - 1.0);
    RealMatrix x(rows, n);
    for (auto& v : x.data()) v = rng.uniform01();
    std::vector<int> y(rows);
    for (auto& v : y) v = static_cast<int>(rng.below(2));
    Gradients g;
    loss_and_gradients(x, y, p, g);
    double net_worst = 0.0;
    auto check = [&](std::vector<double>& w, const std::vector<double>& analytic) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double h = 1e-6, orig = w[i];
        w[i] = orig + h;
        const double up = loss_only(x, y, p);
        w[i] = orig - h;
        const double dn = loss_only(x, y, p);
        w[i] = orig;
        const double num = (up - dn) / (2 * h);
        const double den = std::max({std::abs(analytic[i]), std::abs(num), 1e-10});
        net_worst = std::max(net_worst, std::abs(analytic[i] - num) / den);
      }
    };
    check(p.pr.data(), g.pr.data());
    check(p.d_mat.data(), g.d_mat.data());
    worst = std::max(worst, net_worst);
    ok += net_worst <= 1e-4;
  }
  return {ok == 20, std::to_string(ok) + "/20 networks, worst relative error " + fmt("%.2e", worst)};
}

// 6. Encrypt time grows linearly with the borrower count at each d.
Outcome linearity() {
  BenchPlan plan;
  plan.attribute_dims = {5, 20};
  plan.borrower_counts = {1, 10, 25, 50, 100};
  plan.repetitions = 3;
  plan.seed = 106;
  auto rows = run_bench(plan);
  bool pass = true;
  std::string detail;
  for (const auto& r : rows) {
    if (r.failed) {
      pass = false;
      detail += "cell d=" + std::to_string(r.dim) + " b=" + std::to_string(r.borrowers) + " failed: " + r.error + "; ";
    }
  }
  auto fits = encrypt_linearity(rows);
  if (fits.size() != plan.attribute_dims.size()) pass = false;
  for (const auto& [d, fit] : fits) {
    const bool good = !std::isnan(fit.r2) && fit.r2 >= 0.99;
    pass = pass && good;
    detail += "d=" + std::to_string(d) + ": R^2 " + fmt("%.4f", fit.r2) + ", " + fmt("%.2f ms/borrower", fit.slope) +
              "; ";
  }
  detail += "n=130, borrowers {1,10,25,50,100}, 3 reps";
  return {pass, detail};
}

// 7. Reports are bit-identical across worker counts; the speedup clause
// applies on hosts with at least four hardware threads.
Outcome parallel_scoring() {
  const unsigned cores = std::thread::hardware_concurrency();
  auto rows = parallel_speedup(20, 100, {1, 2, 4}, 107);
  bool identical = true;
  std::string detail;
  for (const auto& r : rows) {
    identical = identical && r.identical;
    detail += std::to_string(r.workers) + "w " + fmt("%.0f ms", r.score_ms) + (r.identical ? "" : " DIFFERENT") + ", ";
  }
  const double speedup4 = rows.back().speedup;
  detail += "speedup at 4 workers " + fmt("%.2fx", speedup4) + " on " + std::to_string(cores) + " hardware threads";
  bool pass = identical;
  if (cores >= 4) {
    pass = pass && speedup4 > 1.0;
  } else {
    detail += " (speedup clause needs >= 4 cores, not applicable here)";
  }
  return {pass, (identical ? "bit-identical; " : "reports differ; ") + detail};
}

// 8. No master-key fields reach the evaluator; remote output equals local.
Outcome trust_boundary() {
  const std::size_t n = 130, d = 20;
  Rng rng = Rng::from_seed(108);
  AuthoritySetup s = authority_setup(export_quantized(init_params(n, d, kLabels, rng), QuantConfig::desk()),
                                     setup(), rng);
  const bool bundle_clean = !contains_any_tag(serialize(s.evaluator), kMasterKeyTags);

  std::mutex mu;
  std::vector<std::string> lines;
  WireTap tap = [&](std::string_view, std::string_view line) {
    std::lock_guard<std::mutex> lock(mu);
    lines.emplace_back(line);
  };
  AuthorityServiceConfig acfg;
  acfg.listen = {"127.0.0.1", 0};
  auto auth = serve_authority(s, acfg);
  EvaluatorServiceConfig ecfg;
  ecfg.listen = {"127.0.0.1", 0};
  ecfg.authority = ServiceAddress{"127.0.0.1", auth->port()};
  ecfg.workers = 2;
  ecfg.tap = tap;
  auto eval = serve_evaluator(ecfg);

  std::vector<BorrowerRecord> recs;
  for (std::uint64_t b = 0; b < 10; ++b) recs.push_back({b * 11, quantize_record(unit_record(n, rng), s.client.config)});
  ClientBundle cb = fetch_client_bundle({"127.0.0.1", auth->port()}, "");
  SubmitOptions opts;
  opts.workers = 2;
  opts.tap = tap;
  auto remote = client_submit({"127.0.0.1", eval->port()}, recs, cb, Rng::from_seed(1108), opts);
  auto local = score_batch(encrypt_batch(recs, s.client, Rng::from_seed(1108), 1), s.evaluator, 1);
  eval->stop();
  auth->stop();

  std::size_t dirty = 0;
  for (const auto& line : lines) dirty += contains_any_tag(decode_envelope(line).payload, kMasterKeyTags);
  const bool same = to_jsonl(remote) == to_jsonl(local);
  return {bundle_clean && dirty == 0 && same && !lines.empty(),
          std::string("evaluator bundle ") + (bundle_clean ? "clean" : "HAS MASTER-KEY FIELDS") + ", " +
              std::to_string(lines.size()) + " evaluator-bound/-sent messages, " + std::to_string(dirty) +
              " with master-key fields, remote " + (same ? "==" : "!=") + " local over 10 borrowers"};
}

// 9. Desk-profile scores stay inside the dlog window; a mis-scaled record
// raises the typed error instead of a wrong score.
Outcome dlog_window() {
  const std::size_t n = 130, d = 20;
  const QuantConfig cfg = QuantConfig::desk();
  Rng rng = Rng::from_seed(109);
  // Weights span the full clip range.
  NetworkParams p{RealMatrix(n, d), RealMatrix(d, kLabels)};
  for (auto& v : p.pr.data()) v = 2.0 * rng.uniform01() - 1.0;
  for (auto& v : p.d_mat.data()) v = 2.0 * rng.uniform01() - 1.0;
  QuantizedModel qm = export_quantized(p, cfg);
  const std::int64_t bound = score_bound(cfg, n, d);
  std::int64_t peak = 0;
  int inside = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> x(n);
    for (auto& v : x) v = 2.0 * rng.uniform01() - 1.0;
    auto raw = brute_scores(quantize_record(x, cfg).values, qm.pr_int, qm.d_int);
    bool ok = true;
    for (auto r : raw) {
      peak = std::max(peak, std::abs(r));
      ok = ok && std::abs(r) <= bound;
    }
    inside += ok;
  }

  AuthoritySetup s = authority_setup(qm, setup(), rng);
  std::vector<std::int64_t> mis(n, cfg.x_max() * 64);
  auto plain = brute_scores(mis, qm.pr_int, qm.d_int);
  const bool outside = std::abs(plain[0]) > bound || std::abs(plain[1]) > bound;
  std::string typed = "no error raised";
  bool raised = false;
  try {
    Rng r = rng.derive("mis", 0);
    auto c = project_encryption(encrypt(mis, mis, s.client.msk, r, cfg.x_max() * 64), s.client.pr_int);
    evaluator_score(c, s.evaluator);
  } catch (const DlogRangeError& e) {
    raised = true;
    typed = std::string(error_code_name(e.code())) + ": " + e.what();
  } catch (const Error& e) {
    typed = std::string("wrong error type ") + error_code_name(e.code()) + ": " + e.what();
  }
  return {inside == 1000 && outside && raised,
          std::to_string(inside) + "/1000 within bound " + std::to_string(bound) + " (peak " + std::to_string(peak) +
              "); mis-scaled record -> " + typed};
}

}  // namespace

// Optional arguments select criteria by number.
int main(int argc, char** argv) {
  set_log_level(LogLevel::kOff);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"FE correctness oracle", sgp_correctness},
      {"projection correctness", projection_correctness},
      {"diagonal quadratic-form identity", diagonal_identity},
      {"end-to-end exactness at n=130 d=20", end_to_end_exactness},
      {"gradient check", gradient_check},
      {"encrypt-time linearity", linearity},
      {"parallel scoring", parallel_scoring},
      {"trust-boundary hygiene", trust_boundary},
      {"dlog window safety", dlog_window},
  };
  std::vector<bool> selected(criteria.size(), argc < 2);
  for (int i = 1; i < argc; ++i) {
    const int k = std::atoi(argv[i]);
    if (k < 1 || k > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion '%s'\n", argv[i]);
      return 2;
    }
    selected[static_cast<std::size_t>(k - 1)] = true;
  }
  int failed = 0, index = 0, ran = 0;
  for (const auto& [name, fn] : criteria) {
    if (!selected[static_cast<std::size_t>(index++)]) continue;
    ++ran;
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = fn();
    } catch (const Error& e) {
      o = {false, std::string("error[") + error_code_name(e.code()) + "]: " + e.what()};
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s [%d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
