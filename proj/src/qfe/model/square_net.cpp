// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include "qfe/model/square_net.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

#include "qfe/common/error.hpp"
#include "qfe/common/rng.hpp"

namespace qfe {
namespace {

void zero(Gradients& g, const NetworkParams& p) {
  g.pr = RealMatrix(p.pr.rows(), p.pr.cols());
  g.d_mat = RealMatrix(p.d_mat.rows(), p.d_mat.cols());
}

void add_into(Gradients& acc, const Gradients& g) {
  for (std::size_t i = 0; i < acc.pr.data().size(); ++i) acc.pr.data()[i] += g.pr.data()[i];
  for (std::size_t i = 0; i < acc.d_mat.data().size(); ++i) acc.d_mat.data()[i] += g.d_mat.data()[i];
}

// Sum (not mean) of per-sample losses and gradients over rows.
double accumulate(const RealMatrix& x, std::span<const int> labels, std::span<const std::size_t> rows,
                  const NetworkParams& p, Gradients& g) {
  const std::size_t n = p.n(), d = p.d(), l = p.l();
  std::vector<double> z(d), h(d), s(l), ds(l), dz(d);
  double loss = 0.0;
  for (std::size_t r : rows) {
    auto xr = x.row(r);
    std::fill(z.begin(), z.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (xr[i] == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) z[j] += xr[i] * p.pr(i, j);
    }
    for (std::size_t j = 0; j < d; ++j) h[j] = z[j] * z[j];
    for (std::size_t c = 0; c < l; ++c) {
      s[c] = 0.0;
      for (std::size_t j = 0; j < d; ++j) s[c] += h[j] * p.d_mat(j, c);
    }
    const double m = *std::max_element(s.begin(), s.end());
    double denom = 0.0;
    for (std::size_t c = 0; c < l; ++c) denom += std::exp(s[c] - m);
    const auto y = static_cast<std::size_t>(labels[r]);
    loss += -(s[y] - m - std::log(denom));
    for (std::size_t c = 0; c < l; ++c) ds[c] = std::exp(s[c] - m) / denom - (c == y ? 1.0 : 0.0);

    for (std::size_t j = 0; j < d; ++j) {
      double dh = 0.0;
      for (std::size_t c = 0; c < l; ++c) {
        g.d_mat(j, c) += h[j] * ds[c];
        dh += p.d_mat(j, c) * ds[c];
      }
      dz[j] = 2.0 * z[j] * dh;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (xr[i] == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) g.pr(i, j) += xr[i] * dz[j];
    }
  }
  return loss;
}

double batch_step(const RealMatrix& x, std::span<const int> labels, std::span<const std::size_t> rows,
                  const NetworkParams& p, Gradients& g, std::size_t workers) {
  zero(g, p);
  if (rows.empty()) return 0.0;
  double loss = 0.0;
  workers = std::min(workers, rows.size());
  if (workers <= 1) {
    loss = accumulate(x, labels, rows, p, g);
  } else {
    // Contiguous chunks, reduced in chunk order: deterministic for a fixed
    // worker count.
    std::vector<Gradients> parts(workers);
    std::vector<double> losses(workers, 0.0);
    std::vector<std::thread> pool;
    const std::size_t per = (rows.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      zero(parts[w], p);
      const std::size_t lo = std::min(rows.size(), w * per), hi = std::min(rows.size(), lo + per);
      pool.emplace_back([&, w, lo, hi] { losses[w] = accumulate(x, labels, rows.subspan(lo, hi - lo), p, parts[w]); });
    }
    for (auto& t : pool) t.join();
    for (std::size_t w = 0; w < workers; ++w) {
      add_into(g, parts[w]);
      loss += losses[w];
    }
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (auto& v : g.pr.data()) v *= inv;
  for (auto& v : g.d_mat.data()) v *= inv;
  return loss * inv;
}

void check_labels(const RealMatrix& x, std::span<const int> labels, std::size_t l) {
  if (labels.size() != x.rows()) throw ArgumentError("label count does not match row count");
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= l) throw ArgumentError("label " + std::to_string(y) + " out of range");
  }
}

}  // namespace

void NetworkParams::validate() const {
  if (pr.rows() == 0 || pr.cols() == 0 || d_mat.cols() == 0) throw ArgumentError("network dimensions must be positive");
  if (d_mat.rows() != pr.cols()) {
    throw ArgumentError("D has " + std::to_string(d_mat.rows()) + " rows but Pr has " + std::to_string(pr.cols()) +
                        " columns");
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(pr.data().begin(), pr.data().end(), finite) ||
      !std::all_of(d_mat.data().begin(), d_mat.data().end(), finite)) {
    throw ArgumentError("network weights must be finite");
  }
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0) || batch_size == 0 || epochs == 0 || hidden == 0 || labels < 2 || workers == 0) {
    throw ConfigError("training hyperparameters must be positive");
  }
  if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1) || !(epsilon > 0) || !(grad_clip >= 0)) {
    throw ConfigError("invalid Adam parameters");
  }
}

std::vector<double> forward(std::span<const double> x, const NetworkParams& p) {
  if (x.size() != p.n()) {
    throw ArgumentError("forward: input has " + std::to_string(x.size()) + " features, network expects " +
                        std::to_string(p.n()));
  }
  if (p.d_mat.rows() != p.d()) throw ArgumentError("forward: inconsistent network shapes");
  std::vector<double> s(p.l(), 0.0);
  for (std::size_t j = 0; j < p.d(); ++j) {
    double z = 0.0;
    for (std::size_t i = 0; i < p.n(); ++i) z += x[i] * p.pr(i, j);
    const double h = z * z;
    for (std::size_t c = 0; c < p.l(); ++c) s[c] += h * p.d_mat(j, c);
  }
  return s;
}

double loss_and_gradients(const RealMatrix& x, std::span<const int> labels, std::span<const std::size_t> rows,
                          const NetworkParams& p, Gradients& grads) {
  p.validate();
  if (x.cols() != p.n()) throw ArgumentError("loss_and_gradients: feature count mismatch");
  check_labels(x, labels, p.l());
  if (rows.empty()) throw ArgumentError("loss_and_gradients: empty batch");
  return batch_step(x, labels, rows, p, grads, 1);
}

double loss_and_gradients(const RealMatrix& x, std::span<const int> labels, const NetworkParams& p, Gradients& grads) {
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), 0);
  return loss_and_gradients(x, labels, rows, p, grads);
}

NetworkParams init_params(std::size_t n, std::size_t d, std::size_t l, Rng& rng) {
  // Glorot uniform.
  auto fill = [&](RealMatrix& m, std::size_t fan_in, std::size_t fan_out) {
    const double lim = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (auto& v : m.data()) v = (2.0 * rng.uniform01() - 1.0) * lim;
  };
  NetworkParams p{RealMatrix(n, d), RealMatrix(d, l)};
  fill(p.pr, n, d);
  fill(p.d_mat, d, l);
  return p;
}

TrainResult train(const RealMatrix& x, std::span<const int> labels, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  cfg.validate();
  if (x.rows() == 0 || x.cols() == 0) throw DegenerateDatasetError("training set is empty");
  check_labels(x, labels, cfg.labels);

  Rng rng = Rng::from_seed(cfg.seed);
  Rng init_rng = rng.derive("init", 0);
  TrainResult out{init_params(x.cols(), cfg.hidden, cfg.labels, init_rng), {}};
  NetworkParams& p = out.params;

  Gradients g, m1, m2;
  zero(m1, p);
  zero(m2, p);
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), 0);
  std::uint64_t step = 0;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng shuffle = rng.derive("shuffle", epoch);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);

    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t lo = 0; lo < order.size(); lo += cfg.batch_size) {
      const std::size_t hi = std::min(order.size(), lo + cfg.batch_size);
      std::span<const std::size_t> rows(order.data() + lo, hi - lo);
      const double loss = batch_step(x, labels, rows, p, g, cfg.workers);
      if (!std::isfinite(loss)) {
        throw DivergenceError("training diverged at epoch " + std::to_string(epoch) + " (non-finite loss)");
      }
      loss_sum += loss;
      ++batches;

      if (cfg.grad_clip > 0) {
        double norm2 = 0.0;
        for (double v : g.pr.data()) norm2 += v * v;
        for (double v : g.d_mat.data()) norm2 += v * v;
        const double norm = std::sqrt(norm2);
        if (norm > cfg.grad_clip) {
          const double s = cfg.grad_clip / norm;
          for (auto& v : g.pr.data()) v *= s;
          for (auto& v : g.d_mat.data()) v *= s;
        }
      }

      ++step;
      const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
      auto adam = [&](std::vector<double>& w, const std::vector<double>& gr, std::vector<double>& m,
                      std::vector<double>& v) {
        for (std::size_t i = 0; i < w.size(); ++i) {
          m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gr[i];
          v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * gr[i] * gr[i];
          w[i] -= cfg.learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg.epsilon);
        }
      };
      adam(p.pr.data(), g.pr.data(), m1.pr.data(), m2.pr.data());
      adam(p.d_mat.data(), g.d_mat.data(), m1.d_mat.data(), m2.d_mat.data());
    }
    const double mean = loss_sum / static_cast<double>(batches);
    out.epoch_losses.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  return out;
}

QuantizedModel export_quantized(const NetworkParams& p, const QuantConfig& cfg) {
  p.validate();
  cfg.validate();
  return {quantize_matrix(p.pr, cfg.scale_p, cfg.clip), quantize_matrix(p.d_mat, cfg.scale_d, cfg.clip), cfg,
          cfg.digest()};
}

std::vector<std::int64_t> project_record(std::span<const std::int64_t> x, const IntMatrix& pr) {
  if (x.size() != pr.rows()) throw ArgumentError("project_record: dimension mismatch");
  std::vector<std::int64_t> k(pr.cols(), 0);
  for (std::size_t j = 0; j < pr.cols(); ++j)
    for (std::size_t i = 0; i < pr.rows(); ++i) k[j] += x[i] * pr(i, j);
  return k;
}

std::int64_t quadratic_form(std::span<const std::int64_t> k, const IntMatrix& f) {
  if (f.rows() != k.size() || f.cols() != k.size()) throw ArgumentError("quadratic_form: dimension mismatch");
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < k.size(); ++i)
    for (std::size_t j = 0; j < k.size(); ++j) acc += k[i] * f(i, j) * k[j];
  return acc;
}

std::vector<std::int64_t> forward_int(std::span<const std::int64_t> x, const IntMatrix& pr, const IntMatrix& d) {
  if (x.size() != pr.rows() || d.rows() != pr.cols()) throw ArgumentError("forward_int: dimension mismatch");
  std::vector<std::int64_t> s(d.cols(), 0);
  for (std::size_t j = 0; j < pr.cols(); ++j) {
    std::int64_t z = 0;
    for (std::size_t i = 0; i < pr.rows(); ++i) z += x[i] * pr(i, j);
    for (std::size_t c = 0; c < d.cols(); ++c) s[c] += z * z * d(j, c);
  }
  return s;
}

std::vector<double> softmax(std::span<const double> scores) {
  std::vector<double> out(scores.size());
  if (scores.empty()) return out;
  const double m = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) sum += (out[i] = std::exp(scores[i] - m));
  for (double& v : out) v /= sum;
  return out;
}

}  // namespace qfe
