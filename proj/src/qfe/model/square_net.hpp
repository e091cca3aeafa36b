// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

// One hidden layer, square activation, no biases:
//   scores = square(x . Pr) . D
// Trained with softmax cross-entropy and Adam.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qfe/common/bytes.hpp"
#include "qfe/common/matrix.hpp"
#include "qfe/common/rng.hpp"
#include "qfe/data/quantize.hpp"

namespace qfe {

struct NetworkParams {
  RealMatrix pr;     // n x d
  RealMatrix d_mat;  // d x l

  std::size_t n() const { return pr.rows(); }
  std::size_t d() const { return pr.cols(); }
  std::size_t l() const { return d_mat.cols(); }
  // Throws ArgumentError on inconsistent shapes or non-finite entries.
  void validate() const;

  friend bool operator==(const NetworkParams&, const NetworkParams&) = default;
};

struct TrainConfig {
  double learning_rate = 1e-4;
  std::size_t batch_size = 32;
  std::size_t epochs = 50;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 1;
  std::size_t hidden = 20;    // d
  std::size_t labels = 2;     // l
  double grad_clip = 5.0;     // global-norm clip, 0 disables
  std::size_t workers = 1;    // data-parallel gradient accumulation

  void validate() const;
};

struct Gradients {
  RealMatrix pr;
  RealMatrix d_mat;
};

std::vector<double> forward(std::span<const double> x, const NetworkParams& p);

// Mean softmax cross-entropy over the rows of x with class-index labels.
double loss_and_gradients(const RealMatrix& x, std::span<const int> labels, const NetworkParams& p, Gradients& grads);

// Same, restricted to the given rows of x.
double loss_and_gradients(const RealMatrix& x, std::span<const int> labels, std::span<const std::size_t> rows,
                          const NetworkParams& p, Gradients& grads);

NetworkParams init_params(std::size_t n, std::size_t d, std::size_t l, Rng& rng);

struct TrainResult {
  NetworkParams params;
  std::vector<double> epoch_losses;  // mean minibatch loss per epoch
};

// epoch counts from 1.
using EpochCallback = std::function<void(std::size_t epoch, double loss)>;

// Throws DivergenceError naming the epoch when the loss becomes non-finite.
TrainResult train(const RealMatrix& x, std::span<const int> labels, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

template <class T>
Matrix<T> diagonalize(std::span<const T> col) {
  Matrix<T> m(col.size(), col.size());
  for (std::size_t i = 0; i < col.size(); ++i) m(i, i) = col[i];
  return m;
}

struct QuantizedModel {
  IntMatrix pr_int;  // n x d
  IntMatrix d_int;   // d x l
  QuantConfig config;
  Digest config_digest{};

  std::size_t n() const { return pr_int.rows(); }
  std::size_t d() const { return pr_int.cols(); }
  std::size_t l() const { return d_int.cols(); }
};

QuantizedModel export_quantized(const NetworkParams& p, const QuantConfig& cfg);

// Exact integer forward pass: sum_j D_ij (x . Pr_j)^2 per label.
std::vector<std::int64_t> forward_int(std::span<const std::int64_t> x, const IntMatrix& pr, const IntMatrix& d);

// K = Pr^T x and the quadratic form K^T Diag(d_col) K, computed separately
// from forward_int so the two can be cross-checked.
std::vector<std::int64_t> project_record(std::span<const std::int64_t> x, const IntMatrix& pr);
std::int64_t quadratic_form(std::span<const std::int64_t> k, const IntMatrix& f);

std::vector<double> softmax(std::span<const double> scores);

}  // namespace qfe
