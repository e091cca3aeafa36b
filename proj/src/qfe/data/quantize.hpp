// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

// Fixed-point quantization of records and weights into the integer message
// space, plus the score bound that sizes the discrete-log window.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "qfe/common/bytes.hpp"
#include "qfe/common/matrix.hpp"

namespace qfe {

struct QuantConfig {
  std::int64_t scale_x = 16;  // record features
  std::int64_t scale_p = 16;  // first-layer weights Pr
  std::int64_t scale_d = 16;  // hidden-layer weights D
  double clip = 1.0;          // |value| is clamped to clip before scaling
  std::int64_t dlog_ceiling = std::int64_t{1} << 40;

  // The desk profile: 4-bit scales, unit clip.
  static QuantConfig desk() { return {}; }

  // Throws ConfigError on non-positive scales or a non-finite clip.
  void validate() const;

  // Largest possible |quantized value| per kind.
  std::int64_t x_max() const;
  std::int64_t p_max() const;
  std::int64_t d_max() const;
  std::int64_t message_bound() const { return x_max(); }

  // Identifies the config in every downstream artifact.
  Digest digest() const;

  friend bool operator==(const QuantConfig&, const QuantConfig&) = default;
};

nlohmann::json to_json(const QuantConfig& cfg);
// Missing keys keep their defaults; unknown keys are rejected.
QuantConfig quant_config_from_json(const nlohmann::json& j);

struct QuantizedRecord {
  std::vector<std::int64_t> values;
  Digest config_id{};
};

// round(clamp(v, -clip, clip) * scale), halves rounded away from zero.
std::int64_t quantize_value(double v, std::int64_t scale, double clip);
std::vector<std::int64_t> quantize_vector(std::span<const double> v, std::int64_t scale, double clip);
IntMatrix quantize_matrix(const RealMatrix& m, std::int64_t scale, double clip);
RealMatrix dequantize_matrix(const IntMatrix& m, std::int64_t scale);
QuantizedRecord quantize_record(std::span<const double> v, const QuantConfig& cfg);

// d * k_max^2 * d_max: bounds sum_j D_j K_j^2 when |K_j| <= k_max and
// |D_j| <= d_max. ConfigError on int64 overflow.
std::int64_t score_bound_from_limits(std::size_t d, std::int64_t k_max, std::int64_t d_max);

// Bound on |score| for any record and model quantized under cfg, with
// k_max = n * x_max * p_max. ConfigError if it exceeds cfg.dlog_ceiling.
std::int64_t score_bound(const QuantConfig& cfg, std::size_t n, std::size_t d);

// raw / ((scale_x * scale_p)^2 * scale_d)
double dequantize_score(std::int64_t raw, const QuantConfig& cfg);

// Worst-case gap between the float network and the dequantized integer
// network, over all inputs with |x_i| <= clip, for these particular
// weights and their quantized forms.
struct ErrorBudget {
  std::vector<double> score;  // per label
  double probability = 0.0;   // two-label softmax, sum of score errors / 4
};

ErrorBudget quantization_error_budget(const RealMatrix& pr, const RealMatrix& d, const IntMatrix& pr_int,
                                      const IntMatrix& d_int, const QuantConfig& cfg);

}  // namespace qfe
