// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include "qfe/data/quantize.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qfe/common/error.hpp"

namespace qfe {
namespace {

using i128 = __int128;
constexpr i128 kI64Max = std::numeric_limits<std::int64_t>::max();

std::int64_t max_quantized(double clip, std::int64_t scale) { return quantize_value(clip, scale, clip); }

}  // namespace

void QuantConfig::validate() const {
  if (scale_x < 1 || scale_p < 1 || scale_d < 1) throw ConfigError("quantization scales must be >= 1");
  if (!std::isfinite(clip) || clip <= 0.0) throw ConfigError("quantization clip must be positive and finite");
  if (clip * static_cast<double>(std::max({scale_x, scale_p, scale_d})) > 1e15) {
    throw ConfigError("clip * scale is too large for 64-bit messages");
  }
  if (dlog_ceiling < 0) throw ConfigError("dlog ceiling must be non-negative");
}

std::int64_t QuantConfig::x_max() const { return max_quantized(clip, scale_x); }
std::int64_t QuantConfig::p_max() const { return max_quantized(clip, scale_p); }
std::int64_t QuantConfig::d_max() const { return max_quantized(clip, scale_d); }

Digest QuantConfig::digest() const {
  ByteWriter w;
  w.str("qfe-quant-config");
  w.i64(scale_x);
  w.i64(scale_p);
  w.i64(scale_d);
  w.f64(clip);
  w.i64(dlog_ceiling);
  return sha256(w.bytes());
}

nlohmann::json to_json(const QuantConfig& c) {
  return {{"scale_x", c.scale_x}, {"scale_p", c.scale_p},   {"scale_d", c.scale_d},
          {"clip", c.clip},       {"dlog_ceiling", c.dlog_ceiling}};
}

QuantConfig quant_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("quantization config must be a JSON object");
  QuantConfig c;
  try {
    for (const auto& [k, v] : j.items()) {
      if (k == "scale_x") c.scale_x = v.get<std::int64_t>();
      else if (k == "scale_p") c.scale_p = v.get<std::int64_t>();
      else if (k == "scale_d") c.scale_d = v.get<std::int64_t>();
      else if (k == "clip") c.clip = v.get<double>();
      else if (k == "dlog_ceiling") c.dlog_ceiling = v.get<std::int64_t>();
      else throw ConfigError("unknown quantization key '" + k + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad quantization config: ") + e.what());
  }
  c.validate();
  return c;
}

std::int64_t quantize_value(double v, std::int64_t scale, double clip) {
  if (scale < 1) throw ArgumentError("quantization scale must be >= 1");
  if (std::isnan(v)) throw ArgumentError("cannot quantize NaN");
  double c = std::clamp(v, -clip, clip);
  // std::round rounds halves away from zero.
  return static_cast<std::int64_t>(std::round(c * static_cast<double>(scale)));
}

std::vector<std::int64_t> quantize_vector(std::span<const double> v, std::int64_t scale, double clip) {
  std::vector<std::int64_t> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = quantize_value(v[i], scale, clip);
  return out;
}

IntMatrix quantize_matrix(const RealMatrix& m, std::int64_t scale, double clip) {
  return IntMatrix(m.rows(), m.cols(), quantize_vector(m.data(), scale, clip));
}

RealMatrix dequantize_matrix(const IntMatrix& m, std::int64_t scale) {
  RealMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.data().size(); ++i) {
    out.data()[i] = static_cast<double>(m.data()[i]) / static_cast<double>(scale);
  }
  return out;
}

QuantizedRecord quantize_record(std::span<const double> v, const QuantConfig& cfg) {
  return {quantize_vector(v, cfg.scale_x, cfg.clip), cfg.digest()};
}

std::int64_t score_bound_from_limits(std::size_t d, std::int64_t k_max, std::int64_t d_max) {
  if (k_max < 0 || d_max < 0) throw ArgumentError("score bound limits must be non-negative");
  i128 k2 = static_cast<i128>(k_max) * k_max;
  if (k2 > kI64Max) throw ConfigError("score bound overflows 64 bits");
  i128 b = k2 * static_cast<i128>(d);
  if (b > kI64Max) throw ConfigError("score bound overflows 64 bits");
  b *= d_max;
  if (b > kI64Max) throw ConfigError("score bound overflows 64 bits");
  return static_cast<std::int64_t>(b);
}

std::int64_t score_bound(const QuantConfig& cfg, std::size_t n, std::size_t d) {
  if (n == 0 || d == 0) throw ArgumentError("score_bound: dimensions must be positive");
  cfg.validate();
  i128 k = static_cast<i128>(n) * cfg.x_max() * cfg.p_max();
  if (k > kI64Max) throw ConfigError("score bound overflows 64 bits");
  std::int64_t b = score_bound_from_limits(d, static_cast<std::int64_t>(k), cfg.d_max());
  if (b > cfg.dlog_ceiling) {
    throw ConfigError("score bound " + std::to_string(b) + " for n=" + std::to_string(n) + ", d=" +
                      std::to_string(d) + " exceeds the dlog ceiling " + std::to_string(cfg.dlog_ceiling) +
                      "; use smaller scales");
  }
  return b;
}

double dequantize_score(std::int64_t raw, const QuantConfig& cfg) {
  const double sxp = static_cast<double>(cfg.scale_x) * static_cast<double>(cfg.scale_p);
  return static_cast<double>(raw) / (sxp * sxp * static_cast<double>(cfg.scale_d));
}

ErrorBudget quantization_error_budget(const RealMatrix& pr, const RealMatrix& d, const IntMatrix& pr_int,
                                      const IntMatrix& d_int, const QuantConfig& cfg) {
  const std::size_t n = pr.rows(), h = pr.cols(), l = d.cols();
  if (d.rows() != h || pr_int.rows() != n || pr_int.cols() != h || d_int.rows() != h || d_int.cols() != l) {
    throw ArgumentError("quantization_error_budget: shape mismatch");
  }
  const double X = cfg.clip;
  const double dx = 0.5 / static_cast<double>(cfg.scale_x);
  const double sp = static_cast<double>(cfg.scale_p);
  const double sd = static_cast<double>(cfg.scale_d);

  // Per hidden unit: bounds on |K_j|, |K^_j| and |K_j - K^_j|.
  std::vector<double> kmax(h, 0.0), khat(h, 0.0), kerr(h, 0.0);
  for (std::size_t j = 0; j < h; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = pr(i, j);
      const double ph = static_cast<double>(pr_int(i, j)) / sp;
      kmax[j] += X * std::abs(p);
      khat[j] += (X + dx) * std::abs(ph);
      kerr[j] += X * std::abs(p - ph) + dx * std::abs(ph);
    }
  }
  ErrorBudget out;
  out.score.assign(l, 0.0);
  for (std::size_t c = 0; c < l; ++c) {
    for (std::size_t j = 0; j < h; ++j) {
      const double dh = static_cast<double>(d_int(j, c)) / sd;
      out.score[c] += std::abs(d(j, c) - dh) * kmax[j] * kmax[j] + std::abs(dh) * kerr[j] * (kmax[j] + khat[j]);
    }
  }
  double total = 0.0;
  for (double e : out.score) total += e;
  // Softmax over two labels is the logistic of the score difference, whose
  // slope never exceeds 1/4.
  out.probability = total / 4.0;
  // Absorb float rounding in the two forward passes themselves.
  for (double& e : out.score) e = e * (1.0 + 1e-9) + 1e-9;
  out.probability = out.probability * (1.0 + 1e-9) + 1e-12;
  return out;
}

}  // namespace qfe
