// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include "qfe/app/run_config.hpp"

#include "qfe/model/model_io.hpp"

namespace qfe {
namespace {

void require_object(const nlohmann::json& j, const std::string& what) {
  if (!j.is_object()) throw ConfigError(what + " must be a JSON object");
}

CleaningPolicy cleaning_from_json(const nlohmann::json& j) {
  require_object(j, "cleaning");
  CleaningPolicy p;
  for (const auto& [k, v] : j.items()) {
    if (k == "label_column") p.label_column = v.get<std::string>();
    else if (k == "null_column_threshold") p.null_column_threshold = v.get<double>();
    else if (k == "outlier_sigma") p.outlier_sigma = v.get<double>();
    else throw ConfigError("unknown cleaning key '" + k + "'");
  }
  if (!(p.null_column_threshold >= 0.0 && p.null_column_threshold <= 1.0)) {
    throw ConfigError("null_column_threshold must lie in [0, 1]");
  }
  if (!(p.outlier_sigma > 0.0)) throw ConfigError("outlier_sigma must be positive");
  return p;
}

BenchPlan bench_from_json(const nlohmann::json& j) {
  require_object(j, "bench");
  BenchPlan p;
  for (const auto& [k, v] : j.items()) {
    if (k == "dims") p.attribute_dims = v.get<std::vector<std::size_t>>();
    else if (k == "borrowers") p.borrower_counts = v.get<std::vector<std::size_t>>();
    else if (k == "repetitions") p.repetitions = v.get<std::size_t>();
    else if (k == "features") p.features = v.get<std::size_t>();
    else if (k == "workers") p.workers = v.get<std::size_t>();
    else if (k == "seed") p.seed = v.get<std::uint64_t>();
    else throw ConfigError("unknown bench key '" + k + "'");
  }
  return p;
}

}  // namespace

RunConfig run_config_from_json(const nlohmann::json& j) {
  require_object(j, "run config");
  RunConfig c;
  try {
    for (const auto& [k, v] : j.items()) {
      if (k == "quantization") {
        c.quantization = quant_config_from_json(v);
      } else if (k == "train") {
        c.train = train_config_from_json(v);
      } else if (k == "cleaning") {
        c.cleaning = cleaning_from_json(v);
      } else if (k == "services") {
        require_object(v, "services");
        for (const auto& [sk, sv] : v.items()) {
          if (sk == "authority") c.authority = ServiceAddress::parse(sv.get<std::string>());
          else if (sk == "evaluator") c.evaluator = ServiceAddress::parse(sv.get<std::string>());
          else if (sk == "client_token") c.client_token = sv.get<std::string>();
          else throw ConfigError("unknown services key '" + sk + "'");
        }
      } else if (k == "bench") {
        c.bench = bench_from_json(v);
      } else {
        throw ConfigError("unknown config section '" + k + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad run config: ") + e.what());
  }
  if (c.quantization) c.bench.config = *c.quantization;
  return c;
}

RunConfig load_run_config(const std::string& path) {
  if (path.empty()) return {};
  nlohmann::json j;
  try {
    j = read_json_file(path);
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  }
  return run_config_from_json(j);
}

ServiceAddress resolve_address(const char* flag, const char* env_var, const std::optional<ServiceAddress>& config,
                               const ServiceAddress& fallback) {
  if (flag && *flag) return ServiceAddress::parse(flag);
  return address_from_env(env_var, config.value_or(fallback));
}

}  // namespace qfe
