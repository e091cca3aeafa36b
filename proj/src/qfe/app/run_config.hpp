// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

// Optional JSON run config shared by the operator commands:
//
//   {
//     "quantization": { "scale_x": 16, ... },
//     "train":        { "epochs": 50, ... },
//     "cleaning":     { "label_column": "default", "null_column_threshold": 0.5,
//                       "outlier_sigma": 3.0 },
//     "services":     { "authority": "127.0.0.1:7401", "evaluator": "127.0.0.1:7402",
//                       "client_token": "" },
//     "bench":        { "dims": [5, 10], "borrowers": [1, 10], "repetitions": 5,
//                       "features": 130, "workers": 1, "seed": 1 }
//   }
//
// Every section is optional; unknown keys are a ConfigError. Service
// addresses resolve as flag, then environment, then config, then default.

#pragma once

#include <optional>
#include <string>

#include "qfe/bench/bench.hpp"
#include "qfe/data/preprocess.hpp"
#include "qfe/data/quantize.hpp"
#include "qfe/model/square_net.hpp"
#include "qfe/wire/socket.hpp"

namespace qfe {

inline const ServiceAddress kDefaultAuthorityAddr{"127.0.0.1", 7401};
inline const ServiceAddress kDefaultEvaluatorAddr{"127.0.0.1", 7402};

struct RunConfig {
  std::optional<QuantConfig> quantization;
  TrainConfig train;
  CleaningPolicy cleaning;
  std::optional<ServiceAddress> authority;
  std::optional<ServiceAddress> evaluator;
  std::string client_token;
  BenchPlan bench;
};

RunConfig run_config_from_json(const nlohmann::json& j);
// Empty path gives the defaults.
RunConfig load_run_config(const std::string& path);

ServiceAddress resolve_address(const char* flag, const char* env_var, const std::optional<ServiceAddress>& config,
                               const ServiceAddress& fallback);

}  // namespace qfe
