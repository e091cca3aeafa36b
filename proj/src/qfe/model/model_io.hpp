// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

// JSON model file: dimensions, float weights, the feature transform used at
// training time and, optionally, the quantized export with its config.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qfe/data/preprocess.hpp"
#include "qfe/model/square_net.hpp"

namespace qfe {

inline constexpr int kModelFormatVersion = 1;

struct ModelFile {
  NetworkParams params;
  FeatureTransform transform;
  TrainConfig train;
  std::vector<double> epoch_losses;
  std::optional<QuantizedModel> quantized;
};

nlohmann::json to_json(const FeatureTransform& t);
FeatureTransform feature_transform_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ModelFile& m);
// Validates shapes and, when present, that the quantized digest matches
// its config. Throws FormatError.
ModelFile model_from_json(const nlohmann::json& j);

void save_model(const std::string& path, const ModelFile& m);
ModelFile load_model(const std::string& path);

// Parses a JSON document from a file; IoError or FormatError.
nlohmann::json read_json_file(const std::string& path);

}  // namespace qfe
