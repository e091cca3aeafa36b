// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include "qfe/model/model_io.hpp"

#include <string>

#include "qfe/common/bytes.hpp"
#include "qfe/common/error.hpp"

namespace qfe {
namespace {

using json = nlohmann::json;

template <class T>
json matrix_json(const Matrix<T>& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    rows.push_back(std::vector<T>(row.begin(), row.end()));
  }
  return rows;
}

template <class T>
Matrix<T> matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw FormatError(std::string(what) + " must be a non-empty array of rows");
  const std::size_t rows = j.size(), cols = j[0].size();
  Matrix<T> m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw FormatError(std::string(what) + " rows are ragged");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<T>();
  }
  return m;
}

Digest digest_from_hex(const std::string& s) {
  if (s.size() != 64) throw FormatError("digest must be 64 hex characters");
  Digest d{};
  for (std::size_t i = 0; i < 32; ++i) {
    auto nib = [&](char c) -> int {
      if (c >= '0' && c <= '9') return c - '0';
      if (c >= 'a' && c <= 'f') return c - 'a' + 10;
      throw FormatError("digest is not lowercase hex");
    };
    d[i] = static_cast<std::uint8_t>(nib(s[2 * i]) << 4 | nib(s[2 * i + 1]));
  }
  return d;
}

}  // namespace

json to_json(const FeatureTransform& t) {
  json cols = json::array();
  for (const auto& c : t.columns) {
    json e = {{"name", c.name}, {"kind", column_kind_name(c.kind)}};
    if (c.kind == ColumnKind::kCategorical) {
      e["levels"] = c.levels;
    } else {
      e["min"] = c.min;
      e["max"] = c.max;
    }
    cols.push_back(std::move(e));
  }
  return {{"columns", cols}};
}

FeatureTransform feature_transform_from_json(const json& j) {
  FeatureTransform t;
  for (const auto& e : j.at("columns")) {
    ColumnTransform c;
    c.name = e.at("name").get<std::string>();
    c.kind = parse_column_kind(e.at("kind").get<std::string>());
    if (c.kind == ColumnKind::kCategorical) {
      c.levels = e.at("levels").get<std::vector<std::string>>();
    } else {
      c.min = e.at("min").get<double>();
      c.max = e.at("max").get<double>();
    }
    t.columns.push_back(std::move(c));
  }
  return t;
}

json to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"epsilon", c.epsilon},
          {"seed", c.seed},
          {"hidden", c.hidden},
          {"labels", c.labels},
          {"grad_clip", c.grad_clip},
          {"workers", c.workers}};
}

TrainConfig train_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("training config must be a JSON object");
  TrainConfig c;
  try {
    for (const auto& [k, v] : j.items()) {
      if (k == "learning_rate") c.learning_rate = v.get<double>();
      else if (k == "batch_size") c.batch_size = v.get<std::size_t>();
      else if (k == "epochs") c.epochs = v.get<std::size_t>();
      else if (k == "beta1") c.beta1 = v.get<double>();
      else if (k == "beta2") c.beta2 = v.get<double>();
      else if (k == "epsilon") c.epsilon = v.get<double>();
      else if (k == "seed") c.seed = v.get<std::uint64_t>();
      else if (k == "hidden") c.hidden = v.get<std::size_t>();
      else if (k == "labels") c.labels = v.get<std::size_t>();
      else if (k == "grad_clip") c.grad_clip = v.get<double>();
      else if (k == "workers") c.workers = v.get<std::size_t>();
      else throw ConfigError("unknown training key '" + k + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad training config: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const ModelFile& m) {
  json j = {{"format", "qfe-model"},
            {"version", kModelFormatVersion},
            {"dims", {{"n", m.params.n()}, {"d", m.params.d()}, {"l", m.params.l()}}},
            {"pr", matrix_json(m.params.pr)},
            {"d", matrix_json(m.params.d_mat)},
            {"feature_transform", to_json(m.transform)},
            {"train", to_json(m.train)},
            {"epoch_losses", m.epoch_losses}};
  if (m.quantized) {
    j["quantized"] = {{"config", to_json(m.quantized->config)},
                      {"config_digest", to_hex(m.quantized->config_digest)},
                      {"pr_int", matrix_json(m.quantized->pr_int)},
                      {"d_int", matrix_json(m.quantized->d_int)}};
  }
  return j;
}

ModelFile model_from_json(const json& j) {
  try {
    if (j.at("format") != "qfe-model") throw FormatError("not a model file");
    if (j.at("version").get<int>() > kModelFormatVersion) throw FormatError("model file version is newer than supported");
    ModelFile m;
    m.params.pr = matrix_from_json<double>(j.at("pr"), "pr");
    m.params.d_mat = matrix_from_json<double>(j.at("d"), "d");
    m.params.validate();
    const auto& dims = j.at("dims");
    if (dims.at("n").get<std::size_t>() != m.params.n() || dims.at("d").get<std::size_t>() != m.params.d() ||
        dims.at("l").get<std::size_t>() != m.params.l()) {
      throw FormatError("model dims do not match weight shapes");
    }
    m.transform = feature_transform_from_json(j.at("feature_transform"));
    if (!m.transform.columns.empty() && m.transform.output_dim() != m.params.n()) {
      throw FormatError("feature transform produces " + std::to_string(m.transform.output_dim()) +
                        " features, model expects " + std::to_string(m.params.n()));
    }
    if (j.contains("train")) m.train = train_config_from_json(j.at("train"));
    if (j.contains("epoch_losses")) m.epoch_losses = j.at("epoch_losses").get<std::vector<double>>();
    if (j.contains("quantized")) {
      const auto& q = j.at("quantized");
      QuantizedModel qm;
      qm.config = quant_config_from_json(q.at("config"));
      qm.config_digest = digest_from_hex(q.at("config_digest").get<std::string>());
      if (qm.config_digest != qm.config.digest()) throw FormatError("quantized model digest does not match its config");
      qm.pr_int = matrix_from_json<std::int64_t>(q.at("pr_int"), "pr_int");
      qm.d_int = matrix_from_json<std::int64_t>(q.at("d_int"), "d_int");
      if (qm.pr_int.rows() != m.params.n() || qm.pr_int.cols() != m.params.d() || qm.d_int.rows() != m.params.d() ||
          qm.d_int.cols() != m.params.l()) {
        throw FormatError("quantized weights do not match model dims");
      }
      m.quantized = std::move(qm);
    }
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  }
}

json read_json_file(const std::string& path) {
  Bytes b = read_file(path);
  try {
    return json::parse(b.begin(), b.end());
  } catch (const json::exception& e) {
    throw FormatError(path + ": invalid JSON: " + e.what());
  }
}

void save_model(const std::string& path, const ModelFile& m) {
  std::string s = to_json(m).dump(1);
  s.push_back('\n');
  write_file(path, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

ModelFile load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

}  // namespace qfe
