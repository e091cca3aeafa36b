// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

// Three-role scoring pipeline.
//
//   authority  msk at dim n, its projection through Pr, one FE key per
//              label derived from Diag(D_i)
//   client     encrypts (x, x) under msk and projects the ciphertext
//   evaluator  decrypts K^T Diag_i K per label and applies softmax
//
// The client bundle carries a copy of msk; the evaluator bundle carries
// FE keys only. Both properties are checked on the serialized bytes.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qfe/common/bytes.hpp"
#include "qfe/common/matrix.hpp"
#include "qfe/common/rng.hpp"
#include "qfe/common/tlv.hpp"
#include "qfe/data/preprocess.hpp"
#include "qfe/data/quantize.hpp"
#include "qfe/model/square_net.hpp"
#include "qfe/sgp/sgp.hpp"

namespace qfe {

inline constexpr std::size_t kLabels = 2;

// Fields that carry master-key material, at any nesting depth.
inline constexpr std::array<std::uint16_t, 4> kMasterKeyTags = {tag::kMskS, tag::kMskT, tag::kBundleMsk,
                                                                 tag::kProjMsk};
inline constexpr std::array<std::uint16_t, 2> kFeKeyTags = {tag::kFekKey, tag::kBundleFek};

struct StageTimings {
  double encrypt_ms = 0.0;
  double project_ms = 0.0;
  double decrypt_ms = 0.0;
  double dlog_ms = 0.0;
};

struct AuthorityState {
  MasterKey msk;           // dim n
  MasterKey proj_sec_key;  // dim d
  std::vector<FeKey> fe_keys;
  std::vector<std::vector<std::int64_t>> diags;
  Digest quant_digest{};
};

struct ClientBundle {
  MasterKey msk;
  IntMatrix pr_int;
  QuantConfig config;
  Digest quant_digest{};
  std::int64_t message_bound = 0;
  std::optional<FeatureTransform> transform;

  std::size_t n() const { return pr_int.rows(); }
  std::size_t d() const { return pr_int.cols(); }
};

struct EvaluatorBundle {
  std::size_t dim = 0;  // projected dimension d
  std::vector<FeKey> fe_keys;
  std::vector<std::vector<std::int64_t>> diags;
  std::int64_t dlog_bound = 0;
  QuantConfig config;
  Digest quant_digest{};
};

struct AuthoritySetup {
  AuthorityState authority;
  ClientBundle client;
  EvaluatorBundle evaluator;
  double keygen_ms = 0.0;
};

struct ScoreReport {
  std::uint64_t borrower_id = 0;
  std::vector<std::int64_t> raw_scores;
  std::vector<double> probabilities;
  StageTimings timings;
};

// ArgumentError unless pr_int is n x d and d_int is d x 2.
AuthoritySetup authority_setup(const QuantizedModel& model, const GroupContext& ctx, Rng& rng,
                               std::optional<FeatureTransform> transform = std::nullopt);

// ConfigError if the record was quantized under another config,
// ArgumentError on a length mismatch, BoundError on out-of-range values.
Ciphertext client_encrypt(const QuantizedRecord& record, const ClientBundle& bundle, Rng& rng,
                          StageTimings* timings = nullptr);

// Raw score per label. DlogRangeError naming the label when a score falls
// outside the bundle's window. With parallel_labels the two decryptions
// run on separate threads.
std::vector<std::int64_t> evaluator_score(const Ciphertext& proj_c, const EvaluatorBundle& bundle,
                                          StageTimings* timings = nullptr, bool parallel_labels = false);

// Softmax of the dequantized scores.
std::vector<double> probabilities(std::span<const std::int64_t> raw, const QuantConfig& cfg);

ScoreReport make_report(std::uint64_t borrower_id, std::vector<std::int64_t> raw, const QuantConfig& cfg);

ScoreReport end_to_end(std::span<const double> record, const NetworkParams& params, const QuantConfig& cfg,
                       const GroupContext& ctx, Rng& rng);

// Batches. Output is ordered by borrower id; duplicate ids are an
// ArgumentError. Borrower b encrypts with base.derive("borrower", b), so
// results do not depend on the worker count (0 = hardware threads).
struct BorrowerRecord {
  std::uint64_t id = 0;
  QuantizedRecord record;
};

struct EncryptedRecord {
  std::uint64_t id = 0;
  Ciphertext proj_c;
  StageTimings timings;
};

std::vector<EncryptedRecord> encrypt_batch(std::span<const BorrowerRecord> records, const ClientBundle& bundle,
                                           const Rng& base, std::size_t workers);
std::vector<ScoreReport> score_batch(std::span<const EncryptedRecord> batch, const EvaluatorBundle& bundle,
                                     std::size_t workers);

// ScoreReport JSON. Timings are omitted unless requested, which makes the
// default form a pure function of the scores.
nlohmann::json to_json(const ScoreReport& r, bool with_timings = false);
ScoreReport score_report_from_json(const nlohmann::json& j);
std::string to_jsonl(std::span<const ScoreReport> reports, bool with_timings = false);
std::vector<ScoreReport> parse_jsonl(std::string_view text);

// Role bundle files. serialize(EvaluatorBundle) and serialize(ClientBundle)
// refuse (kInternal) to emit bytes that contain master-key or FE-key
// fields respectively.
Bytes serialize(const ClientBundle& b);
Bytes serialize(const EvaluatorBundle& b);
Bytes serialize(const AuthoritySetup& s);
ClientBundle deserialize_client_bundle(std::span<const std::uint8_t> in);
EvaluatorBundle deserialize_eval_bundle(std::span<const std::uint8_t> in);
AuthoritySetup deserialize_authority(std::span<const std::uint8_t> in);

Bytes serialize(const EncryptedRecord& e);
EncryptedRecord deserialize_encrypted_record(std::span<const std::uint8_t> in);
Bytes serialize_batch(std::span<const EncryptedRecord> batch, const Digest& quant_digest);
std::vector<EncryptedRecord> deserialize_batch(std::span<const std::uint8_t> in, Digest* quant_digest = nullptr);

}  // namespace qfe
