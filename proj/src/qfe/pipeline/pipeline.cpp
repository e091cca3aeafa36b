// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include "qfe/pipeline/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>
#include <thread>

#include "qfe/common/parallel.hpp"
#include "qfe/model/model_io.hpp"
#include "qfe/pairing/dlog.hpp"

namespace qfe {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<std::int64_t> column_of(const IntMatrix& m, std::size_t c) {
  std::vector<std::int64_t> out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) out[r] = m(r, c);
  return out;
}

Bytes encode_matrix(const IntMatrix& m) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(m.rows()));
  w.u32(static_cast<std::uint32_t>(m.cols()));
  for (auto v : m.data()) w.i64(v);
  return w.take();
}

IntMatrix decode_matrix(std::span<const std::uint8_t> in) {
  ByteReader r(in);
  std::size_t rows = r.u32(), cols = r.u32();
  if (rows * cols * 8 != r.remaining()) throw FormatError("matrix field has wrong length");
  std::vector<std::int64_t> data(rows * cols);
  for (auto& v : data) v = r.i64();
  return IntMatrix(rows, cols, std::move(data));
}

Bytes encode_vector(std::span<const std::int64_t> v) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(v.size()));
  for (auto e : v) w.i64(e);
  return w.take();
}

std::vector<std::int64_t> decode_vector(std::span<const std::uint8_t> in) {
  ByteReader r(in);
  std::size_t n = r.u32();
  if (n * 8 != r.remaining()) throw FormatError("vector field has wrong length");
  std::vector<std::int64_t> out(n);
  for (auto& e : out) e = r.i64();
  return out;
}

Bytes as_bytes(const std::string& s) { return Bytes(s.begin(), s.end()); }

nlohmann::json parse_json_field(std::span<const std::uint8_t> in) {
  try {
    return nlohmann::json::parse(in.begin(), in.end());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad JSON field: ") + e.what());
  }
}

Digest read_digest(const TlvReader& r) {
  auto v = r.require(tag::kQuantDigest);
  if (v.size() != 32) throw FormatError("bad config digest length");
  Digest d;
  std::copy(v.begin(), v.end(), d.begin());
  return d;
}

QuantConfig read_config(const TlvReader& r, const Digest& expected) {
  QuantConfig cfg;
  try {
    cfg = quant_config_from_json(parse_json_field(r.require(tag::kQuantConfig)));
  } catch (const ConfigError& e) {
    throw FormatError(std::string("bad quantization config: ") + e.what());
  }
  if (cfg.digest() != expected) throw FormatError("quantization config does not match its digest");
  return cfg;
}

void check_config_tag(const std::optional<Digest>& got, const Digest& want, const char* what) {
  if (got && *got != want) throw FormatError(std::string(what) + " was made under another quantization config");
}

}  // namespace

AuthoritySetup authority_setup(const QuantizedModel& model, const GroupContext& ctx, Rng& rng,
                               std::optional<FeatureTransform> transform) {
  const auto t0 = Clock::now();
  const std::size_t n = model.n(), d = model.d();
  if (n == 0 || d == 0) throw ArgumentError("model has an empty layer");
  if (model.d_int.rows() != d) {
    throw ArgumentError("D has " + std::to_string(model.d_int.rows()) + " rows, Pr has " + std::to_string(d) +
                        " columns");
  }
  if (model.l() != kLabels) throw ArgumentError("expected 2 labels, model has " + std::to_string(model.l()));
  if (model.config.digest() != model.config_digest) throw ArgumentError("model config digest is stale");

  AuthoritySetup out;
  AuthorityState& a = out.authority;
  a.quant_digest = model.config_digest;
  a.msk = generate_master_key(n, ctx, rng);
  a.proj_sec_key = project_secret_key(a.msk, model.pr_int);
  for (std::size_t i = 0; i < kLabels; ++i) {
    a.diags.push_back(column_of(model.d_int, i));
    a.fe_keys.push_back(derive_key(a.proj_sec_key, FMatrix::diagonal(a.diags.back())));
  }

  ClientBundle& c = out.client;
  c.msk = a.msk;
  c.pr_int = model.pr_int;
  c.config = model.config;
  c.quant_digest = a.quant_digest;
  c.message_bound = model.config.message_bound();
  c.transform = std::move(transform);

  EvaluatorBundle& e = out.evaluator;
  e.dim = d;
  e.fe_keys = a.fe_keys;
  e.diags = a.diags;
  e.dlog_bound = score_bound(model.config, n, d);
  e.config = model.config;
  e.quant_digest = a.quant_digest;

  out.keygen_ms = ms_since(t0);
  return out;
}

Ciphertext client_encrypt(const QuantizedRecord& record, const ClientBundle& bundle, Rng& rng,
                          StageTimings* timings) {
  if (record.config_id != bundle.quant_digest) {
    throw ConfigError("record was quantized under a different config than the client bundle");
  }
  if (record.values.size() != bundle.n()) {
    throw ArgumentError("record has " + std::to_string(record.values.size()) + " features, model expects " +
                        std::to_string(bundle.n()));
  }
  auto t0 = Clock::now();
  Ciphertext c = encrypt(record.values, record.values, bundle.msk, rng, bundle.message_bound);
  auto t1 = Clock::now();
  Ciphertext proj = project_encryption(c, bundle.pr_int);
  if (timings) {
    timings->encrypt_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    timings->project_ms = ms_since(t1);
  }
  return proj;
}

std::vector<std::int64_t> evaluator_score(const Ciphertext& proj_c, const EvaluatorBundle& bundle,
                                          StageTimings* timings, bool parallel_labels) {
  if (proj_c.dim() != bundle.dim) {
    throw ArgumentError("ciphertext has dimension " + std::to_string(proj_c.dim()) + ", evaluator expects " +
                        std::to_string(bundle.dim));
  }
  const std::size_t l = bundle.fe_keys.size();
  if (bundle.diags.size() != l) throw ArgumentError("evaluator bundle has mismatched keys and diagonals");
  auto table = bsgs_table(setup().gt, bundle.dlog_bound);

  std::vector<std::int64_t> raw(l);
  std::vector<double> dec_ms(l), dlog_ms(l);
  auto one = [&](std::size_t i) {
    auto t0 = Clock::now();
    GtPoint target = decrypt_to_target(proj_c, bundle.fe_keys[i], FMatrix::diagonal(bundle.diags[i]));
    auto t1 = Clock::now();
    auto v = table->solve(target);
    dec_ms[i] = std::chrono::duration<double, std::milli>(t1 - t0).count();
    dlog_ms[i] = ms_since(t1);
    if (!v) {
      throw DlogRangeError("dlog out of range for label " + std::to_string(i) + ": score exceeds bound " +
                           std::to_string(bundle.dlog_bound));
    }
    raw[i] = *v;
  };
  parallel_for(l, parallel_labels ? l : 1, one);

  if (timings) {
    timings->decrypt_ms = 0.0;
    timings->dlog_ms = 0.0;
    for (std::size_t i = 0; i < l; ++i) {
      timings->decrypt_ms += dec_ms[i];
      timings->dlog_ms += dlog_ms[i];
    }
  }
  return raw;
}

std::vector<double> probabilities(std::span<const std::int64_t> raw, const QuantConfig& cfg) {
  std::vector<double> s(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) s[i] = dequantize_score(raw[i], cfg);
  return softmax(s);
}

ScoreReport make_report(std::uint64_t borrower_id, std::vector<std::int64_t> raw, const QuantConfig& cfg) {
  ScoreReport r;
  r.borrower_id = borrower_id;
  r.probabilities = probabilities(raw, cfg);
  r.raw_scores = std::move(raw);
  return r;
}

ScoreReport end_to_end(std::span<const double> record, const NetworkParams& params, const QuantConfig& cfg,
                       const GroupContext& ctx, Rng& rng) {
  QuantizedModel model = export_quantized(params, cfg);
  AuthoritySetup s = authority_setup(model, ctx, rng);
  QuantizedRecord q = quantize_record(record, cfg);
  StageTimings t;
  Ciphertext c = client_encrypt(q, s.client, rng, &t);
  auto raw = evaluator_score(c, s.evaluator, &t);
  ScoreReport r = make_report(0, std::move(raw), cfg);
  r.timings = t;
  return r;
}

std::vector<EncryptedRecord> encrypt_batch(std::span<const BorrowerRecord> records, const ClientBundle& bundle,
                                           const Rng& base, std::size_t workers) {
  std::vector<const BorrowerRecord*> order;
  for (const auto& r : records) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->id < b->id; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (order[i]->id == order[i - 1]->id) throw ArgumentError("duplicate borrower id " + std::to_string(order[i]->id));
  }
  std::vector<EncryptedRecord> out(order.size());
  parallel_for(order.size(), workers, [&](std::size_t i) {
    Rng rng = base.derive("borrower", order[i]->id);
    out[i].id = order[i]->id;
    try {
      out[i].proj_c = client_encrypt(order[i]->record, bundle, rng, &out[i].timings);
    } catch (const Error& e) {
      throw_error(e.code(), "borrower " + std::to_string(order[i]->id) + ": " + e.what());
    }
  });
  return out;
}

std::vector<ScoreReport> score_batch(std::span<const EncryptedRecord> batch, const EvaluatorBundle& bundle,
                                     std::size_t workers) {
  std::vector<const EncryptedRecord*> order;
  for (const auto& e : batch) order.push_back(&e);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->id < b->id; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (order[i]->id == order[i - 1]->id) throw ArgumentError("duplicate borrower id " + std::to_string(order[i]->id));
  }
  // Build the shared table once, before the workers start.
  if (!order.empty()) bsgs_table(setup().gt, bundle.dlog_bound);
  std::vector<ScoreReport> out(order.size());
  parallel_for(order.size(), workers, [&](std::size_t i) {
    const EncryptedRecord& e = *order[i];
    StageTimings t = e.timings;
    try {
      out[i] = make_report(e.id, evaluator_score(e.proj_c, bundle, &t), bundle.config);
    } catch (const Error& err) {
      throw_error(err.code(), "borrower " + std::to_string(e.id) + ": " + err.what());
    }
    out[i].timings = t;
  });
  return out;
}

nlohmann::json to_json(const ScoreReport& r, bool with_timings) {
  nlohmann::json j = {{"borrower_id", r.borrower_id}, {"raw_scores", r.raw_scores}, {"probabilities", r.probabilities}};
  if (with_timings) {
    j["timings_ms"] = {{"encrypt", r.timings.encrypt_ms},
                       {"project", r.timings.project_ms},
                       {"decrypt", r.timings.decrypt_ms},
                       {"dlog", r.timings.dlog_ms}};
  }
  return j;
}

ScoreReport score_report_from_json(const nlohmann::json& j) {
  try {
    ScoreReport r;
    r.borrower_id = j.at("borrower_id").get<std::uint64_t>();
    r.raw_scores = j.at("raw_scores").get<std::vector<std::int64_t>>();
    r.probabilities = j.at("probabilities").get<std::vector<double>>();
    if (j.contains("timings_ms")) {
      const auto& t = j.at("timings_ms");
      r.timings.encrypt_ms = t.value("encrypt", 0.0);
      r.timings.project_ms = t.value("project", 0.0);
      r.timings.decrypt_ms = t.value("decrypt", 0.0);
      r.timings.dlog_ms = t.value("dlog", 0.0);
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad score report: ") + e.what());
  }
}

std::string to_jsonl(std::span<const ScoreReport> reports, bool with_timings) {
  std::string out;
  for (const auto& r : reports) {
    out += to_json(r, with_timings).dump();
    out += '\n';
  }
  return out;
}

std::vector<ScoreReport> parse_jsonl(std::string_view text) {
  std::vector<ScoreReport> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("bad JSON line: ") + e.what());
    }
    out.push_back(score_report_from_json(j));
  }
  return out;
}

Bytes serialize(const ClientBundle& b) {
  TlvWriter w(magic::kClientBundle);
  w.field(tag::kBundleMsk, serialize(b.msk, b.quant_digest));
  w.field(tag::kPrInt, encode_matrix(b.pr_int));
  w.field(tag::kQuantConfig, as_bytes(to_json(b.config).dump()));
  w.field(tag::kQuantDigest, b.quant_digest);
  w.i64(tag::kMessageBound, b.message_bound);
  if (b.transform) w.field(tag::kFeatureTransform, as_bytes(to_json(*b.transform).dump()));
  Bytes out = w.finish();
  if (contains_any_tag(out, kFeKeyTags)) throw Error(ErrorCode::kInternal, "client bundle would carry FE keys");
  return out;
}

ClientBundle deserialize_client_bundle(std::span<const std::uint8_t> in) {
  TlvReader r(in, magic::kClientBundle);
  ClientBundle b;
  b.quant_digest = read_digest(r);
  b.config = read_config(r, b.quant_digest);
  std::optional<Digest> msk_cfg;
  b.msk = deserialize_master_key(r.require(tag::kBundleMsk), &msk_cfg);
  check_config_tag(msk_cfg, b.quant_digest, "master key");
  b.pr_int = decode_matrix(r.require(tag::kPrInt));
  b.message_bound = r.require_i64(tag::kMessageBound);
  if (auto t = r.find(tag::kFeatureTransform)) b.transform = feature_transform_from_json(parse_json_field(*t));
  if (b.pr_int.rows() != b.msk.dim()) throw FormatError("client bundle: Pr rows do not match the master key");
  return b;
}

Bytes serialize(const EvaluatorBundle& b) {
  TlvWriter w(magic::kEvalBundle);
  w.u32(tag::kDim, static_cast<std::uint32_t>(b.dim));
  for (const auto& k : b.fe_keys) w.append(tag::kBundleFek, serialize(k, b.quant_digest));
  for (const auto& d : b.diags) w.append(tag::kDiag, encode_vector(d));
  w.i64(tag::kDlogBound, b.dlog_bound);
  w.field(tag::kQuantConfig, as_bytes(to_json(b.config).dump()));
  w.field(tag::kQuantDigest, b.quant_digest);
  Bytes out = w.finish();
  if (contains_any_tag(out, kMasterKeyTags)) {
    throw Error(ErrorCode::kInternal, "evaluator bundle would carry master-key material");
  }
  return out;
}

EvaluatorBundle deserialize_eval_bundle(std::span<const std::uint8_t> in) {
  if (contains_any_tag(in, kMasterKeyTags)) throw FormatError("evaluator bundle carries master-key fields");
  TlvReader r(in, magic::kEvalBundle);
  EvaluatorBundle b;
  b.quant_digest = read_digest(r);
  b.config = read_config(r, b.quant_digest);
  b.dim = r.require_u32(tag::kDim);
  for (auto f : r.find_all(tag::kBundleFek)) {
    std::optional<Digest> cfg;
    b.fe_keys.push_back(deserialize_fe_key(f, &cfg));
    check_config_tag(cfg, b.quant_digest, "FE key");
    if (b.fe_keys.back().dim != b.dim) throw FormatError("FE key dimension does not match the bundle");
  }
  for (auto f : r.find_all(tag::kDiag)) {
    b.diags.push_back(decode_vector(f));
    if (b.diags.back().size() != b.dim) throw FormatError("diagonal length does not match the bundle");
  }
  if (b.fe_keys.size() != b.diags.size() || b.fe_keys.empty()) throw FormatError("evaluator bundle: key/diag count");
  b.dlog_bound = r.require_i64(tag::kDlogBound);
  if (b.dlog_bound < 0) throw FormatError("negative dlog bound");
  return b;
}

Bytes serialize(const AuthoritySetup& s) {
  TlvWriter w(magic::kAuthority);
  w.field(tag::kBundleMsk, serialize(s.authority.msk, s.authority.quant_digest));
  w.field(tag::kProjMsk, serialize(s.authority.proj_sec_key, s.authority.quant_digest));
  w.field(tag::kClientBundle, serialize(s.client));
  w.field(tag::kEvalBundle, serialize(s.evaluator));
  w.field(tag::kQuantDigest, s.authority.quant_digest);
  return w.finish();
}

AuthoritySetup deserialize_authority(std::span<const std::uint8_t> in) {
  TlvReader r(in, magic::kAuthority);
  AuthoritySetup s;
  s.authority.quant_digest = read_digest(r);
  std::optional<Digest> cfg;
  s.authority.msk = deserialize_master_key(r.require(tag::kBundleMsk), &cfg);
  check_config_tag(cfg, s.authority.quant_digest, "master key");
  s.authority.proj_sec_key = deserialize_master_key(r.require(tag::kProjMsk), &cfg);
  check_config_tag(cfg, s.authority.quant_digest, "projected key");
  s.client = deserialize_client_bundle(r.require(tag::kClientBundle));
  s.evaluator = deserialize_eval_bundle(r.require(tag::kEvalBundle));
  if (s.client.quant_digest != s.authority.quant_digest || s.evaluator.quant_digest != s.authority.quant_digest) {
    throw FormatError("authority file mixes quantization configs");
  }
  s.authority.fe_keys = s.evaluator.fe_keys;
  s.authority.diags = s.evaluator.diags;
  return s;
}

Bytes serialize(const EncryptedRecord& e) {
  TlvWriter w(magic::kCiphertextEntry);
  w.u64(tag::kBorrowerId, e.id);
  w.field(tag::kCiphertext, serialize(e.proj_c));
  return w.finish();
}

EncryptedRecord deserialize_encrypted_record(std::span<const std::uint8_t> in) {
  TlvReader r(in, magic::kCiphertextEntry);
  EncryptedRecord e;
  e.id = r.require_u64(tag::kBorrowerId);
  e.proj_c = deserialize_ciphertext(r.require(tag::kCiphertext));
  return e;
}

Bytes serialize_batch(std::span<const EncryptedRecord> batch, const Digest& quant_digest) {
  TlvWriter w(magic::kCiphertextBatch);
  w.field(tag::kQuantDigest, quant_digest);
  for (const auto& e : batch) w.append(tag::kCiphertext, serialize(e));
  return w.finish();
}

std::vector<EncryptedRecord> deserialize_batch(std::span<const std::uint8_t> in, Digest* quant_digest) {
  TlvReader r(in, magic::kCiphertextBatch);
  if (quant_digest) *quant_digest = read_digest(r);
  std::vector<EncryptedRecord> out;
  for (auto f : r.find_all(tag::kCiphertext)) out.push_back(deserialize_encrypted_record(f));
  return out;
}

}  // namespace qfe
