// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include "qfe/wire/services.hpp"

#include <chrono>
#include <exception>

#include "qfe/common/log.hpp"
#include "qfe/common/parallel.hpp"
#include "qfe/pairing/dlog.hpp"

namespace qfe {
namespace {

constexpr std::size_t kReplyCacheSize = 65536;

Bytes to_bytes(const std::string& s) { return Bytes(s.begin(), s.end()); }

std::string best_effort_id(const std::string& line) {
  try {
    auto j = nlohmann::json::parse(line);
    if (j.is_object() && j.contains("id") && j["id"].is_string()) return j["id"].get<std::string>();
  } catch (const nlohmann::json::exception&) {
  }
  return {};
}

Envelope hello_reply(const Envelope& req, const char* role) {
  nlohmann::json j = {{"protocol", kProtocolVersion}, {"role", role}};
  return Envelope{kProtocolVersion, MsgType::kHello, req.id, to_bytes(j.dump())};
}

[[noreturn]] void unsupported(const Envelope& req, const char* role) {
  throw ProtocolError(std::string(role) + " does not handle " + msg_type_name(req.type));
}

}  // namespace

// ---- EnvelopeServer ----

EnvelopeServer::EnvelopeServer(const ServiceAddress& listen, std::string component, Handler handler, WireTap tap)
    : listener_(listen), component_(std::move(component)), handler_(std::move(handler)), tap_(std::move(tap)) {
  acceptor_ = std::thread([this] { accept_loop(); });
  log_event(LogLevel::kInfo, component_, "listening", {{"host", listen.host}, {"port", port()}});
}

EnvelopeServer::~EnvelopeServer() { stop(); }

void EnvelopeServer::accept_loop() {
  while (!stopping_) {
    auto s = listener_.accept(200);
    if (!s) continue;
    auto ch = std::make_shared<LineChannel>(std::move(*s));
    auto done = std::make_shared<std::atomic<bool>>(false);
    reap_finished();
    std::lock_guard<std::mutex> lock(mu_);
    if (stopping_) break;
    conns_.push_back(Conn{ch, done, std::thread([this, ch, done] {
                            serve(ch);
                            *done = true;
                          })});
  }
}

void EnvelopeServer::reap_finished() {
  std::vector<Conn> finished;
  {
    std::lock_guard<std::mutex> lock(mu_);
    for (auto it = conns_.begin(); it != conns_.end();) {
      if (*it->done) {
        finished.push_back(std::move(*it));
        it = conns_.erase(it);
      } else {
        ++it;
      }
    }
  }
  for (auto& c : finished) c.thread.join();
}

void EnvelopeServer::serve(const std::shared_ptr<LineChannel>& ch) {
  try {
    while (!stopping_) {
      auto line = ch->read_line();
      if (!line) break;
      if (tap_) tap_("recv", *line);
      std::string reply = reply_for(*line);
      if (tap_) tap_("send", reply);
      ch->write_line(reply);
    }
  } catch (const ConnectionError& e) {
    if (!stopping_) log_event(LogLevel::kWarn, component_, "connection_dropped", {{"reason", e.what()}});
  }
  ch->shutdown();
}

std::string EnvelopeServer::reply_for(const std::string& line) {
  Envelope req;
  try {
    req = decode_envelope(line);
  } catch (const Error& e) {
    log_event(LogLevel::kWarn, component_, "bad_envelope", {{"error", e.what()}});
    return encode_envelope(make_error_reply(best_effort_id(line), e.code(), e.what()));
  }
  if (!req.id.empty()) {
    std::lock_guard<std::mutex> lock(mu_);
    if (auto it = replies_.find(req.id); it != replies_.end()) {
      log_event(LogLevel::kDebug, component_, "replay", {{"id", req.id}});
      return it->second;
    }
  }
  Envelope rep;
  try {
    rep = handler_(req);
    rep.id = req.id;
  } catch (const Error& e) {
    log_event(LogLevel::kWarn, component_, "request_failed",
              {{"id", req.id}, {"type", msg_type_name(req.type)}, {"code", error_code_name(e.code())},
               {"error", e.what()}});
    rep = make_error_reply(req.id, e.code(), e.what());
  } catch (const std::exception& e) {
    rep = make_error_reply(req.id, ErrorCode::kInternal, e.what());
  }
  std::string encoded = encode_envelope(rep);
  if (req.id.empty()) return encoded;
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = replies_.emplace(req.id, encoded);
  if (inserted) {
    reply_order_.push_back(req.id);
    if (reply_order_.size() > kReplyCacheSize) {
      replies_.erase(reply_order_.front());
      reply_order_.pop_front();
    }
  }
  return it->second;
}

void EnvelopeServer::stop() {
  std::lock_guard<std::mutex> stop_lock(stop_mu_);
  if (stopped_) return;
  stopped_ = true;
  stopping_ = true;
  listener_.close();
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<Conn> conns;
  {
    std::lock_guard<std::mutex> lock(mu_);
    for (auto& c : conns_) c.ch->shutdown();
    conns.swap(conns_);
  }
  for (auto& c : conns) c.thread.join();
  log_event(LogLevel::kInfo, component_, "stopped");
}

void EnvelopeServer::wait() {
  while (!stopping_) std::this_thread::sleep_for(std::chrono::milliseconds(200));
}

// ---- WireClient ----

std::string new_correlation_id() {
  static thread_local Rng rng;
  std::array<std::uint8_t, 16> b;
  rng.fill(b);
  return to_hex(b);
}

WireClient::WireClient(ServiceAddress addr, RetryPolicy policy, WireTap tap)
    : addr_(std::move(addr)), policy_(policy), tap_(std::move(tap)) {}

Envelope WireClient::call(MsgType type, Bytes payload, std::string id) {
  if (id.empty()) id = new_correlation_id();
  const std::string line = encode_envelope(Envelope{kProtocolVersion, type, id, std::move(payload)});
  std::string last;
  int backoff = policy_.backoff_ms;
  for (int attempt = 1; attempt <= std::max(1, policy_.attempts); ++attempt) {
    try {
      if (!ch_.open()) {
        ch_ = connect_tcp(addr_, policy_.connect_timeout_ms);
        ch_.set_timeout(policy_.reply_timeout_ms);
      }
      if (tap_) tap_("send", line);
      ch_.write_line(line);
      for (;;) {
        auto reply = ch_.read_line();
        if (!reply) throw ConnectionError("server closed the connection");
        if (tap_) tap_("recv", *reply);
        Envelope e = decode_envelope(*reply);
        if (e.id != id) continue;  // stale reply to an abandoned attempt
        if (e.type == MsgType::kError) raise_error_reply(e);
        return e;
      }
    } catch (const ConnectionError& e) {
      ch_.close();
      last = e.what();
      log_event(LogLevel::kWarn, "client", "retry",
                {{"address", addr_.str()}, {"attempt", attempt}, {"error", last}});
      if (attempt < policy_.attempts) {
        std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
        backoff *= 2;
      }
    }
  }
  throw ConnectionError("giving up on " + addr_.str() + " after " + std::to_string(std::max(1, policy_.attempts)) +
                        " attempts: " + last);
}

// ---- Authority ----

AuthorityService::AuthorityService(AuthoritySetup state, const AuthorityServiceConfig& cfg)
    : state_(std::move(state)),
      client_bytes_(serialize(state_.client)),
      eval_bytes_(serialize(state_.evaluator)),
      token_(cfg.client_token) {
  server_ = std::make_unique<EnvelopeServer>(
      cfg.listen, "authority", [this](const Envelope& e) { return handle(e); }, cfg.tap);
}

Envelope AuthorityService::handle(const Envelope& req) {
  switch (req.type) {
    case MsgType::kHello:
      return hello_reply(req, "authority");
    case MsgType::kGetClientBundle: {
      if (!token_.empty() && std::string(req.payload.begin(), req.payload.end()) != token_) {
        throw ProtocolError("client is not authorised");
      }
      log_event(LogLevel::kInfo, "authority", "client_bundle_served", {{"id", req.id}});
      return Envelope{kProtocolVersion, MsgType::kGetClientBundle, req.id, client_bytes_};
    }
    case MsgType::kGetEvalBundle:
      log_event(LogLevel::kInfo, "authority", "eval_bundle_served", {{"id", req.id}});
      return Envelope{kProtocolVersion, MsgType::kGetEvalBundle, req.id, eval_bytes_};
    default:
      unsupported(req, "authority");
  }
}

std::unique_ptr<AuthorityService> serve_authority(AuthoritySetup state, const AuthorityServiceConfig& cfg) {
  return std::make_unique<AuthorityService>(std::move(state), cfg);
}

// ---- Evaluator ----

EvaluatorService::EvaluatorService(const EvaluatorServiceConfig& cfg) {
  if (cfg.bundle) {
    bundle_ = *cfg.bundle;
  } else if (cfg.authority) {
    bundle_ = fetch_eval_bundle(*cfg.authority, cfg.retry, cfg.tap);
  } else {
    throw ConfigError("evaluator needs a bundle or an authority address");
  }
  auto t0 = std::chrono::steady_clock::now();
  bsgs_table(setup().gt, bundle_.dlog_bound);
  log_event(LogLevel::kInfo, "evaluator", "dlog_table_ready",
            {{"bound", bundle_.dlog_bound},
             {"ms", std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count()}});
  slots_ = std::make_unique<std::counting_semaphore<>>(static_cast<std::ptrdiff_t>(resolve_workers(cfg.workers)));
  server_ = std::make_unique<EnvelopeServer>(
      cfg.listen, "evaluator", [this](const Envelope& e) { return handle(e); }, cfg.tap);
}

Envelope EvaluatorService::handle(const Envelope& req) {
  switch (req.type) {
    case MsgType::kHello:
      return hello_reply(req, "evaluator");
    case MsgType::kSubmitCiphertext: {
      EncryptedRecord e = deserialize_encrypted_record(req.payload);
      slots_->acquire();
      struct Release {
        std::counting_semaphore<>* s;
        ~Release() { s->release(); }
      } release{slots_.get()};
      StageTimings t;
      std::vector<std::int64_t> raw;
      try {
        raw = evaluator_score(e.proj_c, bundle_, &t);
      } catch (const Error& err) {
        throw_error(err.code(), "borrower " + std::to_string(e.id) + ": " + err.what());
      }
      ScoreReport r = make_report(e.id, std::move(raw), bundle_.config);
      r.timings = t;
      log_event(LogLevel::kDebug, "evaluator", "scored", {{"borrower", e.id}});
      return Envelope{kProtocolVersion, MsgType::kScoreResult, req.id, to_bytes(to_json(r, true).dump())};
    }
    default:
      unsupported(req, "evaluator");
  }
}

std::unique_ptr<EvaluatorService> serve_evaluator(const EvaluatorServiceConfig& cfg) {
  return std::make_unique<EvaluatorService>(cfg);
}

// ---- Client side ----

nlohmann::json hello(const ServiceAddress& addr, const RetryPolicy& policy) {
  WireClient c(addr, policy);
  Envelope e = c.call(MsgType::kHello, {});
  try {
    return nlohmann::json::parse(e.payload.begin(), e.payload.end());
  } catch (const nlohmann::json::exception&) {
    throw ProtocolError("unreadable hello reply");
  }
}

ClientBundle fetch_client_bundle(const ServiceAddress& authority, const std::string& token, const RetryPolicy& policy,
                                 WireTap tap) {
  WireClient c(authority, policy, std::move(tap));
  Envelope e = c.call(MsgType::kGetClientBundle, to_bytes(token));
  if (e.type != MsgType::kGetClientBundle) throw ProtocolError("unexpected reply to get_client_bundle");
  return deserialize_client_bundle(e.payload);
}

EvaluatorBundle fetch_eval_bundle(const ServiceAddress& authority, const RetryPolicy& policy, WireTap tap) {
  WireClient c(authority, policy, std::move(tap));
  Envelope e = c.call(MsgType::kGetEvalBundle, {});
  if (e.type != MsgType::kGetEvalBundle) throw ProtocolError("unexpected reply to get_eval_bundle");
  return deserialize_eval_bundle(e.payload);
}

std::vector<ScoreReport> client_submit(const ServiceAddress& evaluator, std::span<const BorrowerRecord> records,
                                       const ClientBundle& bundle, const Rng& base, const SubmitOptions& opts) {
  if (records.empty()) return {};
  std::vector<EncryptedRecord> enc = encrypt_batch(records, bundle, base, opts.workers);
  const std::size_t lanes = std::min(resolve_workers(opts.workers), enc.size());
  std::vector<ScoreReport> out(enc.size());
  parallel_for(lanes, lanes, [&](std::size_t lane) {
    WireClient c(evaluator, opts.retry, opts.tap);
    for (std::size_t i = lane; i < enc.size(); i += lanes) {
      Envelope e = c.call(MsgType::kSubmitCiphertext, serialize(enc[i]));
      if (e.type != MsgType::kScoreResult) throw ProtocolError("unexpected reply to submit_ciphertext");
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(e.payload.begin(), e.payload.end());
      } catch (const nlohmann::json::exception&) {
        throw ProtocolError("unreadable score_result");
      }
      ScoreReport r = score_report_from_json(j);
      if (r.borrower_id != enc[i].id) throw ProtocolError("score_result for the wrong borrower");
      r.timings.encrypt_ms = enc[i].timings.encrypt_ms;
      r.timings.project_ms = enc[i].timings.project_ms;
      out[i] = std::move(r);
    }
  });
  return out;
}

}  // namespace qfe
