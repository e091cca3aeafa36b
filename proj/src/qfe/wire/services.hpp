// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

// The three roles as network services.
//
//   authority  hello, get_client_bundle, get_eval_bundle
//   evaluator  hello, submit_ciphertext -> score_result
//   client     fetches its bundle, encrypts locally, submits ciphertexts
//
// Plain TCP without transport security: everything the evaluator sees is
// either ciphertext or FE-key material.

#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "qfe/pipeline/pipeline.hpp"
#include "qfe/wire/envelope.hpp"
#include "qfe/wire/socket.hpp"

namespace qfe {

inline constexpr const char* kAuthorityAddrEnv = "QFE_AUTHORITY_ADDR";
inline constexpr const char* kEvaluatorAddrEnv = "QFE_EVALUATOR_ADDR";

// Observes every line a party sends ("send") or receives ("recv").
using WireTap = std::function<void(std::string_view direction, std::string_view line)>;

struct RetryPolicy {
  int attempts = 3;        // total tries per request
  int backoff_ms = 100;    // doubled after each failure
  int connect_timeout_ms = 3000;
  int reply_timeout_ms = 120000;
};

// Accepts connections on one thread and serves each on its own thread.
// Messages on one connection are handled in order. Replies are cached by
// correlation id, so a repeated id gets the same bytes back.
class EnvelopeServer {
 public:
  using Handler = std::function<Envelope(const Envelope&)>;

  EnvelopeServer(const ServiceAddress& listen, std::string component, Handler handler, WireTap tap = {});
  ~EnvelopeServer();
  EnvelopeServer(const EnvelopeServer&) = delete;
  EnvelopeServer& operator=(const EnvelopeServer&) = delete;

  std::uint16_t port() const { return listener_.port(); }
  void stop();
  // Blocks until stop() is called from another thread.
  void wait();

 private:
  void accept_loop();
  struct Conn {
    std::shared_ptr<LineChannel> ch;
    std::shared_ptr<std::atomic<bool>> done;
    std::thread thread;
  };

  void serve(const std::shared_ptr<LineChannel>& ch);
  void reap_finished();
  std::string reply_for(const std::string& line);

  Listener listener_;
  std::string component_;
  Handler handler_;
  WireTap tap_;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex mu_;
  std::vector<Conn> conns_;
  std::map<std::string, std::string> replies_;
  std::deque<std::string> reply_order_;
  std::mutex stop_mu_;
  bool stopped_ = false;
};

// One connection, reopened as needed. A request keeps its correlation id
// across retries.
class WireClient {
 public:
  explicit WireClient(ServiceAddress addr, RetryPolicy policy = {}, WireTap tap = {});

  // Sends and waits for the reply with the same id. Error replies are
  // rethrown as typed errors; ConnectionError once retries run out.
  Envelope call(MsgType type, Bytes payload, std::string id = {});
  const ServiceAddress& address() const { return addr_; }

 private:
  ServiceAddress addr_;
  RetryPolicy policy_;
  WireTap tap_;
  LineChannel ch_;
};

std::string new_correlation_id();

struct AuthorityServiceConfig {
  ServiceAddress listen;
  // When non-empty, get_client_bundle requests must carry this token as
  // their payload.
  std::string client_token;
  WireTap tap;
};

class AuthorityService {
 public:
  AuthorityService(AuthoritySetup state, const AuthorityServiceConfig& cfg);
  std::uint16_t port() const { return server_->port(); }
  void stop() { server_->stop(); }
  void wait() { server_->wait(); }

 private:
  Envelope handle(const Envelope& req);

  AuthoritySetup state_;
  Bytes client_bytes_;
  Bytes eval_bytes_;
  std::string token_;
  std::unique_ptr<EnvelopeServer> server_;
};

struct EvaluatorServiceConfig {
  ServiceAddress listen;
  // Either a bundle already in hand or the authority to fetch it from.
  std::optional<EvaluatorBundle> bundle;
  std::optional<ServiceAddress> authority;
  std::size_t workers = 0;  // concurrent scorings, 0 = hardware threads
  RetryPolicy retry;
  WireTap tap;
};

class EvaluatorService {
 public:
  explicit EvaluatorService(const EvaluatorServiceConfig& cfg);
  std::uint16_t port() const { return server_->port(); }
  const EvaluatorBundle& bundle() const { return bundle_; }
  void stop() { server_->stop(); }
  void wait() { server_->wait(); }

 private:
  Envelope handle(const Envelope& req);

  EvaluatorBundle bundle_;
  std::unique_ptr<std::counting_semaphore<>> slots_;
  std::unique_ptr<EnvelopeServer> server_;
};

std::unique_ptr<AuthorityService> serve_authority(AuthoritySetup state, const AuthorityServiceConfig& cfg);
std::unique_ptr<EvaluatorService> serve_evaluator(const EvaluatorServiceConfig& cfg);

// {"protocol":1,"role":"..."} from the hello reply.
nlohmann::json hello(const ServiceAddress& addr, const RetryPolicy& policy = {});
ClientBundle fetch_client_bundle(const ServiceAddress& authority, const std::string& token,
                                 const RetryPolicy& policy = {}, WireTap tap = {});
EvaluatorBundle fetch_eval_bundle(const ServiceAddress& authority, const RetryPolicy& policy = {},
                                  WireTap tap = {});

struct SubmitOptions {
  std::size_t workers = 1;  // parallel encryption and connections
  RetryPolicy retry;
  WireTap tap;
};

// Encrypts locally, submits each ProjC and returns reports ordered by
// borrower id. Nothing is returned unless every borrower was scored.
std::vector<ScoreReport> client_submit(const ServiceAddress& evaluator, std::span<const BorrowerRecord> records,
                                       const ClientBundle& bundle, const Rng& base, const SubmitOptions& opts = {});

}  // namespace qfe
