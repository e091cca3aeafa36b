// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include <mutex>
#include <thread>

#include "doctest.h"
#include "qfe/common/log.hpp"
#include "qfe/wire/services.hpp"

using namespace qfe;

namespace {

struct Quiet {
  Quiet() { set_log_level(LogLevel::kOff); }
} quiet;

AuthoritySetup small_setup(std::uint64_t seed, std::size_t n = 12, std::size_t d = 4) {
  Rng rng = Rng::from_seed(seed);
  NetworkParams p = init_params(n, d, 2, rng);
  return authority_setup(export_quantized(p, QuantConfig::desk()), setup(), rng);
}

std::vector<BorrowerRecord> random_records(std::size_t count, std::size_t n, std::uint64_t seed) {
  Rng rng = Rng::from_seed(seed);
  std::vector<BorrowerRecord> out;
  for (std::size_t b = 0; b < count; ++b) {
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform01();
    out.push_back({b * 3 + 1, quantize_record(x, QuantConfig::desk())});
  }
  return out;
}

IntMatrix d_of(const EvaluatorBundle& b) {
  IntMatrix d(b.dim, b.diags.size());
  for (std::size_t i = 0; i < b.diags.size(); ++i)
    for (std::size_t j = 0; j < b.dim; ++j) d(j, i) = b.diags[i][j];
  return d;
}

ServiceAddress local(std::uint16_t port) { return ServiceAddress{"127.0.0.1", port}; }

// Records every line crossing the evaluator's process boundary.
struct Capture {
  std::mutex mu;
  std::vector<std::string> lines;
  WireTap tap() {
    return [this](std::string_view, std::string_view line) {
      std::lock_guard<std::mutex> lock(mu);
      lines.emplace_back(line);
    };
  }
};

}  // namespace

TEST_CASE("envelope round trip and validation") {
  for (MsgType t : {MsgType::kHello, MsgType::kGetClientBundle, MsgType::kGetEvalBundle, MsgType::kSubmitCiphertext,
                    MsgType::kScoreResult, MsgType::kError}) {
    Envelope e{kProtocolVersion, t, "id-" + std::string(msg_type_name(t)), Bytes{1, 2, 3, 0, 255}};
    std::string line = encode_envelope(e);
    CHECK(line.find('\n') == std::string::npos);
    CHECK(decode_envelope(line) == e);
  }
  Envelope e{kProtocolVersion, MsgType::kHello, "x", Bytes{9}};
  auto j = nlohmann::json::parse(encode_envelope(e));
  auto tampered = j;
  tampered["payload"] = base64_encode(Bytes{8});
  CHECK_THROWS_WITH_AS(decode_envelope(tampered.dump()), doctest::Contains("digest"), ProtocolError);
  auto unknown = j;
  unknown["type"] = "get_master_key";
  CHECK_THROWS_WITH_AS(decode_envelope(unknown.dump()), doctest::Contains("unknown message type"), ProtocolError);
  auto future = j;
  future["v"] = 2;
  CHECK_THROWS_AS(decode_envelope(future.dump()), ProtocolError);
  CHECK_THROWS_AS(decode_envelope("{not json"), ProtocolError);
  CHECK_THROWS_AS(decode_envelope("[]"), ProtocolError);

  CHECK(ServiceAddress::parse("10.0.0.1:7000").port == 7000);
  CHECK(ServiceAddress::parse("[::1]:81").host == "::1");
  CHECK_THROWS_AS(ServiceAddress::parse("nohost"), ConfigError);
  CHECK_THROWS_AS(ServiceAddress::parse("h:99999"), ConfigError);
}

TEST_CASE("authority: hello, bundles, tokens, malformed input") {
  AuthoritySetup s = small_setup(1);
  AuthorityServiceConfig cfg;
  cfg.client_token = "s3cret";
  auto auth = serve_authority(s, cfg);
  auto addr = local(auth->port());

  auto h = hello(addr);
  CHECK(h["protocol"] == kProtocolVersion);
  CHECK(h["role"] == "authority");

  Capture cap;
  EvaluatorBundle eb = fetch_eval_bundle(addr, {}, cap.tap());
  CHECK(eb.fe_keys == s.evaluator.fe_keys);
  for (const auto& line : cap.lines) {
    CHECK_FALSE(contains_any_tag(decode_envelope(line).payload, kMasterKeyTags));
  }

  ClientBundle cb = fetch_client_bundle(addr, "s3cret");
  CHECK(cb.msk == s.client.msk);
  CHECK_THROWS_WITH_AS(fetch_client_bundle(addr, "guess"), doctest::Contains("not authorised"), ProtocolError);

  // Garbage gets an error reply and the connection stays usable.
  LineChannel ch = connect_tcp(addr, 1000);
  ch.set_timeout(5000);
  ch.write_line("this is not json");
  Envelope err = decode_envelope(*ch.read_line());
  CHECK(err.type == MsgType::kError);
  CHECK(nlohmann::json::parse(err.payload.begin(), err.payload.end())["code"] ==
        static_cast<int>(ErrorCode::kProtocol));
  ch.write_line(encode_envelope(Envelope{kProtocolVersion, MsgType::kSubmitCiphertext, "q1", {}}));
  CHECK(decode_envelope(*ch.read_line()).type == MsgType::kError);
  ch.write_line(encode_envelope(Envelope{kProtocolVersion, MsgType::kHello, "q2", {}}));
  Envelope ok = decode_envelope(*ch.read_line());
  CHECK(ok.type == MsgType::kHello);
  CHECK(ok.id == "q2");
  auth->stop();
}

TEST_CASE("evaluator: concurrency, idempotency, errors, remote equals local") {
  AuthoritySetup s = small_setup(2);
  auto auth = serve_authority(s, {});
  Capture cap;
  EvaluatorServiceConfig ecfg;
  ecfg.authority = local(auth->port());
  ecfg.workers = 4;
  ecfg.tap = cap.tap();
  auto eval = serve_evaluator(ecfg);
  auto eaddr = local(eval->port());
  CHECK(hello(eaddr)["role"] == "evaluator");

  ClientBundle cb = fetch_client_bundle(local(auth->port()), "");
  Rng base = Rng::from_seed(77);

  SUBCASE("empty submission") { CHECK(client_submit(eaddr, {}, cb, base).empty()); }

  SUBCASE("zero record scores a coin flip") {
    std::vector<BorrowerRecord> zero{{5, QuantizedRecord{std::vector<std::int64_t>(12, 0), cb.quant_digest}}};
    auto r = client_submit(eaddr, zero, cb, base);
    REQUIRE(r.size() == 1);
    CHECK(r[0].borrower_id == 5);
    CHECK(r[0].probabilities == std::vector<double>{0.5, 0.5});
  }

  SUBCASE("20 concurrent submissions equal their sequential counterparts") {
    auto recs = random_records(20, 12, 3);
    auto enc = encrypt_batch(recs, cb, base, 1);
    auto sequential = score_batch(enc, s.evaluator, 1);
    std::vector<ScoreReport> got(enc.size());
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < enc.size(); ++i) {
      threads.emplace_back([&, i] {
        WireClient c(eaddr);
        Envelope e = c.call(MsgType::kSubmitCiphertext, serialize(enc[i]));
        got[i] = score_report_from_json(nlohmann::json::parse(e.payload.begin(), e.payload.end()));
      });
    }
    for (auto& t : threads) t.join();
    for (std::size_t i = 0; i < enc.size(); ++i) {
      CHECK(to_json(got[i]) == to_json(sequential[i]));
    }
  }

  SUBCASE("duplicate correlation id returns the same bytes") {
    auto recs = random_records(1, 12, 4);
    auto enc = encrypt_batch(recs, cb, base, 1);
    std::string line = encode_envelope(Envelope{kProtocolVersion, MsgType::kSubmitCiphertext, "dup-1", serialize(enc[0])});
    LineChannel a = connect_tcp(eaddr, 1000), b = connect_tcp(eaddr, 1000);
    a.write_line(line);
    std::string first = *a.read_line();
    a.write_line(line);
    std::string again = *a.read_line();
    b.write_line(line);
    std::string other = *b.read_line();
    CHECK(first == again);
    CHECK(first == other);
    CHECK(decode_envelope(first).type == MsgType::kScoreResult);
  }

  SUBCASE("remote pipeline output is byte-identical to the in-process pipeline") {
    auto recs = random_records(5, 12, 5);
    SubmitOptions opts;
    opts.workers = 2;
    auto remote = client_submit(eaddr, recs, cb, base, opts);
    auto local_reports = score_batch(encrypt_batch(recs, s.client, Rng::from_seed(1234), 1), s.evaluator, 1);
    CHECK(to_jsonl(remote) == to_jsonl(local_reports));
    for (std::size_t i = 0; i < remote.size(); ++i) {
      CHECK(remote[i].raw_scores == forward_int(recs[i].record.values, s.client.pr_int, d_of(s.evaluator)));
      CHECK(remote[i].timings.encrypt_ms > 0.0);
      CHECK(remote[i].timings.decrypt_ms > 0.0);
    }
  }

  SUBCASE("dlog breach names the borrower") {
    std::vector<std::int64_t> x(12, 1 << 12);
    Rng r = base.derive("x", 0);
    EncryptedRecord e{42, project_encryption(encrypt(x, x, cb.msk, r, 1 << 20), cb.pr_int), {}};
    auto plain = forward_int(x, s.client.pr_int, d_of(s.evaluator));
    REQUIRE(std::max(std::abs(plain[0]), std::abs(plain[1])) > s.evaluator.dlog_bound);
    WireClient c(eaddr);
    bool breach = false;
    try {
      c.call(MsgType::kSubmitCiphertext, serialize(e));
    } catch (const DlogRangeError& err) {
      breach = std::string(err.what()).find("borrower 42") != std::string::npos;
    }
    CHECK(breach);
  }

  // Everything the evaluator received or sent is free of master-key fields.
  std::lock_guard<std::mutex> lock(cap.mu);
  CHECK(!cap.lines.empty());
  for (const auto& line : cap.lines) {
    Envelope e = decode_envelope(line);
    CHECK_FALSE(contains_any_tag(e.payload, kMasterKeyTags));
  }
  eval->stop();
  auth->stop();
}

TEST_CASE("unreachable server is a typed connection error") {
  std::uint16_t port;
  {
    Listener l(local(0));
    port = l.port();
  }
  RetryPolicy fast;
  fast.attempts = 2;
  fast.backoff_ms = 10;
  CHECK_THROWS_WITH_AS(hello(local(port), fast), doctest::Contains("after 2 attempts"), ConnectionError);
  ClientBundle cb = small_setup(3).client;
  auto recs = random_records(2, 12, 6);
  SubmitOptions opts;
  opts.retry = fast;
  CHECK_THROWS_AS(client_submit(local(port), recs, cb, Rng::from_seed(1), opts), ConnectionError);
}

TEST_CASE("addresses come from the environment") {
  setenv("QFE_TEST_ADDR", "127.0.0.9:4100", 1);
  auto a = address_from_env("QFE_TEST_ADDR", local(1));
  CHECK(a.host == "127.0.0.9");
  CHECK(a.port == 4100);
  unsetenv("QFE_TEST_ADDR");
  CHECK(address_from_env("QFE_TEST_ADDR", local(1)).port == 1);
}
