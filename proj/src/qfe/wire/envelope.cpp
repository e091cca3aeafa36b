// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include "qfe/wire/envelope.hpp"

#include <array>
#include <utility>

#include "json.hpp"

namespace qfe {
namespace {

constexpr std::array<std::pair<MsgType, const char*>, 6> kNames = {{
    {MsgType::kHello, "hello"},
    {MsgType::kGetClientBundle, "get_client_bundle"},
    {MsgType::kGetEvalBundle, "get_eval_bundle"},
    {MsgType::kSubmitCiphertext, "submit_ciphertext"},
    {MsgType::kScoreResult, "score_result"},
    {MsgType::kError, "error"},
}};

}  // namespace

const char* msg_type_name(MsgType t) {
  for (const auto& [k, name] : kNames) {
    if (k == t) return name;
  }
  return "unknown";
}

std::optional<MsgType> parse_msg_type(std::string_view s) {
  for (const auto& [k, name] : kNames) {
    if (s == name) return k;
  }
  return std::nullopt;
}

std::string encode_envelope(const Envelope& e) {
  nlohmann::json j = {{"v", e.version},
                      {"type", msg_type_name(e.type)},
                      {"id", e.id},
                      {"payload", base64_encode(e.payload)},
                      {"digest", to_hex(sha256(e.payload))}};
  return j.dump();
}

Envelope decode_envelope(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw ProtocolError("envelope is not valid JSON");
  }
  if (!j.is_object()) throw ProtocolError("envelope is not a JSON object");
  Envelope e;
  try {
    e.version = j.at("v").get<int>();
    std::string type = j.at("type").get<std::string>();
    auto t = parse_msg_type(type);
    if (!t) throw ProtocolError("unknown message type '" + type + "'");
    e.type = *t;
    e.id = j.at("id").get<std::string>();
    try {
      e.payload = base64_decode(j.at("payload").get<std::string>());
    } catch (const FormatError&) {
      throw ProtocolError("payload is not valid base64");
    }
    if (to_hex(sha256(e.payload)) != j.at("digest").get<std::string>()) {
      throw ProtocolError("payload digest mismatch");
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ProtocolError(std::string("malformed envelope: ") + ex.what());
  }
  if (e.version != kProtocolVersion) {
    throw ProtocolError("unsupported protocol version " + std::to_string(e.version));
  }
  return e;
}

Envelope make_error_reply(const std::string& id, ErrorCode code, const std::string& message) {
  nlohmann::json j = {{"code", static_cast<int>(code)}, {"name", error_code_name(code)}, {"message", message}};
  std::string s = j.dump();
  return Envelope{kProtocolVersion, MsgType::kError, id, Bytes(s.begin(), s.end())};
}

void raise_error_reply(const Envelope& e) {
  ErrorCode code = ErrorCode::kProtocol;
  std::string message = "remote error";
  try {
    auto j = nlohmann::json::parse(e.payload.begin(), e.payload.end());
    int c = j.at("code").get<int>();
    message = j.at("message").get<std::string>();
    const char* name = error_code_name(static_cast<ErrorCode>(c));
    if (std::string(name) != "unknown_error") code = static_cast<ErrorCode>(c);
  } catch (const nlohmann::json::exception&) {
    message = "unreadable error reply";
  }
  throw_error(code, message);
}

}  // namespace qfe
