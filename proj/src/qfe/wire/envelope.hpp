// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

// Wire envelope, one JSON object per line:
//   {"v":1,"type":"submit_ciphertext","id":"...","payload":"<base64>",
//    "digest":"<sha256 hex of the decoded payload>"}

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "qfe/common/bytes.hpp"
#include "qfe/common/error.hpp"

namespace qfe {

inline constexpr int kProtocolVersion = 1;

enum class MsgType { kHello, kGetClientBundle, kGetEvalBundle, kSubmitCiphertext, kScoreResult, kError };

const char* msg_type_name(MsgType t);
std::optional<MsgType> parse_msg_type(std::string_view s);

struct Envelope {
  int version = kProtocolVersion;
  MsgType type = MsgType::kHello;
  std::string id;
  Bytes payload;

  friend bool operator==(const Envelope&, const Envelope&) = default;
};

// Single line, no terminator.
std::string encode_envelope(const Envelope& e);
// ProtocolError on malformed JSON, unknown type, unsupported version or a
// digest mismatch.
Envelope decode_envelope(std::string_view line);

// Error replies carry {"code":<int>,"name":"...","message":"..."}.
Envelope make_error_reply(const std::string& id, ErrorCode code, const std::string& message);
// Throws the typed error described by an error reply.
[[noreturn]] void raise_error_reply(const Envelope& e);

}  // namespace qfe
