// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include "qfe/common/bytes.hpp"

#include <sodium.h>

#include <fstream>
#include <iterator>

namespace qfe {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kArgument: return "argument_error";
    case ErrorCode::kBound: return "bound_error";
    case ErrorCode::kDlogOutOfRange: return "dlog_out_of_range";
    case ErrorCode::kKeyMismatch: return "key_mismatch";
    case ErrorCode::kFormat: return "format_error";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kConfig: return "config_error";
    case ErrorCode::kConnection: return "connection_error";
    case ErrorCode::kDivergence: return "divergence_error";
    case ErrorCode::kDegenerateDataset: return "degenerate_dataset";
    case ErrorCode::kProtocol: return "protocol_error";
    case ErrorCode::kInternal: return "internal_error";
  }
  return "unknown_error";
}

void throw_error(ErrorCode code, const std::string& what) {
  switch (code) {
    case ErrorCode::kArgument: throw ArgumentError(what);
    case ErrorCode::kBound: throw BoundError(what);
    case ErrorCode::kDlogOutOfRange: throw DlogRangeError(what);
    case ErrorCode::kKeyMismatch: throw KeyMismatchError(what);
    case ErrorCode::kFormat: throw FormatError(what);
    case ErrorCode::kIo: throw IoError(what);
    case ErrorCode::kConfig: throw ConfigError(what);
    case ErrorCode::kConnection: throw ConnectionError(what);
    case ErrorCode::kDivergence: throw DivergenceError(what);
    case ErrorCode::kDegenerateDataset: throw DegenerateDatasetError(what);
    case ErrorCode::kProtocol: throw ProtocolError(what);
    case ErrorCode::kInternal: break;
  }
  throw Error(ErrorCode::kInternal, what);
}

Digest sha256(std::span<const std::uint8_t> data) {
  Digest d{};
  crypto_hash_sha256(d.data(), data.data(), data.size());
  return d;
}

Digest sha256(std::string_view data) {
  return sha256(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(data.data()),
                                               data.size()));
}

std::string to_hex(std::span<const std::uint8_t> data) {
  std::string out(data.size() * 2 + 1, '\0');
  sodium_bin2hex(out.data(), out.size(), data.data(), data.size());
  out.pop_back();
  return out;
}

std::string base64_encode(std::span<const std::uint8_t> data) {
  const int variant = sodium_base64_VARIANT_ORIGINAL;
  std::string out(sodium_base64_ENCODED_LEN(data.size(), variant), '\0');
  sodium_bin2base64(out.data(), out.size(), data.data(), data.size(), variant);
  out.resize(out.size() - 1);
  return out;
}

Bytes base64_decode(std::string_view text) {
  Bytes out(text.size() / 4 * 3 + 3);
  std::size_t len = 0;
  const char* end = nullptr;
  if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(), nullptr, &len, &end,
                        sodium_base64_VARIANT_ORIGINAL) != 0 ||
      end != text.data() + text.size()) {
    throw FormatError("malformed base64 payload");
  }
  out.resize(len);
  return out;
}

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("short write to " + path);
}

}  // namespace qfe
