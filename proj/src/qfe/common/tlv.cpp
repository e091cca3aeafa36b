// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#include "qfe/common/tlv.hpp"

#include <algorithm>
#include <cstdint>
#include <string>

namespace qfe {
namespace {

constexpr std::array<Magic, 8> kKnown = {magic::kMasterKey,   magic::kCiphertext, magic::kFeKey,
                                         magic::kClientBundle, magic::kEvalBundle, magic::kAuthority,
                                         magic::kCiphertextBatch, magic::kCiphertextEntry};

std::string tag_name(std::uint16_t t) {
  static const char* hex = "0123456789abcdef";
  std::string s = "0x";
  for (int shift = 12; shift >= 0; shift -= 4) s.push_back(hex[(t >> shift) & 0xf]);
  return s;
}

}  // namespace

TlvWriter::TlvWriter(const Magic& m, std::uint16_t version) {
  w_.raw(m);
  w_.u16(version);
}

TlvWriter& TlvWriter::field(std::uint16_t tag, std::span<const std::uint8_t> value) {
  if (std::find(seen_.begin(), seen_.end(), tag) != seen_.end()) {
    throw ArgumentError("duplicate TLV tag " + tag_name(tag));
  }
  seen_.push_back(tag);
  return append(tag, value);
}

TlvWriter& TlvWriter::append(std::uint16_t tag, std::span<const std::uint8_t> value) {
  if (value.size() > UINT32_MAX) throw ArgumentError("TLV field too large");
  w_.u16(tag);
  w_.u32(static_cast<std::uint32_t>(value.size()));
  w_.raw(value);
  return *this;
}

TlvWriter& TlvWriter::u64(std::uint16_t tag, std::uint64_t v) {
  ByteWriter b;
  b.u64(v);
  return field(tag, b.bytes());
}

TlvWriter& TlvWriter::u32(std::uint16_t tag, std::uint32_t v) {
  ByteWriter b;
  b.u32(v);
  return field(tag, b.bytes());
}

TlvWriter& TlvWriter::i64(std::uint16_t tag, std::int64_t v) {
  ByteWriter b;
  b.i64(v);
  return field(tag, b.bytes());
}

TlvReader::TlvReader(std::span<const std::uint8_t> in, const Magic& expected) {
  ByteReader r(in);
  auto m = r.raw(expected.size());
  if (!std::equal(m.begin(), m.end(), expected.begin())) {
    std::string want(expected.begin(), std::find(expected.begin(), expected.end(), 0));
    throw FormatError("bad magic: expected " + want + " file");
  }
  version_ = r.u16();
  if (version_ == 0 || version_ > kFormatVersion) {
    throw FormatError("unsupported format version " + std::to_string(version_));
  }
  while (!r.done()) {
    std::uint16_t t = r.u16();
    std::uint32_t len = r.u32();
    fields_.emplace_back(t, r.raw(len));
  }
}

std::optional<std::span<const std::uint8_t>> TlvReader::find(std::uint16_t tag) const {
  std::optional<std::span<const std::uint8_t>> out;
  for (const auto& [t, v] : fields_) {
    if (t != tag) continue;
    if (out) throw FormatError("duplicate field " + tag_name(t));
    out = v;
  }
  return out;
}

std::vector<std::span<const std::uint8_t>> TlvReader::find_all(std::uint16_t tag) const {
  std::vector<std::span<const std::uint8_t>> out;
  for (const auto& [t, v] : fields_) {
    if (t == tag) out.push_back(v);
  }
  return out;
}

std::uint64_t TlvReader::require_u64(std::uint16_t tag) const {
  ByteReader r(require(tag));
  auto v = r.u64();
  r.expect_done();
  return v;
}

std::span<const std::uint8_t> TlvReader::require(std::uint16_t tag) const {
  auto v = find(tag);
  if (!v) throw FormatError("missing field " + tag_name(tag));
  return *v;
}

std::uint32_t TlvReader::require_u32(std::uint16_t tag) const {
  ByteReader r(require(tag));
  auto v = r.u32();
  r.expect_done();
  return v;
}

std::int64_t TlvReader::require_i64(std::uint16_t tag) const {
  ByteReader r(require(tag));
  auto v = r.i64();
  r.expect_done();
  return v;
}

std::optional<Magic> sniff_magic(std::span<const std::uint8_t> in) {
  if (in.size() < sizeof(Magic) + 2) return std::nullopt;
  for (const auto& m : kKnown) {
    if (std::equal(m.begin(), m.end(), in.begin())) return m;
  }
  return std::nullopt;
}

bool contains_any_tag(std::span<const std::uint8_t> in, std::span<const std::uint16_t> tags) {
  auto m = sniff_magic(in);
  if (!m) return false;
  try {
    TlvReader r(in, *m);
    for (const auto& [t, v] : r.fields()) {
      if (std::find(tags.begin(), tags.end(), t) != tags.end()) return true;
      if (contains_any_tag(v, tags)) return true;
    }
  } catch (const FormatError&) {
    return false;
  }
  return false;
}

}  // namespace qfe
