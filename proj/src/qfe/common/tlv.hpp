// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

// Versioned tag-length-value container shared by every binary artifact.
//
//   magic    8 bytes
//   version  u16
//   fields   repeated { tag u16, length u32, value[length] }
//
// Scalar fields appear at most once; list fields repeat their tag, one
// entry per element, in order. Readers reject unknown magic, newer versions
// and truncated fields.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "qfe/common/bytes.hpp"

namespace qfe {

using Magic = std::array<std::uint8_t, 8>;

constexpr Magic make_magic(std::string_view s) {
  Magic m{};
  for (std::size_t i = 0; i < m.size() && i < s.size(); ++i) m[i] = static_cast<std::uint8_t>(s[i]);
  return m;
}

namespace magic {
inline constexpr Magic kMasterKey = make_magic("QFE:MSK");
inline constexpr Magic kCiphertext = make_magic("QFE:CT");
inline constexpr Magic kFeKey = make_magic("QFE:FEK");
inline constexpr Magic kClientBundle = make_magic("QFE:CLI");
inline constexpr Magic kEvalBundle = make_magic("QFE:EVAL");
inline constexpr Magic kAuthority = make_magic("QFE:AUTH");
inline constexpr Magic kCiphertextBatch = make_magic("QFE:CTB");
inline constexpr Magic kCiphertextEntry = make_magic("QFE:CTE");
}  // namespace magic

inline constexpr std::uint16_t kFormatVersion = 1;

namespace tag {
inline constexpr std::uint16_t kDim = 0x0001;
inline constexpr std::uint16_t kMskS = 0x0010;
inline constexpr std::uint16_t kMskT = 0x0011;
inline constexpr std::uint16_t kCtA = 0x0020;
inline constexpr std::uint16_t kCtB = 0x0021;
inline constexpr std::uint16_t kCtGamma = 0x0022;
inline constexpr std::uint16_t kFekKey = 0x0030;
inline constexpr std::uint16_t kFekDigest = 0x0031;
inline constexpr std::uint16_t kQuantDigest = 0x0040;
inline constexpr std::uint16_t kQuantConfig = 0x0041;
inline constexpr std::uint16_t kPrInt = 0x0050;
inline constexpr std::uint16_t kDiag = 0x0051;
inline constexpr std::uint16_t kBundleMsk = 0x0060;
inline constexpr std::uint16_t kBundleFek = 0x0061;
inline constexpr std::uint16_t kDlogBound = 0x0062;
inline constexpr std::uint16_t kBorrowerId = 0x0063;
inline constexpr std::uint16_t kCiphertext = 0x0064;
inline constexpr std::uint16_t kProjMsk = 0x0065;
inline constexpr std::uint16_t kMessageBound = 0x0066;
inline constexpr std::uint16_t kFeatureTransform = 0x0067;
inline constexpr std::uint16_t kClientBundle = 0x0068;
inline constexpr std::uint16_t kEvalBundle = 0x0069;
}  // namespace tag

class TlvWriter {
 public:
  explicit TlvWriter(const Magic& m, std::uint16_t version = kFormatVersion);

  // Scalar field; a second use of the same tag is an error.
  TlvWriter& field(std::uint16_t tag, std::span<const std::uint8_t> value);
  // One element of a list field.
  TlvWriter& append(std::uint16_t tag, std::span<const std::uint8_t> value);
  TlvWriter& u32(std::uint16_t tag, std::uint32_t v);
  TlvWriter& i64(std::uint16_t tag, std::int64_t v);
  TlvWriter& u64(std::uint16_t tag, std::uint64_t v);

  Bytes finish() { return w_.take(); }

 private:
  ByteWriter w_;
  std::vector<std::uint16_t> seen_;
};

class TlvReader {
 public:
  TlvReader(std::span<const std::uint8_t> in, const Magic& expected);

  std::uint16_t version() const { return version_; }
  const std::vector<std::pair<std::uint16_t, std::span<const std::uint8_t>>>& fields() const { return fields_; }

  // Scalar lookups; FormatError if the tag repeats.
  std::optional<std::span<const std::uint8_t>> find(std::uint16_t tag) const;
  std::span<const std::uint8_t> require(std::uint16_t tag) const;
  std::uint32_t require_u32(std::uint16_t tag) const;
  std::int64_t require_i64(std::uint16_t tag) const;
  std::uint64_t require_u64(std::uint16_t tag) const;
  std::vector<std::span<const std::uint8_t>> find_all(std::uint16_t tag) const;

 private:
  std::uint16_t version_ = 0;
  std::vector<std::pair<std::uint16_t, std::span<const std::uint8_t>>> fields_;
};

// The known magic at the start of the input, if any.
std::optional<Magic> sniff_magic(std::span<const std::uint8_t> in);

// Searches a container and every nested container for any of the given
// tags. Unparseable input counts as containing nothing.
bool contains_any_tag(std::span<const std::uint8_t> in, std::span<const std::uint16_t> tags);

}  // namespace qfe
