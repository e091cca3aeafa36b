// Copyright 2026 The qfescore Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace qfe {

// Numeric values are part of the C API (qfe_status) and must not change.
enum class ErrorCode : int {
  kArgument = 1,
  kBound = 2,
  kDlogOutOfRange = 3,
  kKeyMismatch = 4,
  kFormat = 5,
  kIo = 6,
  kConfig = 7,
  kConnection = 8,
  kDivergence = 9,
  kDegenerateDataset = 10,
  kProtocol = 11,
  kInternal = 99,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

template <ErrorCode C>
class TypedError : public Error {
 public:
  explicit TypedError(const std::string& what) : Error(C, what) {}
};

using ArgumentError = TypedError<ErrorCode::kArgument>;
using BoundError = TypedError<ErrorCode::kBound>;
// Raised when a bounded discrete log finds no exponent inside its window;
// this means the quantization scales are wrong, never a silent bad score.
using DlogRangeError = TypedError<ErrorCode::kDlogOutOfRange>;
using KeyMismatchError = TypedError<ErrorCode::kKeyMismatch>;
using FormatError = TypedError<ErrorCode::kFormat>;
using IoError = TypedError<ErrorCode::kIo>;
using ConfigError = TypedError<ErrorCode::kConfig>;
using ConnectionError = TypedError<ErrorCode::kConnection>;
using DivergenceError = TypedError<ErrorCode::kDivergence>;
using DegenerateDatasetError = TypedError<ErrorCode::kDegenerateDataset>;
using ProtocolError = TypedError<ErrorCode::kProtocol>;

// Throws the TypedError matching code (Error itself for kInternal).
[[noreturn]] void throw_error(ErrorCode code, const std::string& what);

}  // namespace qfe
