// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0
//
// Exception hierarchy shared by every module. Each category maps to a
// distinct process exit code in the CLI (see docs/cli.md).

#pragma once

#include <stdexcept>
#include <string>

namespace ssa {

enum class ErrorKind {
  kDimension,
  kContract,
  kNumeric,
  kParse,
  kState,
  kConfigMismatch,
  kInfeasible,
  kUndefinedRate,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Incompatible tensor shapes.
struct DimensionError : Error {
  explicit DimensionError(const std::string& w) : Error(ErrorKind::kDimension, w) {}
};
/// Violated precondition of a public operation.
struct ContractError : Error {
  explicit ContractError(const std::string& w) : Error(ErrorKind::kContract, w) {}
};
/// NaN/Inf produced or consumed.
struct NumericError : Error {
  explicit NumericError(const std::string& w) : Error(ErrorKind::kNumeric, w) {}
};
/// Malformed input file; message carries the source line when known.
struct ParseError : Error {
  explicit ParseError(const std::string& w) : Error(ErrorKind::kParse, w) {}
};
/// Operation invalid in the object's current lifecycle state.
struct StateError : Error {
  explicit StateError(const std::string& w) : Error(ErrorKind::kState, w) {}
};
struct ConfigMismatchError : Error {
  explicit ConfigMismatchError(const std::string& w)
      : Error(ErrorKind::kConfigMismatch, w) {}
};
/// CTC target cannot be aligned to the available frames.
struct InfeasibleError : Error {
  explicit InfeasibleError(const std::string& w) : Error(ErrorKind::kInfeasible, w) {}
};
/// A rate whose denominator (reference words / scored time) is zero.
struct UndefinedRateError : Error {
  explicit UndefinedRateError(const std::string& w)
      : Error(ErrorKind::kUndefinedRate, w) {}
};

}  // namespace ssa
