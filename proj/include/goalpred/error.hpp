// Copyright 2026 The goalpred Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace goalpred {

/// Broad failure classes. The CLI maps each to a distinct exit code.
enum class ErrorKind {
  usage,      // bad arguments or configuration values
  io,         // missing or unreadable/unwritable file
  parse,      // malformed input record
  invariant,  // well-formed input that violates a data invariant
  numeric,    // degenerate geometry, zero-variance statistics, shape mismatch
  training,   // non-finite loss or similar optimisation failure
};

const char* error_kind_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace goalpred
