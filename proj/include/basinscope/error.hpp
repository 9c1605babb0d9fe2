// Copyright 2026 The basinscope Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace basinscope {

/// Coarse failure categories. The CLI maps each one to a fixed exit code.
enum class ErrorKind {
  invalid_argument,  // malformed configuration or flag values
  precondition,      // well-formed input that violates an operation's contract
  numeric,           // NaN/Inf or divergence
  not_found,         // a search exhausted its budget
  format,            // unreadable or corrupt file
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error invalid_argument(const std::string& what) {
  return Error(ErrorKind::invalid_argument, what);
}
inline Error precondition_failed(const std::string& what) {
  return Error(ErrorKind::precondition, what);
}
inline Error numeric_failure(const std::string& what) {
  return Error(ErrorKind::numeric, what);
}

}  // namespace basinscope
