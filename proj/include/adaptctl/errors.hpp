// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace adaptctl {

/// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input (formula source, config files, CSV datasets).
/// Carries a 1-based line/column when known; 0 means "not applicable".
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line = 0, std::size_t column = 0)
      : Error(decorate(message, line, column)), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string decorate(const std::string& message, std::size_t line, std::size_t column) {
    if (line == 0) return message;
    std::string out = message + " (line " + std::to_string(line);
    if (column != 0) out += ", column " + std::to_string(column);
    out += ")";
    return out;
  }

  std::size_t line_;
  std::size_t column_;
};

/// Formula evaluation failure: unbound variable or division by zero.
class EvalError : public Error {
 public:
  using Error::Error;
};

/// Filesystem problems and artifact header/version mismatches.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Algorithm 1 exhausted every pivot without meeting its comparison.
class SolutionNotFound : public Error {
 public:
  using Error::Error;
};

/// An iterative procedure exceeded its step budget.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// Curve fitting failure: too few points, singular system, or stalled solver.
class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace adaptctl
