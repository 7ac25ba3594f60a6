#pragma once

#include <stdexcept>
#include <string>

namespace folsing {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad caller input: mismatched rings, indices out of range, malformed text.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold for the given
/// arguments (non-proper ideal, nonsingular jet passed to a singular-only
/// routine, non-adapted metric, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Two independent computations that must agree did not. This always means
/// a defect in the library, never bad input.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// Parse failure with a 1-based line/column position.
class ParseError : public InputError {
 public:
  ParseError(const std::string& message, int line, int column)
      : InputError(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        detail_(message),
        line_(line),
        column_(column) {}

  /// The message without the position prefix.
  const std::string& detail() const noexcept { return detail_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  std::string detail_;
  int line_;
  int column_;
};

}  // namespace folsing
