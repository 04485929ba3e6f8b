#pragma once

#include <stdexcept>
#include <string>

namespace floquet {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invalid input: bad expression, schema violation, invalid grid.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Expression syntax error; `position` is the 0-based offset in the source text.
class ParseError : public InputError {
 public:
  ParseError(const std::string& message, std::size_t position)
      : InputError(message + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A numerical kernel could not deliver its contract (singular matrix,
/// step-size underflow, non-convergence).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace floquet
