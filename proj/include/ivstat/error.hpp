#pragma once

#include <stdexcept>
#include <string>

namespace ivstat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: malformed files, flags, or data too small for a method.
class InputError : public Error {
 public:
  using Error::Error;
};

/// CSV ingestion failure. The message names the offending row and column.
class ParseError : public InputError {
 public:
  using InputError::InputError;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: non positive-definite matrices, undefined estimates.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace ivstat
