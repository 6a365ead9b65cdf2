#pragma once

#include <stdexcept>
#include <string>

namespace locstruct {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or sequence length does not match what the output space expects.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An output that is not a member of the output space (unknown leaf, bad label).
class InvalidOutputError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration would exceed the configured cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A precondition of an operation was violated by the caller.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Non-finite values appeared during optimisation.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed input files, with line / field context in the message.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A dataset or configuration failed validation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace locstruct
