#pragma once

#include <stdexcept>
#include <string>

namespace gatesynth {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live in different polynomial rings (arity or time-slot count differ).
class ContextMismatch : public Error {
 public:
  using Error::Error;
};

/// Matrix operands have incompatible dimensions.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// An argument violates an operation's precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed to reach its tolerance.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// The principal logarithm is ill-defined (eigenphase too close to +-pi).
class BranchAmbiguity : public Error {
 public:
  using Error::Error;
};

/// Misconfigured problem, bench or CLI input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace gatesynth
