#pragma once

#include <stdexcept>
#include <string>

namespace slb {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid parameter values (negative tilts, malformed alphabets, ...).
struct DomainError : Error {
  using Error::Error;
};

// Sequence shorter than the window it is evaluated against.
struct LengthError : Error {
  using Error::Error;
};

// A partition sum has no finite positive value (empty support, zero weight,
// or an unconfined tilt).  The message names the offending constraint.
struct DivergenceError : Error {
  using Error::Error;
};

// An exhaustive enumeration would exceed the configured budget.
struct BudgetError : Error {
  using Error::Error;
};

// A pointwise distortion constraint is violated; the message carries a witness.
struct ConstraintViolation : Error {
  using Error::Error;
};

// An encoder failed the information-lossless certificate; the message carries
// the violating (state, input, input) pair.
struct CertificateError : Error {
  using Error::Error;
};

// No constraint bites at the optimum, so the requested quantity is undefined.
struct DegenerateError : Error {
  using Error::Error;
};

// The active-constraint Hessian is singular or numerically rank-deficient.
struct SingularHessianError : Error {
  using Error::Error;
};

// The transfer operator's support graph is not strongly connected.
struct ReducibleOperatorError : Error {
  using Error::Error;
};

// An iteration failed to reach its residual target; the message carries the
// final residual.
struct ConvergenceError : Error {
  using Error::Error;
};

// Malformed or unknown keys in a declarative config file.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace slb
