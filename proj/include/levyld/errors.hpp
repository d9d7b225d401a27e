#pragma once

#include <stdexcept>
#include <string>

namespace levyld {

// Base for every error raised by the library. The CLI maps subclasses to
// exit codes, so keep the hierarchy flat.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reducible chain or numerically singular (Pi - Q).
class SingularSystem : public Error {
 public:
  using Error::Error;
};

// Right-hand side of a Poisson equation does not average to zero.
class SolvabilityViolated : public Error {
 public:
  using Error::Error;
};

class NegativeIntensity : public Error {
 public:
  using Error::Error;
};

class NonPositiveVariance : public Error {
 public:
  using Error::Error;
};

// Perturbed logarithm argument W(u, x) is not positive.
class DomainError : public Error {
 public:
  using Error::Error;
};

class OverflowGuard : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class DegenerateSample : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

// Malformed model input: bad shapes, broken invariants, unknown keys.
class InvalidModel : public Error {
 public:
  using Error::Error;
};

}  // namespace levyld
