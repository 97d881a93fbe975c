#pragma once

#include <stdexcept>
#include <string>

namespace lrfput {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain where a quantity is defined
/// (zeta at s <= 1, a remainder evaluated outside |eta| <= m * delta_star, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The quadratic coefficient b vanishes or its sign cannot be certified.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Invalid potential specification or configuration value.
class SpecError : public Error {
 public:
  using Error::Error;
};

/// A Type I property required by an operator does not hold at the requested scale.
class CertificationError : public Error {
 public:
  using Error::Error;
};

/// A Fourier multiplier took a non-finite value on the grid.
class SingularMultiplierError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver did not reach its tolerance.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double last_value)
      : Error(what), last_value_(last_value) {}
  /// Final residual (linear solves) or final increment (fixed-point iterations).
  double last_value() const noexcept { return last_value_; }

 private:
  double last_value_;
};

}  // namespace lrfput
