#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace displab {

/// Base class of all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A field contains NaN/Inf or has the wrong length.
class InvalidFieldError : public Error {
 public:
  using Error::Error;
};

/// Bad parameters handed to a model or solver constructor.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// a'(u) vanished where the invariants c(u), p(u) are needed.
class SingularInvariantError : public Error {
 public:
  SingularInvariantError(const std::string& what, double u)
      : Error(what), u_value(u) {}
  double u_value;
};

/// Iterative solve did not reach tolerance; carries the residual history.
class NonconvergenceError : public Error {
 public:
  NonconvergenceError(const std::string& what, std::vector<double> residuals)
      : Error(what), residual_history(std::move(residuals)) {}
  std::vector<double> residual_history;
};

/// Characteristics cross: the implicit transport solution is multivalued.
class MultivaluedRegionError : public Error {
 public:
  MultivaluedRegionError(const std::string& what, double lo, double hi)
      : Error(what), bracket_lo(lo), bracket_hi(hi) {}
  double bracket_lo;
  double bracket_hi;
};

/// Denominator t*a' + Phi' (or a v_x floor) too small near the catastrophe.
class NearCausticError : public Error {
 public:
  using Error::Error;
};

/// A genericity hypothesis (k != 0, a0'*k > 0) fails at the critical point.
class GenericityError : public Error {
 public:
  using Error::Error;
};

/// b1(u_c) = 0: no leading dispersive term at the critical point.
class DegenerateDispersionError : public Error {
 public:
  using Error::Error;
};

/// c(u) vanishes: the order-6 commuting extension does not exist.
class ObstructionError : public Error {
 public:
  using Error::Error;
};

/// Requested evaluation point lies outside the trusted window / tabulation.
class OutOfWindowError : public Error {
 public:
  using Error::Error;
};

/// A solve finished but did not meet its accuracy contract.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double achieved)
      : Error(what), achieved_residual(achieved) {}
  double achieved_residual;
};

/// Configuration file or CLI arguments are inconsistent.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File system failure while persisting outputs.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace displab
