#pragma once

#include <stdexcept>
#include <string>

namespace wavebound {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Expression text could not be parsed. `position` is a 0-based offset.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Model failed its structural checks (steady states, positivity, parameters).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An improper integral does not converge (or the quadrature could not resolve it).
class DivergentIntegral : public Error {
 public:
  using Error::Error;
};

/// Iterative solve (fixed point, bisection, ODE step control) gave up.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double lo, double hi)
      : Error(what + " (last bracket [" + std::to_string(lo) + ", " + std::to_string(hi) + "])"),
        lo_(lo), hi_(hi) {}
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_, hi_;
};

/// Time stepper blew up.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

/// Level-set front could not be located (no crossing, or several).
class FrontTrackingError : public Error {
 public:
  using Error::Error;
};

/// Simulation configuration rejected before running.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace wavebound
