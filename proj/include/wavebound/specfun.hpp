#pragma once

// Gamma-family special functions used by the closed-form speed bounds.

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "wavebound/error.hpp"

namespace wavebound::specfun {

namespace detail {

// Lanczos approximation, g = 7, n = 9 (Godfrey's coefficient set).
// |error| in ln Gamma stays below ~2e-15 for x >= 1/2.
inline constexpr double lanczos_g = 7.0;
inline constexpr std::array<double, 9> lanczos_coef = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

inline double lanczos_log_gamma(double x) {
  // valid for x >= 1/2
  const double z = x - 1.0;
  double sum = lanczos_coef[0];
  for (std::size_t i = 1; i < lanczos_coef.size(); ++i) {
    sum += lanczos_coef[i] / (z + static_cast<double>(i));
  }
  const double t = z + lanczos_g + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(sum);
}

}  // namespace detail

/// ln Gamma(x) for x > 0. Throws DomainError otherwise.
inline double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("log_gamma: argument must be positive and finite, got " + std::to_string(x));
  }
  if (x == 1.0 || x == 2.0) return 0.0;
  if (x < 0.5) {
    // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x), sin(pi x) > 0 on (0, 1/2)
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) -
           detail::lanczos_log_gamma(1.0 - x);
  }
  return detail::lanczos_log_gamma(x);
}

/// Gamma(x) for x > 0, computed as exp(log_gamma(x)).
inline double gamma(double x) { return std::exp(log_gamma(x)); }

/// Euler Beta function B(a, b), evaluated in log space so large arguments
/// do not overflow the intermediate Gamma values.
inline double beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw DomainError("beta: arguments must be positive, got (" + std::to_string(a) + ", " +
                      std::to_string(b) + ")");
  }
  return std::exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b));
}

/// Leading terms of B(2 - beta, 2 + beta) as beta -> 2 from below:
/// 1/(2 - beta) - 11/6, with remainder O(2 - beta).
inline double beta_near_two(double beta_param) {
  if (!(beta_param < 2.0)) {
    throw DomainError("beta_near_two: requires beta < 2");
  }
  return 1.0 / (2.0 - beta_param) - 11.0 / 6.0;
}

}  // namespace wavebound::specfun
