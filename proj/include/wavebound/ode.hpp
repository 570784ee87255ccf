#pragma once

// Adaptive Dormand-Prince 5(4) integration of a scalar ODE y' = F(t, y) with
// cubic Hermite dense output over the accepted steps.

#include <algorithm>
#include <cmath>
#include <vector>

#include "wavebound/error.hpp"

namespace wavebound::ode {

struct Options {
  double rtol = 1e-12;
  double atol = 1e-12;
  double h_init = 1e-3;
  double h_max = 0.05;
  int max_steps = 200000;
};

/// Accepted solution nodes with derivatives; evaluates by cubic Hermite
/// interpolation between nodes.
class DenseSolution {
 public:
  std::vector<double> t, y, dy;

  double operator()(double x) const {
    if (x <= t.front()) return y.front();
    if (x >= t.back()) return y.back();
    const auto it = std::upper_bound(t.begin(), t.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - t.begin()) - 1;
    const double h = t[i + 1] - t[i];
    const double s = (x - t[i]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * y[i] + h10 * h * dy[i] + h01 * y[i + 1] + h11 * h * dy[i + 1];
  }
};

template <class F>
DenseSolution integrate(const F& rhs, double t0, double y0, double t1, Options opt = {}) {
  // Dormand-Prince tableau
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  DenseSolution sol;
  double t = t0, y = y0;
  double k1 = rhs(t, y);
  sol.t.push_back(t);
  sol.y.push_back(y);
  sol.dy.push_back(k1);
  double h = std::min(opt.h_init, opt.h_max);
  int steps = 0;
  while (t < t1) {
    if (++steps > opt.max_steps) throw ConvergenceError("ode: step limit reached", t, t1);
    if (t + h > t1) h = t1 - t;
    const double k2 = rhs(t + c2 * h, y + h * a21 * k1);
    const double k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const double k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const double k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const double k6 = rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const double ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const double k7 = rhs(t + h, ynew);
    const double err = std::abs(h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
    const double scale = opt.atol + opt.rtol * std::max(std::abs(y), std::abs(ynew));
    const double ratio = err / scale;
    if (!std::isfinite(ratio)) {
      h *= 0.25;
      if (h < 1e-14) throw ConvergenceError("ode: non-finite derivative", t, t + h);
      continue;
    }
    if (ratio <= 1.0) {
      t += h;
      y = ynew;
      k1 = k7;
      sol.t.push_back(t);
      sol.y.push_back(y);
      sol.dy.push_back(k1);
    }
    const double factor = ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
    h = std::min(h * factor, opt.h_max);
    if (t < t1 && h < 1e-14 * std::max(1.0, std::abs(t))) {
      throw ConvergenceError("ode: step size underflow, tolerance cannot be met", t, t1);
    }
  }
  return sol;
}

}  // namespace wavebound::ode
