#pragma once

// Finite differences and scalar maximisation shared by the bound solvers.

#include <cmath>
#include <vector>

namespace wavebound::calc {

/// One-sided derivative at x from the right: second-order stencil
/// (-3 g(x) + 4 g(x+h) - g(x+2h)) / 2h followed by one Richardson step.
template <class G>
double derivative_right(const G& g, double x, double h = 1e-6) {
  auto stencil = [&](double step) {
    return (-3.0 * g(x) + 4.0 * g(x + step) - g(x + 2.0 * step)) / (2.0 * step);
  };
  return (4.0 * stencil(0.5 * h) - stencil(h)) / 3.0;
}

template <class G>
double derivative_central(const G& g, double x, double h = 1e-6) {
  return (g(x + h) - g(x - h)) / (2.0 * h);
}

struct Maximum {
  double x;
  double value;
};

/// Golden-section search for a maximum of g on [a, b]; stops once the
/// bracket is narrower than `tol`.
template <class G>
Maximum golden_section_max(const G& g, double a, double b, double tol = 1e-8, int max_iter = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double g1 = g(x1), g2 = g(x2);
  for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
    if (g1 >= g2) {
      b = x2;
      x2 = x1;
      g2 = g1;
      x1 = b - inv_phi * (b - a);
      g1 = g(x1);
    } else {
      a = x1;
      x1 = x2;
      g1 = g2;
      x2 = a + inv_phi * (b - a);
      g2 = g(x2);
    }
  }
  return g1 >= g2 ? Maximum{x1, g1} : Maximum{x2, g2};
}

/// Multi-start maximisation: evaluate g on `n` uniform points over [a, b],
/// then refine the best bracket by golden section.
template <class G>
Maximum grid_golden_max(const G& g, double a, double b, int n = 64, double tol = 1e-8) {
  std::vector<double> xs(n), gs(n);
  int best = 0;
  for (int i = 0; i < n; ++i) {
    xs[i] = a + (b - a) * i / (n - 1);
    gs[i] = g(xs[i]);
    if (gs[i] > gs[best]) best = i;
  }
  const double lo = xs[best > 0 ? best - 1 : 0];
  const double hi = xs[best < n - 1 ? best + 1 : n - 1];
  Maximum refined = golden_section_max(g, lo, hi, tol);
  if (gs[best] > refined.value) return {xs[best], gs[best]};
  return refined;
}

/// Bisection for a sign change of h on [lo, hi].
template <class H>
double bisect(const H& h, double lo, double hi, double tol = 1e-12, int max_iter = 200) {
  double hlo = h(lo);
  for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double hm = h(mid);
    if ((hm > 0.0) == (hlo > 0.0)) {
      lo = mid;
      hlo = hm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace wavebound::calc
