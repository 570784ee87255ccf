#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature in the style of QUADPACK's
// QAG, plus the power substitution used for integrable endpoint singularities.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace wavebound::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
};

struct Tolerance {
  double abs = 1e-10;
  double rel = 1e-10;
  int max_intervals = 4000;
};

namespace detail {

inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resk = fc * wgk[7];
  double resg = fc * wg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * xgk[j];
    const double f1 = f(center - dx), f2 = f(center + dx);
    resk += wgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += wg[j / 2] * (f1 + f2);
  }
  return {a, b, resk * half, std::abs((resk - resg) * half)};
}

}  // namespace detail

/// Integrates f over [a, b] to max(abs, rel*|I|). Never throws; inspect
/// `converged` and `error`.
template <class F>
Result integrate(const F& f, double a, double b, Tolerance tol = {}) {
  Result r;
  if (a == b) {
    r.converged = true;
    return r;
  }
  std::priority_queue<detail::Segment> heap;
  heap.push(detail::gk15(f, a, b));
  double total = heap.top().value, err = heap.top().error;
  int count = 1;
  auto done = [&] { return err <= std::max(tol.abs, tol.rel * std::abs(total)); };
  while (!done() && count < tol.max_intervals) {
    const auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b))) break;
    heap.pop();
    const auto left = detail::gk15(f, worst.a, mid);
    const auto right = detail::gk15(f, mid, worst.b);
    heap.push(left);
    heap.push(right);
    ++count;
    // Re-sum from scratch occasionally to limit drift from the running update.
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    if (count % 64 == 0) {
      auto copy = heap;
      total = 0.0;
      err = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        err += copy.top().error;
        copy.pop();
      }
    }
  }
  // final exact re-summation
  total = 0.0;
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  r.value = total;
  r.error = err;
  r.intervals = count;
  r.converged = done() && std::isfinite(total);
  return r;
}

/// Integrates f over [a, b] where f has an integrable power singularity at a,
/// via x = a + (b-a) s^q. The transformed integrand
/// q (b-a) s^(q-1) f(a + (b-a) s^q) is bounded at s=0 when f ~ (x-a)^p with
/// q (p+1) >= 1.
template <class F>
Result integrate_left_singular(const F& f, double a, double b, int q, Tolerance tol = {}) {
  const double len = b - a;
  const double qd = q;
  auto g = [&](double s) {
    if (s <= 0.0) return 0.0;
    const double sq1 = std::pow(s, qd - 1.0);
    const double x = a + len * sq1 * s;
    if (x <= a) return 0.0;
    return qd * len * sq1 * f(x);
  };
  return integrate(g, 0.0, 1.0, tol);
}

}  // namespace wavebound::quad
