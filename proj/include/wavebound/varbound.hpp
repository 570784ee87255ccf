#pragma once

// Single-species variational speed bounds.
//
// With the test family phi_beta(u) = ((1-u)/u)^beta the minimal speed obeys
//   c^2 / 2 >= sup_{beta in [0,2)} F(beta),
//   F(beta) = beta * N(beta) / B(2-beta, 2+beta),
//   N(beta) = int_0^1 D(u) f(u) u^-beta (1-u)^beta du,
// and F(beta) -> 2 D(0) f'(0) as beta -> 2, i.e. the linear marginal speed.

#include <cmath>
#include <limits>
#include <string>

#include "wavebound/calculus.hpp"
#include "wavebound/error.hpp"
#include "wavebound/model.hpp"
#include "wavebound/quadrature.hpp"
#include "wavebound/specfun.hpp"

namespace wavebound {

enum class Selection { pulled, pushed, indeterminate };

inline const char* to_string(Selection s) {
  switch (s) {
    case Selection::pulled: return "pulled";
    case Selection::pushed: return "pushed";
    case Selection::indeterminate: return "indeterminate";
  }
  return "?";
}

struct BoundResult {
  double beta_star = 0.0;
  double F_star = 0.0;
  double c_lb = 0.0;
  double c_linear = 0.0;
  Selection selection = Selection::indeterminate;
  bool attained_at_boundary = false;
  // diagnostics
  double F_interior = 0.0;  // best interior value of F
  double F_limit = 0.0;     // beta -> 2 limit
};

namespace detail {

/// Local power p of r(u) = g(u)/u at u = 0, estimated from two small
/// arguments (r ~ u^p). Returns 0 when r vanishes identically there.
template <class G>
double leading_power_of_ratio(const G& g) {
  const double ua = 1e-8, ub = 1e-12;
  const double ra = std::abs(g(ua) / ua), rb = std::abs(g(ub) / ub);
  if (!std::isfinite(ra) || !std::isfinite(rb)) return -std::numeric_limits<double>::infinity();
  if (rb == 0.0 && ra == 0.0) return 0.0;
  if (rb == 0.0) return 1.0;  // vanishes faster than any sampled power
  if (ra == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(ra / rb) / std::log(ua / ub);
}

/// int_0^1 g(u) u^-beta (1-u)^beta du for g(u) = u r(u) with r(0) = r0.
///
/// When r is bounded at 0 the leading singular part r0 / (2 - beta) is taken
/// analytically and only the bounded remainder [r(u)(1-u)^beta - r0] u^(1-beta)
/// is integrated. Substitution alone is not enough for beta close to 2:
/// at beta = 1.999 half of the integral comes from u < 1e-300.
template <class G>
double singular_moment(const G& g, double beta, double r0, quad::Tolerance tol) {
  if (!(beta > 0.0 && beta < 2.0)) throw DomainError("beta must lie in (0, 2)");
  double p = leading_power_of_ratio(g);
  if (std::abs(p) < 1e-3) p = 0.0;
  // integrand ~ u^(1 + p - beta) near 0
  if (!(2.0 + p - beta > 0.0)) {
    throw DivergentIntegral("integrand D f u^-beta (1-u)^beta is not integrable at u = 0 for beta = " +
                            std::to_string(beta));
  }
  auto check = [&](const quad::Result& r, const char* what) {
    if (!std::isfinite(r.value) || (!r.converged && r.error > 1e3 * std::max(tol.abs, tol.rel * std::abs(r.value)))) {
      throw DivergentIntegral(std::string("quadrature failed for ") + what + " at beta = " +
                              std::to_string(beta));
    }
    return r.value;
  };
  const double split = 0.5;
  if (p >= 0.0 && std::isfinite(r0)) {
    auto remainder = [&](double u) {
      return (g(u) / u * std::pow(1.0 - u, beta) - r0) * std::pow(u, 1.0 - beta);
    };
    const double left = check(quad::integrate_left_singular(remainder, 0.0, split, 2, tol), "N(beta)");
    const double right = check(quad::integrate(remainder, split, 1.0, tol), "N(beta)");
    return r0 / (2.0 - beta) + left + right;
  }
  // r itself singular but the moment is integrable: regularise by substitution
  const int q = static_cast<int>(std::ceil(2.0 / (2.0 + std::min(p, 0.0) - beta)));
  auto integrand = [&](double u) { return g(u) * std::pow(u, -beta) * std::pow(1.0 - u, beta); };
  const double left = check(quad::integrate_left_singular(integrand, 0.0, split, q, tol), "N(beta)");
  const double right = check(quad::integrate(integrand, split, 1.0, tol), "N(beta)");
  return left + right;
}

inline double beta_weight(double beta) { return specfun::beta(2.0 - beta, 2.0 + beta); }

}  // namespace detail

/// f'(0) by a one-sided Richardson-refined difference.
inline double reaction_slope_at_zero(const ScalarModel& model) {
  return calc::derivative_right([&](double u) { return model.f(u); }, 0.0);
}

/// N(beta) = int_0^1 D f u^-beta (1-u)^beta du.
inline double N_of_beta(const ScalarModel& model, double beta, quad::Tolerance tol = {1e-10, 1e-10, 4000}) {
  const double r0 = model.D(0.0) * reaction_slope_at_zero(model);
  return detail::singular_moment([&](double u) { return model.D(u) * model.f(u); }, beta, r0, tol);
}

/// F(beta) = beta N(beta) / B(2-beta, 2+beta) for beta in (0, 2).
inline double F_of_beta(const ScalarModel& model, double beta, quad::Tolerance tol = {1e-10, 1e-10, 4000}) {
  if (!(beta > 0.0 && beta < 2.0)) throw DomainError("F_of_beta: beta must lie in (0, 2)");
  return beta * N_of_beta(model, beta, tol) / detail::beta_weight(beta);
}

/// lim_{beta -> 2} F(beta) = 2 D(0) f'(0).
inline double F_limit_beta2(const ScalarModel& model) {
  const double v = 2.0 * model.D(0.0) * reaction_slope_at_zero(model);
  return v == 0.0 ? 0.0 : v;
}

/// Linear marginal-stability speed c_L = 2 sqrt(max(0, D(0) f'(0))).
inline double linear_speed(const ScalarModel& model) {
  return 2.0 * std::sqrt(std::max(0.0, model.D(0.0) * reaction_slope_at_zero(model)));
}

namespace detail {

/// Newton polish of an interior maximiser using 5-point differences of a
/// tightly integrated F. Golden section alone cannot locate the maximiser
/// below sqrt(quadrature noise).
template <class F>
double polish_maximiser(const F& fn, double beta, double lo, double hi) {
  const double h = 1e-3;
  for (int it = 0; it < 8; ++it) {
    if (beta - 2 * h <= lo || beta + 2 * h >= hi) break;
    const double fm2 = fn(beta - 2 * h), fm1 = fn(beta - h), f0 = fn(beta), fp1 = fn(beta + h),
                 fp2 = fn(beta + 2 * h);
    const double d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h);
    const double d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h);
    if (!(d2 < 0.0)) break;
    const double step = -d1 / d2;
    if (std::abs(step) > 1e-3) break;
    beta += step;
    if (std::abs(step) < 1e-12) break;
  }
  return beta;
}

}  // namespace detail

/// Thresholds separating pushed / pulled / indeterminate outcomes.
struct SupOptions {
  int grid_points = 64;
  double beta_min = 1e-3;
  double beta_max = 2.0 - 1e-3;
  double golden_tol = 1e-8;
  double tie_tol = 1e-9;
  double pushed_margin = 1e-7;
};

/// Variational bound c_lb = sqrt(2 sup F), comparing the best interior value of
/// F with its beta -> 2 limit.
inline BoundResult sup_F(const ScalarModel& model, SupOptions opt = {}) {
  auto F = [&](double b) { return F_of_beta(model, b); };
  auto best = calc::grid_golden_max(F, opt.beta_min, opt.beta_max, opt.grid_points, opt.golden_tol);
  BoundResult res;
  res.F_limit = F_limit_beta2(model);
  res.c_linear = linear_speed(model);

  if (best.x > opt.beta_min && best.x < opt.beta_max) {
    auto F_tight = [&](double b) { return F_of_beta(model, b, {1e-14, 1e-13, 20000}); };
    const double polished = detail::polish_maximiser(F_tight, best.x, opt.beta_min, opt.beta_max);
    if (polished != best.x) {
      const double fp = F_tight(polished);
      if (fp >= F_tight(best.x) - 1e-13) best = {polished, fp};
    } else {
      best.value = F_tight(best.x);
    }
  }
  res.F_interior = best.value;

  const double diff = best.value - res.F_limit;
  if (diff > opt.pushed_margin) {
    res.selection = Selection::pushed;
    res.beta_star = best.x;
    res.F_star = best.value;
    res.attained_at_boundary = false;
  } else if (diff < -opt.pushed_margin) {
    res.selection = Selection::pulled;
    res.beta_star = 2.0;
    res.F_star = res.F_limit;
    res.attained_at_boundary = true;
  } else {
    res.selection = Selection::indeterminate;
    res.attained_at_boundary = diff <= opt.tie_tol;
    res.beta_star = res.attained_at_boundary ? 2.0 : best.x;
    res.F_star = std::max(best.value, res.F_limit);
  }
  res.c_lb = std::sqrt(2.0 * std::max(0.0, res.F_star));
  return res;
}

/// Closed-form F(beta) families.
enum class ClosedFormKind { wound, porous_n1, allee };

struct ClosedFormParams {
  double m = 0.0, n = 1.0;         // wound / porous_n1
  double alpha = 0.0, a = 0.0;     // allee
};

inline double closed_form_F(ClosedFormKind kind, const ClosedFormParams& p, double beta) {
  using specfun::log_gamma;
  switch (kind) {
    case ClosedFormKind::wound: {
      // 6 beta / [(1+beta) Gamma(2-beta)] [Gamma(m-beta+2)/Gamma(m+3) - Gamma(m+n-beta+2)/Gamma(m+n+3)]
      const double lg = log_gamma(2.0 - beta);
      const double t1 = std::exp(log_gamma(p.m - beta + 2.0) - log_gamma(p.m + 3.0) - lg);
      const double t2 = std::exp(log_gamma(p.m + p.n - beta + 2.0) - log_gamma(p.m + p.n + 3.0) - lg);
      return 6.0 * beta / (1.0 + beta) * (t1 - t2);
    }
    case ClosedFormKind::porous_n1: {
      // beta Gamma(4) Gamma(2-beta+m) / [Gamma(4+m) Gamma(2-beta)]
      return beta * 6.0 *
             std::exp(log_gamma(2.0 - beta + p.m) - log_gamma(4.0 + p.m) - log_gamma(2.0 - beta));
    }
    case ClosedFormKind::allee:
      return beta * (2.0 - beta) / 120.0 *
             ((3.0 - beta) * (4.0 - beta + 6.0 * (p.alpha - p.a)) - 30.0 * p.alpha * p.a);
  }
  throw DomainError("closed_form_F: unknown kind");
}

enum class SelectionClass { pushed, pulled_candidate, degenerate_pushed };

inline const char* to_string(SelectionClass s) {
  switch (s) {
    case SelectionClass::pushed: return "pushed";
    case SelectionClass::pulled_candidate: return "pulled_candidate";
    case SelectionClass::degenerate_pushed: return "degenerate_pushed";
  }
  return "?";
}

struct CriterionResult {
  SelectionClass kind = SelectionClass::pulled_candidate;
  double integral = 0.0;   // int_0^1 [D R - D(0)R(0)]/u (1-u)^2 du
  double threshold = 0.0;  // D(0) R(0) / 6
};

/// Sufficient condition for nonlinear (pushed) speed selection, with
/// R(u) = f(u)/u and R(0) = f'(0):
///   int_0^1 [D(u)R(u) - D(0)R(0)]/u (1-u)^2 du > D(0)R(0)/6.
/// Degenerate case D(0)f'(0) = 0 with f >= 0 is always nonlinearly selected.
inline CriterionResult selection_criterion(const ScalarModel& model) {
  const double R0 = reaction_slope_at_zero(model);
  const double DR0 = model.D(0.0) * R0;
  CriterionResult out;
  out.threshold = DR0 / 6.0;

  bool nonnegative = true;
  for (int i = 0; i <= 1000; ++i) {
    if (model.f(i / 1000.0) < -1e-14) {
      nonnegative = false;
      break;
    }
  }

  auto integrand = [&](double u) {
    const double R = model.f(u) / u;
    return (model.D(u) * R - DR0) / u * (1.0 - u) * (1.0 - u);
  };
  // integrability: (D R - DR0)/u ~ u^(p-1) needs p > 0
  const double ua = 1e-6, ub = 1e-9;
  const double ia = std::abs(integrand(ua)) * ua, ib = std::abs(integrand(ub)) * ub;
  if (ia > 0.0 && ib > 0.0 && std::log(ia / ib) / std::log(ua / ub) < 1e-2) {
    throw DivergentIntegral("criterion integrand [D R - D(0) R(0)]/u is not integrable at u = 0");
  }
  auto r = quad::integrate(integrand, 0.0, 1.0, {1e-11, 1e-11, 4000});
  if (!std::isfinite(r.value) || r.error > 1e-9) {
    throw DivergentIntegral("criterion integral did not converge");
  }
  out.integral = r.value;

  if (std::abs(DR0) <= 1e-12 && nonnegative) {
    out.kind = SelectionClass::degenerate_pushed;
  } else if (out.integral > out.threshold) {
    out.kind = SelectionClass::pushed;
  } else {
    out.kind = SelectionClass::pulled_candidate;
  }
  return out;
}

/// Fisher-Stefan lower bound with test function phi(u) = exp(-kappa u):
///   c^2/2 >= [kappa - 2 + e^-kappa (2 + kappa)] / [kappa (2 - e^-kappa)].
/// The numerator is summed as a series for small kappa to avoid cancellation.
inline double fisher_stefan_bound(double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw DomainError("fisher_stefan_bound: kappa must be positive");
  }
  double numerator;
  if (kappa < 1.0) {
    // sum_{n>=3} (-1)^(n+1) (n-2) kappa^n / n!
    numerator = 0.0;
    double term = kappa * kappa * kappa / 6.0;  // kappa^n / n! at n = 3
    for (int n = 3; n < 60; ++n) {
      const double contrib = ((n % 2 == 1) ? 1.0 : -1.0) * (n - 2) * term;
      numerator += contrib;
      if (std::abs(contrib) < 1e-18 * std::abs(numerator)) break;
      term *= kappa / (n + 1);
    }
  } else {
    numerator = kappa - 2.0 + std::exp(-kappa) * (2.0 + kappa);
  }
  const double denominator = kappa * (2.0 - std::exp(-kappa));
  return std::sqrt(2.0 * numerator / denominator);
}

}  // namespace wavebound
