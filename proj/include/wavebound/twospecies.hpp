#pragma once

// Leading-order variational approximation for weakly coupled two-species
// systems with degradation coupling g = -kappa u1 u2.
//
// Along the ansatz control v* = c u1 (1-u1) / (beta D) the degraded species
// obeys du2/du1 = -(kappa beta / c^2) u2 D(u1,u2) / (1-u1), and the speed
// satisfies c^2/2 >= sup_beta G(beta; c) with G = beta M(beta) / B(2-beta, 2+beta).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "wavebound/calculus.hpp"
#include "wavebound/error.hpp"
#include "wavebound/model.hpp"
#include "wavebound/ode.hpp"
#include "wavebound/quadrature.hpp"
#include "wavebound/specfun.hpp"
#include "wavebound/varbound.hpp"

namespace wavebound {

/// u2 as a function of u1 along the ansatz control, for fixed (beta, c).
///
/// Integrated in w = -ln(1 - u1) for y = ln u2, where the equation reads
/// dy/dw = -eta D(u1, u2), eta = kappa beta / c^2. Beyond u1 = 1 - 1e-8 the
/// solution is closed with the power-law tail u2 ~ (1 - u1)^(eta D(1,0)).
class U2Profile {
 public:
  static constexpr double kTailGap = 1e-8;

  U2Profile(const TwoSpeciesModel& model, double beta, double c)
      : nu_(model.nu()), eta_(model.kappa() * beta / (c * c)) {
    if (!(c > 0.0)) throw DomainError("u2 profile: c must be positive");
    if (!(beta > 0.0 && beta <= 2.0)) throw DomainError("u2 profile: beta must lie in (0, 2]");
    if (nu_ == 0.0 || eta_ == 0.0) {
      trivial_ = true;
      return;
    }
    w_end_ = -std::log(kTailGap);
    auto rhs = [&](double w, double y) {
      const double u1 = -std::expm1(-w);
      return -eta_ * model.D(u1, std::exp(y));
    };
    try {
      sol_ = ode::integrate(rhs, 0.0, std::log(nu_), w_end_, {1e-12, 1e-12, 1e-3, 0.05, 200000});
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(std::string("u2 profile: integrator cannot meet tolerance 1e-10: ") + e.what(),
                             0.0, 1.0);
    }
    tail_rate_ = eta_ * model.D(1.0, 0.0);
  }

  /// u2 at u1 in [0, 1].
  double operator()(double u1) const {
    if (trivial_) return nu_;
    if (u1 <= 0.0) return nu_;
    if (u1 >= 1.0) return 0.0;
    return std::exp(log_u2(-std::log1p(-u1)));
  }

  double nu() const noexcept { return nu_; }
  double eta() const noexcept { return eta_; }

 private:
  double log_u2(double w) const {
    if (w <= w_end_) return sol_(w);
    return sol_.y.back() - tail_rate_ * (w - w_end_);
  }

  double nu_, eta_;
  bool trivial_ = false;
  double w_end_ = 0.0, tail_rate_ = 0.0;
  ode::DenseSolution sol_;
};

/// Discretised two-species wave profile along the ansatz control.
struct WaveProfile2 {
  std::vector<double> u1_grid;
  std::vector<double> u2;
  std::vector<double> v_star;
  double beta = 0.0;
  double c = 0.0;
};

/// Ansatz control v* = c phi / (D phi') = c u1 (1 - u1) / (beta D(u1, u2)).
inline double v_star(const TwoSpeciesModel& model, double beta, double c, double u1, double u2) {
  const double d = model.D(u1, u2);
  if (!(d > 1e-14)) throw DomainError("v_star: degenerate diffusivity D(u1,u2) <= 1e-14");
  return c * u1 * (1.0 - u1) / (beta * d);
}

namespace detail {

/// Profile grid clustered at both ends: u1 = (1 - cos(pi s)) / 2.
inline std::vector<double> profile_grid(int intervals) {
  std::vector<double> g(intervals + 1);
  for (int i = 0; i <= intervals; ++i) {
    g[i] = 0.5 * (1.0 - std::cos(std::numbers::pi * i / intervals));
  }
  g.front() = 0.0;
  g.back() = 1.0;
  return g;
}

}  // namespace detail

/// Self-consistent u2(u1) for given (beta, c), tabulated on a clustered grid.
inline WaveProfile2 solve_u2_profile(const TwoSpeciesModel& model, double beta, double c, int intervals = 400) {
  if (!(beta > 0.0 && beta < 2.0)) throw DomainError("solve_u2_profile: beta must lie in (0, 2)");
  const U2Profile u2(model, beta, c);
  WaveProfile2 p;
  p.beta = beta;
  p.c = c;
  p.u1_grid = detail::profile_grid(intervals);
  p.u2.reserve(p.u1_grid.size());
  p.v_star.reserve(p.u1_grid.size());
  for (double x : p.u1_grid) {
    const double y = u2(x);
    p.u2.push_back(y);
    const double d = model.D(x, y);
    p.v_star.push_back(d > 1e-14 ? c * x * (1.0 - x) / (beta * d) : 0.0);
  }
  return p;
}

/// d f / d u1 at (0, nu).
inline double reaction_slope_u1(const TwoSpeciesModel& model) {
  const double nu = model.nu();
  return calc::derivative_right([&](double u1) { return model.f(u1, nu); }, 0.0);
}

/// M(beta) = int_0^1 D f ((1-u1)/u1)^beta du1 along u2(u1).
inline double M_of_beta(const TwoSpeciesModel& model, const U2Profile& u2, double beta,
                        quad::Tolerance tol = {1e-10, 1e-10, 4000}) {
  const double r0 = model.D(0.0, model.nu()) * reaction_slope_u1(model);
  auto g = [&](double u1) {
    const double y = u2(u1);
    return model.D(u1, y) * model.f(u1, y);
  };
  return detail::singular_moment(g, beta, r0, tol);
}

inline double M_of_beta(const TwoSpeciesModel& model, double beta, double c) {
  return M_of_beta(model, U2Profile(model, beta, c), beta);
}

/// Limit of G as beta -> 2: 2 D(0, nu) df/du1(0, nu).
inline double G_limit_beta2(const TwoSpeciesModel& model) {
  const double v = 2.0 * model.D(0.0, model.nu()) * reaction_slope_u1(model);
  return v == 0.0 ? 0.0 : v;
}

/// G(beta; c) = beta M(beta) / B(2-beta, 2+beta); beta = 2 returns the limit.
inline double G_of_beta(const TwoSpeciesModel& model, double beta, double c) {
  if (beta == 2.0) return G_limit_beta2(model);
  if (!(beta > 0.0 && beta < 2.0)) throw DomainError("G_of_beta: beta must lie in (0, 2]");
  return beta * M_of_beta(model, beta, c) / detail::beta_weight(beta);
}

/// Closed form of G for the reduced cell-differentiation model (D = 1,
/// f = u1(1 - u1 - lambda u2), nu = 1):
///   G = beta [1 - 6 lambda Gamma(1+beta+beta kappa/c^2) / (Gamma(3+beta kappa/c^2) Gamma(2+beta))].
inline double landman_G_closed(double lambda, double kappa, double c, double beta) {
  using specfun::log_gamma;
  const double e = beta * kappa / (c * c);
  return beta * (1.0 - 6.0 * lambda * std::exp(log_gamma(1.0 + beta + e) - log_gamma(3.0 + e) -
                                               log_gamma(2.0 + beta)));
}

/// Linear marginal speed 2 sqrt(max(0, D(0,nu) df/du1(0,nu))).
inline double linear_speed_two_species(const TwoSpeciesModel& model) {
  return 2.0 * std::sqrt(std::max(0.0, model.D(0.0, model.nu()) * reaction_slope_u1(model)));
}

struct SupG {
  double beta_star = 2.0;
  double G_star = 0.0;
  bool attained_at_boundary = true;
};

/// sup over beta of G(beta; c): 64-point grid, golden-section refinement,
/// compared with the beta -> 2 limit.
inline SupG sup_G(const TwoSpeciesModel& model, double c, SupOptions opt = {}) {
  auto G = [&](double b) { return G_of_beta(model, b, c); };
  const auto best = calc::grid_golden_max(G, opt.beta_min, opt.beta_max, opt.grid_points, opt.golden_tol);
  const double limit = G_limit_beta2(model);
  if (best.value > limit + opt.tie_tol) return {best.x, best.value, false};
  return {2.0, limit, true};
}

struct SpeedSolve {
  double c = 0.0;
  int iterations = 0;
  double residual = 0.0;
  double epsilon = 0.0;  // kappa nu / c
  bool converged = false;
  double beta_star = 2.0;
  double G_star = 0.0;
  double c_linear = 0.0;
  std::string method = "fixed_point";
};

struct ImplicitOptions {
  double tol = 1e-8;
  int max_iter = 200;
  double damping = 0.5;
};

/// Solves c^2 = 2 sup_beta G(beta; c) for c.
///
/// Fixed-point iteration c <- sqrt(2 sup G(c)) from c0 = max(c_linear, 0.2),
/// damped by 0.5 whenever successive updates alternate in sign. Falls back to
/// bisection on h(c) = c^2 - 2 sup G(c) over [c0, 4 c0] when the iteration
/// stalls.
inline SpeedSolve solve_implicit_speed(const TwoSpeciesModel& model, ImplicitOptions opt = {}) {
  SpeedSolve out;
  out.c_linear = linear_speed_two_species(model);
  const double c0 = std::max(out.c_linear, 0.2);
  auto update = [&](double c) { return std::sqrt(2.0 * std::max(0.0, sup_G(model, c).G_star)); };

  double c = c0;
  double prev_delta = 0.0;
  double lo = c0, hi = c0;
  for (int k = 0; k < opt.max_iter; ++k) {
    const double target = update(c);
    double delta = target - c;
    lo = std::min(c, target);
    hi = std::max(c, target);
    out.iterations = k + 1;
    if (std::abs(delta) < opt.tol) {
      c = target;
      out.converged = true;
      break;
    }
    if (k > 0 && (delta > 0.0) != (prev_delta > 0.0)) delta *= opt.damping;
    prev_delta = delta;
    c += delta;
  }

  if (!out.converged) {
    auto h = [&](double x) { return x * x - 2.0 * sup_G(model, x).G_star; };
    const double a = c0, b = 4.0 * c0;
    const double ha = h(a), hb = h(b);
    if (!((ha <= 0.0) && (hb >= 0.0))) {
      throw ConvergenceError("implicit speed: fixed point did not converge and h(c) has no sign change on [c0, 4 c0]",
                             lo, hi);
    }
    c = calc::bisect(h, a, b, opt.tol);
    out.method = "bisection";
    out.converged = true;
  }

  const auto s = sup_G(model, c);
  out.c = c;
  out.beta_star = s.beta_star;
  out.G_star = s.G_star;
  out.residual = std::abs(c * c - 2.0 * s.G_star);
  out.epsilon = model.kappa() * model.nu() / c;
  return out;
}

/// u2 * omega on a profile grid, with omega the co-state of the u2 constraint:
///   u2 omega (u1) = -int_{u1}^1 ( u2 [phi' D v^2 - c v phi] d2D + u2 d2(D f) phi ) dq,
/// evaluated along v = v*, phi = ((1-q)/q)^beta and phi' denoting -dphi/dq.
struct AdjointProduct {
  std::vector<double> u1_grid;
  std::vector<double> values;

  /// Piecewise-linear interpolation of u2 omega.
  double operator()(double u1) const {
    if (u1 <= u1_grid.front()) return values.front();
    if (u1 >= u1_grid.back()) return values.back();
    const auto it = std::upper_bound(u1_grid.begin(), u1_grid.end(), u1);
    const std::size_t i = static_cast<std::size_t>(it - u1_grid.begin()) - 1;
    const double s = (u1 - u1_grid[i]) / (u1_grid[i + 1] - u1_grid[i]);
    return (1.0 - s) * values[i] + s * values[i + 1];
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
};

inline AdjointProduct adjoint_product(const TwoSpeciesModel& model, double beta, double c,
                                      const WaveProfile2& profile) {
  AdjointProduct out;
  out.u1_grid = profile.u1_grid;
  out.values.assign(profile.u1_grid.size(), 0.0);
  const double nu = model.nu();
  if (nu == 0.0) return out;

  const U2Profile u2(model, beta, c);
  const double h = 1e-6;
  auto d2 = [&](auto&& fn, double u1, double y) {
    const double hi_pt = std::min(y + h, nu);
    const double lo_pt = std::max(hi_pt - 2.0 * h, 0.0);
    if (hi_pt <= lo_pt) return 0.0;
    return (fn(u1, hi_pt) - fn(u1, lo_pt)) / (hi_pt - lo_pt);
  };
  auto integrand = [&](double q) {
    if (q <= 0.0 || q >= 1.0) return 0.0;
    const double y = u2(q);
    const double phi = std::pow((1.0 - q) / q, beta);
    const double dphi = beta * phi / (q * (1.0 - q));
    const double D = model.D(q, y);
    const double v = D > 1e-14 ? c * phi / (D * dphi) : 0.0;
    const double dD = d2([&](double a, double b) { return model.D(a, b); }, q, y);
    const double dDf = d2([&](double a, double b) { return model.D(a, b) * model.f(a, b); }, q, y);
    return y * (dphi * D * v * v - c * v * phi) * dD + y * dDf * phi;
  };

  const auto& g = profile.u1_grid;
  const std::size_t n = g.size();
  std::vector<double> piece(n - 1, 0.0);
  const quad::Tolerance tol{1e-13, 1e-10, 2000};
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const auto r = quad::integrate(integrand, g[i], g[i + 1], tol);
    if (!std::isfinite(r.value)) throw DivergentIntegral("adjoint integral is not finite");
    piece[i] = r.value;
  }
  // Near q = 0 the integrand behaves like A q^(1-beta). For beta close to 2
  // most of that mass sits below the smallest double, so the leading term is
  // integrated analytically and only the remainder numerically.
  const double qa = 1e-10, qb = 1e-12;
  const double A = integrand(qa) * std::pow(qa, beta - 1.0);
  const double Ab = integrand(qb) * std::pow(qb, beta - 1.0);
  quad::Result first;
  if (std::isfinite(A) && std::abs(A - Ab) <= 1e-6 * std::max(1.0, std::abs(A))) {
    // The remainder is O(q^(2-beta)); below 1e-100 its contribution is nil
    // while phi itself would overflow.
    auto remainder = [&](double q) { return q < 1e-100 ? 0.0 : integrand(q) - A * std::pow(q, 1.0 - beta); };
    first = quad::integrate_left_singular(remainder, 0.0, g[1], 2, tol);
    first.value += A * std::pow(g[1], 2.0 - beta) / (2.0 - beta);
  } else {
    first = quad::integrate_left_singular(integrand, 0.0, g[1], 4, tol);
  }
  if (!std::isfinite(first.value)) throw DivergentIntegral("adjoint integral is not finite");
  piece[0] = first.value;
  double acc = 0.0;
  out.values[n - 1] = 0.0;
  for (std::size_t i = n - 1; i-- > 0;) {
    acc += piece[i];
    out.values[i] = -acc;
  }
  return out;
}

/// Size of the adjoint term in the stationarity cubic
///   -phi' D^2 v^3 + c D phi v^2 + (kappa/c) omega u1 u2 = 0
/// at v = v*, where the first two terms cancel exactly:
///   max |(kappa/c) (u2 omega) u1| / max |c D phi v*^2|.
inline double pontryagin_residual(const TwoSpeciesModel& model, double beta, double c,
                                  const WaveProfile2& profile, const AdjointProduct& adjoint) {
  if (model.kappa() == 0.0 || model.nu() == 0.0) return 0.0;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < profile.u1_grid.size(); ++i) {
    const double u1 = profile.u1_grid[i];
    num = std::max(num, std::abs(model.kappa() / c * adjoint.values[i] * u1));
    if (u1 > 0.0 && u1 < 1.0) {
      const double phi = std::pow((1.0 - u1) / u1, beta);
      const double v = profile.v_star[i];
      den = std::max(den, std::abs(c * model.D(u1, profile.u2[i]) * phi * v * v));
    }
  }
  return den > 0.0 ? num / den : 0.0;
}

inline double pontryagin_residual(const TwoSpeciesModel& model, double beta, double c,
                                  const WaveProfile2& profile) {
  return pontryagin_residual(model, beta, c, profile, adjoint_product(model, beta, c, profile));
}

struct WeakCouplingReport {
  double epsilon = 0.0;                  // kappa nu / c
  std::optional<double> threshold_ratio;  // lambda kappa / c (cell-differentiation model only)
  bool valid = true;
};

inline WeakCouplingReport weak_coupling_report(const TwoSpeciesModel& model, const SpeedSolve& solve) {
  WeakCouplingReport r;
  r.epsilon = model.kappa() * model.nu() / solve.c;
  r.valid = r.epsilon < 1.0;
  if (auto it = model.params().find("lambda"); it != model.params().end()) {
    r.threshold_ratio = it->second * model.kappa() / solve.c;
    r.valid = r.valid && *r.threshold_ratio < 1.0;
  }
  return r;
}

}  // namespace wavebound
