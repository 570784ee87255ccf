#pragma once

// Explicit finite-difference simulators that measure wave speeds
// independently of the variational bounds.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wavebound/error.hpp"
#include "wavebound/model.hpp"

namespace wavebound {

enum class InitialCondition { step, smoothed_step };

struct SimConfig {
  double L = 400.0;
  double dx = 0.1;
  std::optional<double> dt;  // auto: cfl dx^2 / max D
  double cfl = 0.2;
  double T = 150.0;
  std::vector<double> snapshot_times;
  InitialCondition ic = InitialCondition::step;
  double ic_width = 1.0;  // smoothed_step only
  double level = 0.1;
  int samples = 400;  // front samples over [0, T]
  bool track_front = true;  // off for runs without a front (e.g. uniform states)

  void validate() const {
    if (!(dx > 0.0)) throw ConfigError("dx must be positive");
    if (!(L > 0.0)) throw ConfigError("L must be positive");
    if (!(T > 0.0)) throw ConfigError("T must be positive");
    if (dt && !(*dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(cfl > 0.0 && cfl <= 0.5)) throw ConfigError("cfl must lie in (0, 0.5]");
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("level must lie in (0, 1)");
    if (L / dx < 200.0) throw ConfigError("grid too coarse: fewer than 200 cells");
    if (samples < 100) throw ConfigError("need at least 100 front samples");
  }
};

struct Snapshot {
  double t = 0.0;
  std::vector<std::vector<double>> species;  // one profile per species
};

struct SimResult {
  std::vector<double> x_grid;
  std::vector<Snapshot> snapshots;
  std::vector<std::pair<double, double>> front_series;  // (t, X(t))
  double fitted_speed = 0.0;
  double fit_residual = 0.0;
  double stability_report = 0.0;  // max dt * D / dx^2 observed
  double dt = 0.0;
  double t_end = 0.0;  // may stop early if the front nears the far boundary
  double min_density = 0.0;
  double max_density = 0.0;
  bool secondary_monotone = true;  // rho2 never increased at any grid point
  std::vector<std::string> warnings;
};

/// Position where `profile` crosses `level` going right, by linear
/// interpolation between grid points. Throws FrontTrackingError when the
/// profile never crosses or crosses more than once.
inline double front_position(const std::vector<double>& x, const std::vector<double>& profile, double level) {
  std::optional<double> found;
  for (std::size_t i = 0; i + 1 < profile.size(); ++i) {
    const bool above = profile[i] >= level, next_above = profile[i + 1] >= level;
    if (above == next_above) continue;
    if (!above) throw FrontTrackingError("profile crosses the level upward (non-monotone front)");
    if (found) throw FrontTrackingError("profile crosses the level more than once");
    const double w = (profile[i] - level) / (profile[i] - profile[i + 1]);
    found = x[i] + w * (x[i + 1] - x[i]);
  }
  if (!found) throw FrontTrackingError("profile never crosses the tracking level");
  return *found;
}

struct SpeedFit {
  double speed = 0.0;
  double residual = 0.0;  // RMS deviation of X(t) from the fitted line
  int points = 0;
};

/// Least-squares slope of X(t) over t in [t_from, t_to].
inline SpeedFit fit_speed(const std::vector<std::pair<double, double>>& series, double t_from, double t_to) {
  double st = 0, sx = 0, stt = 0, stx = 0;
  int n = 0;
  for (const auto& [t, X] : series) {
    if (t < t_from || t > t_to) continue;
    st += t;
    sx += X;
    stt += t * t;
    stx += t * X;
    ++n;
  }
  if (n < 2) throw FrontTrackingError("too few front samples in the fit window");
  const double tbar = st / n, xbar = sx / n;
  const double var = stt / n - tbar * tbar;
  if (!(var > 0.0)) throw FrontTrackingError("degenerate fit window");
  SpeedFit fit;
  fit.speed = (stx / n - tbar * xbar) / var;
  fit.points = n;
  double ss = 0.0;
  for (const auto& [t, X] : series) {
    if (t < t_from || t > t_to) continue;
    const double r = X - (xbar + fit.speed * (t - tbar));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

/// Level-set speed estimate from sampled profiles: X(t) at each sample, then
/// the least-squares slope over [T/2, T].
inline std::pair<std::vector<std::pair<double, double>>, SpeedFit> estimate_speed(
    const std::vector<double>& x, const std::vector<std::pair<double, std::vector<double>>>& samples,
    double level) {
  std::vector<std::pair<double, double>> series;
  series.reserve(samples.size());
  for (const auto& [t, prof] : samples) series.emplace_back(t, front_position(x, prof, level));
  if (series.empty()) throw FrontTrackingError("no samples");
  const double T = series.back().first;
  auto fit = fit_speed(series, 0.5 * T, T);
  return {std::move(series), fit};
}

namespace detail {

inline std::vector<double> initial_step(const SimConfig& cfg, const std::vector<double>& x) {
  std::vector<double> rho(x.size());
  const double x0 = cfg.L / 10.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (cfg.ic == InitialCondition::step) {
      rho[i] = x[i] <= x0 ? 1.0 : 0.0;
    } else {
      rho[i] = 0.5 * (1.0 - std::tanh((x[i] - x0) / cfg.ic_width));
    }
  }
  return rho;
}

/// Shared method-of-lines driver for the motile species. `Dcell(i)` and
/// `react(i)` read the current state; `post_step(dt)` advances any
/// pointwise species.
struct Stepper {
  const SimConfig& cfg;
  std::vector<double> x;
  std::size_t n;
  double dt;

  Stepper(const SimConfig& c, double max_D) : cfg(c) {
    cfg.validate();
    n = static_cast<std::size_t>(std::llround(cfg.L / cfg.dx));
    x.resize(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = (static_cast<double>(i) + 0.5) * cfg.dx;
    dt = cfg.dt ? *cfg.dt : std::min(cfg.cfl * cfg.dx * cfg.dx / std::max(1e-12, max_D), 0.05);
  }
};

}  // namespace detail

namespace detail {

// Core loop shared by the scalar and two-species simulators.
template <class DiffFn, class ReactFn, class Post>
SimResult run_motile(const SimConfig& cfg, double max_D, std::vector<double> rho,
                     std::vector<double>* rho2, bool exact_zero_ahead, const DiffFn& diff, const ReactFn& react,
                     const Post& post_step) {
  Stepper st(cfg, max_D);
  const std::size_t n = st.n;
  if (rho.empty()) rho = initial_step(cfg, st.x);
  if (rho2 && rho2->size() != n) throw ConfigError("secondary species size mismatch");
  SimResult res;
  res.x_grid = st.x;
  res.dt = st.dt;
  const double dt = st.dt, inv_dx2 = 1.0 / (cfg.dx * cfg.dx);
  const double x_guard = cfg.L - 10.0 * cfg.dx;
  constexpr double kTiny = std::numeric_limits<double>::min();

  std::vector<double> Dc(n), flux(n + 1, 0.0), next(n);
  std::vector<double> snaps = cfg.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  std::size_t next_snap = 0;
  const double sample_dt = cfg.T / cfg.samples;
  double next_sample = 0.0;
  res.min_density = *std::min_element(rho.begin(), rho.end());
  res.max_density = *std::max_element(rho.begin(), rho.end());

  auto record_snapshot = [&](double t) {
    Snapshot s;
    s.t = t;
    s.species.push_back(rho);
    if (rho2) s.species.push_back(*rho2);
    res.snapshots.push_back(std::move(s));
  };

  // last index holding a non-zero density; cells beyond stay exactly zero when
  // f(0) == 0 and D-weighted fluxes between zero cells vanish
  auto last_nonzero = [&] {
    for (std::size_t i = n; i-- > 0;) {
      if (rho[i] != 0.0) return i;
    }
    return std::size_t{0};
  };
  std::size_t hi = exact_zero_ahead ? last_nonzero() : n - 1;

  double t = 0.0;
  const long long total_steps = static_cast<long long>(std::ceil(cfg.T / dt - 1e-9));
  bool stopped = false;
  std::optional<std::string> front_error;
  for (long long step = 0; step <= total_steps; ++step) {
    // sampling at the start of the step (state at time t)
    while (next_snap < snaps.size() && snaps[next_snap] <= t + 0.5 * dt) {
      record_snapshot(t);
      ++next_snap;
    }
    if (cfg.track_front && !front_error && t >= next_sample - 0.5 * dt) {
      // A failed crossing is reported after the run, so that a blow-up that
      // first shows as a non-monotone profile surfaces as instability.
      std::optional<double> X;
      try {
        X = front_position(st.x, rho, cfg.level);
      } catch (const FrontTrackingError& e) {
        front_error = std::string(e.what()) + " at t = " + std::to_string(t);
      }
      if (X && *X >= x_guard) {
        res.warnings.push_back("front reached the far-field guard at t = " + std::to_string(t) +
                               "; fit uses the run up to this time");
        stopped = true;
        break;
      }
      if (X) res.front_series.emplace_back(t, *X);
      next_sample += sample_dt;
    }
    if (step == total_steps) break;

    const std::size_t top = exact_zero_ahead ? std::min(n - 1, hi + 1) : n - 1;
    double maxD = 0.0;
    for (std::size_t i = 0; i <= top; ++i) {
      Dc[i] = diff(i, rho);
      maxD = std::max(maxD, Dc[i]);
    }
    if (top + 1 < n) Dc[top + 1] = diff(top + 1, rho);
    res.stability_report = std::max(res.stability_report, dt * maxD * inv_dx2);
    for (std::size_t i = 1; i <= top; ++i) {
      flux[i] = 0.5 * (Dc[i - 1] + Dc[i]) * (rho[i] - rho[i - 1]);
    }
    flux[0] = 0.0;
    flux[top + 1] = (top + 1 < n) ? 0.5 * (Dc[top] + Dc[top + 1]) * (rho[top + 1] - rho[top]) : 0.0;
    for (std::size_t i = 0; i <= top; ++i) {
      next[i] = rho[i] + dt * ((flux[i + 1] - flux[i]) * inv_dx2 + react(i, rho));
    }
    post_step(dt, rho, top);
    double lo_v = res.min_density, hi_v = res.max_density;
    for (std::size_t i = 0; i <= top; ++i) {
      // subnormal tails cost ~100x per operation and carry no information
      rho[i] = std::abs(next[i]) < kTiny ? 0.0 : next[i];
      lo_v = std::min(lo_v, rho[i]);
      hi_v = std::max(hi_v, rho[i]);
    }
    res.min_density = lo_v;
    res.max_density = hi_v;
    if (!(hi_v <= 10.0) || !(lo_v >= -10.0)) {
      throw InstabilityError("density left [-10, 10] at t = " + std::to_string(t + dt) +
                             " (time step too large for the diffusivity?)");
    }
    if (exact_zero_ahead) {
      while (hi + 1 < n && rho[hi + 1] != 0.0) ++hi;
    }
    t = (step + 1) * dt;
  }
  res.t_end = t;
  while (next_snap < snaps.size()) {
    record_snapshot(t);
    ++next_snap;
  }
  if (!cfg.track_front) return res;
  if (front_error) throw FrontTrackingError(*front_error);
  const auto fit = fit_speed(res.front_series, 0.5 * res.t_end, res.t_end);
  res.fitted_speed = fit.speed;
  res.fit_residual = fit.residual;
  if (stopped && fit.points < 50) {
    res.warnings.push_back("fewer than 50 samples in the fit window");
  }
  return res;
}

}  // namespace detail

/// rho_t = (D(rho) rho_x)_x + f(rho) on [0, L], zero-flux ends, step initial
/// data at L/10, explicit Euler with dt = cfl dx^2 / max D.
inline SimResult simulate_scalar(const ScalarModel& model, const SimConfig& cfg,
                                 std::vector<double> initial = {}) {
  double max_D = 0.0;
  for (int i = 0; i <= 1000; ++i) max_D = std::max(max_D, model.D(i / 1000.0));
  const bool exact_zero = model.f(0.0) == 0.0;
  auto diff = [&](std::size_t i, const std::vector<double>& r) { return model.D(r[i]); };
  auto react = [&](std::size_t i, const std::vector<double>& r) { return model.f(r[i]); };
  auto post = [](double, const std::vector<double>&, std::size_t) {};
  return detail::run_motile(cfg, max_D, std::move(initial), nullptr, exact_zero, diff, react, post);
}

/// Two-species degradation system; rho2 starts at nu everywhere and decays by
/// -kappa rho1 rho2. Front tracked on rho1.
inline SimResult simulate_two_species(const TwoSpeciesModel& model, const SimConfig& cfg) {
  double max_D = 0.0;
  for (int i = 0; i <= 100; ++i) {
    for (int j = 0; j <= 100; ++j) max_D = std::max(max_D, model.D(i / 100.0, model.nu() * j / 100.0));
  }
  const std::size_t n = static_cast<std::size_t>(std::llround(cfg.L / cfg.dx));
  std::vector<double> rho2(n, model.nu());
  const bool exact_zero = model.f(0.0, model.nu()) == 0.0;
  auto diff = [&](std::size_t i, const std::vector<double>& r) { return model.D(r[i], rho2[i]); };
  auto react = [&](std::size_t i, const std::vector<double>& r) { return model.f(r[i], rho2[i]); };
  bool monotone = true;
  const double kappa = model.kappa();
  auto post = [&](double dt, const std::vector<double>& r, std::size_t top) {
    for (std::size_t i = 0; i <= top; ++i) {
      const double updated = rho2[i] - dt * kappa * r[i] * rho2[i];
      if (updated > rho2[i]) monotone = false;
      rho2[i] = updated;
    }
  };
  auto res = detail::run_motile(cfg, max_D, {}, &rho2, exact_zero, diff, react, post);
  res.secondary_monotone = monotone;
  return res;
}

/// Fisher-Stefan moving-boundary problem in the co-moving coordinate
/// y = x - s(t) on [-L, 0]:
///   rho_t = rho_yy + s' rho_y + rho (1 - rho),  rho(-L) = 1,  rho(0) = 0,
///   s' = -kappa rho_y(0)  (one-sided second-order difference).
/// Initial data 1 - exp(y / l) with l = max(1, kappa / 2), which keeps the
/// initial boundary speed at most 2. front_series holds (t, s(t)).
inline SimResult simulate_fisher_stefan(double kappa, const SimConfig& cfg) {
  if (!(kappa > 0.0)) throw DomainError("simulate_fisher_stefan: kappa must be positive");
  cfg.validate();
  const std::size_t n = static_cast<std::size_t>(std::llround(cfg.L / cfg.dx));
  const double dx = cfg.L / static_cast<double>(n);
  const double dt = cfg.dt ? *cfg.dt : cfg.cfl * dx * dx;
  SimResult res;
  res.dt = dt;
  res.x_grid.resize(n + 1);
  std::vector<double> rho(n + 1), next(n + 1);
  const double ell = std::max(1.0, 0.5 * kappa);
  for (std::size_t j = 0; j <= n; ++j) {
    const double y = -cfg.L + static_cast<double>(j) * dx;
    res.x_grid[j] = y;
    rho[j] = -std::expm1(y / ell);
  }
  rho[0] = 1.0;
  rho[n] = 0.0;
  res.min_density = 0.0;
  res.max_density = 1.0;

  std::vector<double> snaps = cfg.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  std::size_t next_snap = 0;
  const double sample_dt = cfg.T / cfg.samples;
  double next_sample = 0.0;
  const double inv_dx2 = 1.0 / (dx * dx), inv_2dx = 0.5 / dx;
  double s = 0.0, t = 0.0;
  const long long total_steps = static_cast<long long>(std::ceil(cfg.T / dt - 1e-9));
  res.stability_report = dt * inv_dx2;
  for (long long step = 0; step <= total_steps; ++step) {
    const double sdot = -kappa * (-4.0 * rho[n - 1] + rho[n - 2]) * inv_2dx;
    while (next_snap < snaps.size() && snaps[next_snap] <= t + 0.5 * dt) {
      res.snapshots.push_back({t, {rho}});
      ++next_snap;
    }
    if (t >= next_sample - 0.5 * dt) {
      res.front_series.emplace_back(t, s);
      next_sample += sample_dt;
    }
    if (step == total_steps) break;
    double lo_v = res.min_density, hi_v = res.max_density;
    for (std::size_t j = 1; j < n; ++j) {
      const double lap = (rho[j + 1] - 2.0 * rho[j] + rho[j - 1]) * inv_dx2;
      const double adv = sdot * (rho[j + 1] - rho[j - 1]) * inv_2dx;
      next[j] = rho[j] + dt * (lap + adv + rho[j] * (1.0 - rho[j]));
      lo_v = std::min(lo_v, next[j]);
      hi_v = std::max(hi_v, next[j]);
    }
    if (!(hi_v <= 10.0) || !(lo_v >= -10.0)) {
      throw InstabilityError("Fisher-Stefan density left [-10, 10] at t = " + std::to_string(t + dt));
    }
    for (std::size_t j = 1; j < n; ++j) rho[j] = next[j];
    res.min_density = lo_v;
    res.max_density = hi_v;
    s += dt * sdot;
    t = (step + 1) * dt;
  }
  res.t_end = t;
  while (next_snap < snaps.size()) {
    res.snapshots.push_back({t, {rho}});
    ++next_snap;
  }
  const auto fit = fit_speed(res.front_series, 0.5 * t, t);
  res.fitted_speed = fit.speed;
  res.fit_residual = fit.residual;
  const double a = fit_speed(res.front_series, 0.5 * t, 0.75 * t).speed;
  const double b = fit_speed(res.front_series, 0.75 * t, t).speed;
  if (std::abs(a - b) > 0.01 * std::abs(b)) {
    res.warnings.push_back("boundary speed has not plateaued (relative drift " +
                           std::to_string(std::abs(a - b) / std::abs(b)) + " over the last quarter)");
  }
  return res;
}

}  // namespace wavebound
