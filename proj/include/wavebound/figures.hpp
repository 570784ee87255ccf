#pragma once

// Parameter sweeps behind the five published figures. Each curve becomes one
// CSV table with bound, linear and simulated speeds side by side.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wavebound/io.hpp"
#include "wavebound/pde.hpp"
#include "wavebound/sweep.hpp"
#include "wavebound/twospecies.hpp"
#include "wavebound/varbound.hpp"

namespace wavebound {

struct FigureOptions {
  bool simulate = true;
  double dx = 0.1;  // motile-front simulations
  double T = 150.0;
  double stefan_dx = 0.05;
  double stefan_L = 100.0;
  double stefan_T = 400.0;
  unsigned threads = worker_count();
  std::map<std::string, std::vector<double>> grids;  // overrides, keyed by parameter name
};

struct FigureCurve {
  std::string file;  // suggested file name
  CsvTable table;
};

struct FigureOutput {
  int figure = 0;
  std::vector<FigureCurve> curves;
  std::vector<std::string> failures;  // "<point>: <message>"
};

/// Log-spaced grid including both end points.
inline std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, n == 1 ? 0.0 : double(i) / (n - 1));
  g.front() = lo;
  if (n > 1) g.back() = hi;
  return g;
}

inline std::vector<double> lin_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = n == 1 ? lo : std::round((lo + (hi - lo) * i / (n - 1)) * 1e12) / 1e12;
  return g;
}

/// Default sweep grids. The published figures do not state theirs.
inline std::map<std::string, std::vector<double>> default_grids(int figure) {
  switch (figure) {
    case 1: return {{"m", {1, 2, 3}}, {"n", {1, 2, 3}}};
    case 2:
      return {{"alpha", lin_grid(0.2, 2.0, 10)},
              {"a", lin_grid(0.0, 0.5, 6)},
              {"alpha_curves", {0.5, 1.0, 2.0}},
              {"a_curves", {0.0, 0.25, 0.5}}};
    case 3: return {{"kappa", log_grid(0.05, 50.0, 10)}};
    case 4: return {{"nu", {0.25, 0.5, 0.75}}, {"kappa", log_grid(0.1, 10.0, 5)}};
    case 5: return {{"K", {0.5, 2.0, 8.0}}, {"lambda", lin_grid(0.0, 0.9, 10)}};
    default: throw ValidationError("figure must be 1..5");
  }
}

/// Simulation window sized so a front moving at up to `speed_hint` stays
/// clear of the far boundary until T.
inline SimConfig sweep_sim_config(double speed_hint, double dx, double T) {
  SimConfig cfg;
  cfg.dx = dx;
  cfg.T = T;
  const double travel = (1.2 * speed_hint + 0.5) * T + 20.0;
  cfg.L = std::max({200.0, 200.0 * dx, travel / 0.85});
  cfg.L = std::ceil(cfg.L / dx) * dx;
  return cfg;
}

namespace detail {

inline std::string fmt_value(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

inline const std::vector<double>& grid(const std::map<std::string, std::vector<double>>& g, const std::string& k) {
  auto it = g.find(k);
  if (it == g.end() || it->second.empty()) throw ValidationError("sweep grid '" + k + "' is empty");
  return it->second;
}

struct ScalarRow {
  double c_lb = 0, c_linear = 0, beta_star = 0, c_sim = std::numeric_limits<double>::quiet_NaN();
  double fit_residual = std::numeric_limits<double>::quiet_NaN();
};

inline ScalarRow scalar_point(const std::string& preset_name, const ParamMap& p, const FigureOptions& opt) {
  const auto model = scalar_preset(preset_name, p);
  const auto b = sup_F(model);
  ScalarRow row{b.c_lb, b.c_linear, b.beta_star};
  if (opt.simulate) {
    const auto res = simulate_scalar(model, sweep_sim_config(std::max(b.c_lb, b.c_linear), opt.dx, opt.T));
    row.c_sim = res.fitted_speed;
    row.fit_residual = res.fit_residual;
  }
  return row;
}

struct TwoRow {
  double c_lb = 0, c_linear = 0, epsilon = 0, threshold = std::numeric_limits<double>::quiet_NaN();
  bool valid = true;
  double c_sim = std::numeric_limits<double>::quiet_NaN();
  double fit_residual = std::numeric_limits<double>::quiet_NaN();
};

inline TwoRow two_point(const std::string& preset_name, const ParamMap& p, const FigureOptions& opt) {
  const auto model = two_species_preset(preset_name, p);
  const auto s = solve_implicit_speed(model);
  if (!s.converged) throw ConvergenceError("implicit speed did not converge", s.c, s.c);
  const auto wc = weak_coupling_report(model, s);
  TwoRow row{s.c, s.c_linear, wc.epsilon};
  if (wc.threshold_ratio) row.threshold = *wc.threshold_ratio;
  row.valid = wc.valid;
  if (opt.simulate) {
    const auto res = simulate_two_species(model, sweep_sim_config(std::max(s.c, s.c_linear), opt.dx, opt.T));
    row.c_sim = res.fitted_speed;
    row.fit_residual = res.fit_residual;
  }
  return row;
}

struct Point {
  std::size_t curve = 0;
  double x = 0.0;
  ParamMap params;
  std::string label;
  std::string model;
};

template <class Row, class Eval, class ToCells>
void run_points(FigureOutput& out, const std::vector<Point>& points, const FigureOptions& opt, const Eval& eval,
                const ToCells& cells) {
  const auto results = parallel_sweep<Row>(points.size(), [&](std::size_t i) { return eval(points[i]); },
                                           opt.threads);
  // Deterministic row order: by curve, then by sweep coordinate.
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a].curve != points[b].curve) return points[a].curve < points[b].curve;
    return points[a].x < points[b].x;
  });
  for (std::size_t i : order) {
    const auto& r = results[i];
    if (!r.value) {
      out.failures.push_back(points[i].label + ": " + r.error);
      continue;
    }
    out.curves[points[i].curve].table.add_row(cells(points[i], *r.value));
  }
}

inline std::vector<std::string> scalar_header(const std::string& var) {
  return {var, "c_lb", "c_linear", "beta_star", "c_sim", "fit_residual"};
}

inline std::vector<double> scalar_cells(const Point& p, const ScalarRow& r) {
  return {p.x, r.c_lb, r.c_linear, r.beta_star, r.c_sim, r.fit_residual};
}

inline std::vector<std::string> two_header(const std::string& var) {
  return {var, "c_lb", "c_linear", "epsilon", "threshold_ratio", "valid", "c_sim", "fit_residual"};
}

inline std::vector<std::string> two_cells(const Point& p, const TwoRow& r) {
  return {csv_number(p.x),       csv_number(r.c_lb),      csv_number(r.c_linear),
          csv_number(r.epsilon), csv_number(r.threshold), r.valid ? "1" : "0",
          csv_number(r.c_sim),   csv_number(r.fit_residual)};
}

}  // namespace detail

/// Runs the sweep behind figure `n`. Failed points are reported in
/// `failures`; all other rows are still written.
inline FigureOutput run_figure(int n, const FigureOptions& opt = {}) {
  if (n < 1 || n > 5) throw ValidationError("figure must be 1..5");
  auto grids = default_grids(n);
  for (const auto& [k, v] : opt.grids) {
    if (!grids.count(k)) throw ValidationError("figure " + std::to_string(n) + " has no grid named '" + k + "'");
    grids[k] = v;
  }
  using detail::fmt_value;
  using detail::grid;
  using detail::Point;
  FigureOutput out;
  out.figure = n;
  std::vector<Point> points;

  if (n == 1) {
    // Every (m, n) pair is computed once and appears in two curves.
    const auto& ms = grid(grids, "m");
    const auto& ns = grid(grids, "n");
    for (double m : ms) out.curves.push_back({"fig1_vs_n_m" + fmt_value(m) + ".csv", CsvTable(detail::scalar_header("n"))});
    for (double nn : ns) out.curves.push_back({"fig1_vs_m_n" + fmt_value(nn) + ".csv", CsvTable(detail::scalar_header("m"))});
    std::vector<Point> pts;
    for (std::size_t i = 0; i < ms.size(); ++i)
      for (std::size_t j = 0; j < ns.size(); ++j)
        pts.push_back({i, ns[j], {{"m", ms[i]}, {"n", ns[j]}}, "m=" + fmt_value(ms[i]) + " n=" + fmt_value(ns[j]), ""});
    const auto results = parallel_sweep<detail::ScalarRow>(
        pts.size(), [&](std::size_t k) { return detail::scalar_point("porous_fisher", pts[k].params, opt); },
        opt.threads);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (!results[k].value) out.failures.push_back(pts[k].label + ": " + results[k].error);
    }
    for (std::size_t i = 0; i < ms.size(); ++i) {
      std::vector<std::size_t> idx;
      for (std::size_t j = 0; j < ns.size(); ++j) idx.push_back(i * ns.size() + j);
      std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return pts[a].x < pts[b].x; });
      for (auto k : idx)
        if (results[k].value) out.curves[i].table.add_row(detail::scalar_cells(pts[k], *results[k].value));
    }
    for (std::size_t j = 0; j < ns.size(); ++j) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < ms.size(); ++i) idx.push_back(i * ns.size() + j);
      std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return ms[a / ns.size()] < ms[b / ns.size()]; });
      for (auto k : idx) {
        if (!results[k].value) continue;
        Point p = pts[k];
        p.x = ms[k / ns.size()];
        out.curves[ms.size() + j].table.add_row(detail::scalar_cells(p, *results[k].value));
      }
    }
    return out;
  }

  if (n == 2) {
    const auto& alphas = grid(grids, "alpha");
    const auto& as = grid(grids, "a");
    const auto& a_curves = grid(grids, "a_curves");
    const auto& alpha_curves = grid(grids, "alpha_curves");
    for (double a : a_curves) {
      const std::size_t c = out.curves.size();
      out.curves.push_back({"fig2_vs_alpha_a" + fmt_value(a) + ".csv", CsvTable(detail::scalar_header("alpha"))});
      for (double al : alphas)
        points.push_back({c, al, {{"alpha", al}, {"a", a}}, "alpha=" + fmt_value(al) + " a=" + fmt_value(a), ""});
    }
    for (double al : alpha_curves) {
      const std::size_t c = out.curves.size();
      out.curves.push_back({"fig2_vs_a_alpha" + fmt_value(al) + ".csv", CsvTable(detail::scalar_header("a"))});
      for (double a : as)
        points.push_back({c, a, {{"alpha", al}, {"a", a}}, "alpha=" + fmt_value(al) + " a=" + fmt_value(a), ""});
    }
    detail::run_points<detail::ScalarRow>(
        out, points, opt, [&](const Point& p) { return detail::scalar_point("allee", p.params, opt); },
        detail::scalar_cells);
    return out;
  }

  if (n == 3) {
    out.curves.push_back({"fig3_fisher_stefan.csv",
                          CsvTable({"kappa", "c_lb", "c_small_kappa", "c_sim", "fit_residual"})});
    for (double k : grid(grids, "kappa")) points.push_back({0, k, {{"kappa", k}}, "kappa=" + fmt_value(k), ""});
    struct Row { double c_lb, c_sim, res; };
    detail::run_points<Row>(
        out, points, opt,
        [&](const Point& p) {
          const double k = p.x;
          Row r{fisher_stefan_bound(k), std::numeric_limits<double>::quiet_NaN(),
                std::numeric_limits<double>::quiet_NaN()};
          if (opt.simulate) {
            SimConfig cfg;
            cfg.L = opt.stefan_L;
            cfg.dx = opt.stefan_dx;
            cfg.T = opt.stefan_T;
            const auto s = simulate_fisher_stefan(k, cfg);
            r.c_sim = s.fitted_speed;
            r.res = s.fit_residual;
          }
          return r;
        },
        [](const Point& p, const Row& r) {
          return std::vector<double>{p.x, r.c_lb, p.x / std::sqrt(3.0), r.c_sim, r.res};
        });
    return out;
  }

  if (n == 4) {
    for (const std::string model : {"ecm_c", "ecm_b"}) {
      for (double nu : grid(grids, "nu")) {
        const std::size_t c = out.curves.size();
        out.curves.push_back({"fig4_" + model + "_nu" + fmt_value(nu) + ".csv", CsvTable(detail::two_header("kappa"))});
        for (double k : grid(grids, "kappa")) {
          points.push_back({c, k, {{"kappa", k}, {"nu", nu}},
                            model + " nu=" + fmt_value(nu) + " kappa=" + fmt_value(k), model});
        }
      }
    }
  } else {
    for (double K : grid(grids, "K")) {
      const std::size_t c = out.curves.size();
      out.curves.push_back({"fig5_landman_K" + fmt_value(K) + ".csv", CsvTable(detail::two_header("lambda"))});
      for (double lam : grid(grids, "lambda")) {
        points.push_back({c, lam, {{"lambda", lam}, {"K", K}},
                          "landman K=" + fmt_value(K) + " lambda=" + fmt_value(lam), "landman"});
      }
    }
  }
  detail::run_points<detail::TwoRow>(
      out, points, opt, [&](const Point& p) { return detail::two_point(p.model, p.params, opt); },
      detail::two_cells);
  return out;
}

}  // namespace wavebound
