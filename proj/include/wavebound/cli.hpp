#pragma once

// Command-line front end. Kept in the library so tests can drive it in
// process; tools/wavebound.cpp only forwards argv.
//
// Exit codes:
//   0 success
//   1 unexpected error
//   2 validation failure (bad model, bad flags, bad config)
//   3 non-convergence or divergent integral
//   4 numerical instability in a simulation
//   5 front-tracking failure
//   6 figure sweep finished with failed points

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wavebound/figures.hpp"
#include "wavebound/io.hpp"
#include "wavebound/model.hpp"
#include "wavebound/pde.hpp"
#include "wavebound/twospecies.hpp"
#include "wavebound/varbound.hpp"

namespace wavebound::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kUnexpected = 1,
  kValidation = 2,
  kNonConvergence = 3,
  kInstability = 4,
  kFrontTracking = 5,
  kPartialFigure = 6,
};

/// Parses "k=v" into a parameter entry.
inline std::pair<std::string, double> parse_param(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) throw ValidationError("--param expects k=v, got '" + kv + "'");
  const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
  char* end = nullptr;
  const double x = std::strtod(value.c_str(), &end);
  if (value.empty() || *end != '\0') throw ValidationError("--param " + key + ": '" + value + "' is not a number");
  return {key, x};
}

/// Parses "name=v1,v2,..." for sweep grid overrides.
inline std::pair<std::string, std::vector<double>> parse_grid(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0) throw ValidationError("--grid expects name=v1,v2,...");
  std::vector<double> values;
  std::stringstream ss(arg.substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(parse_param("x=" + item).second);
  if (values.empty()) throw ValidationError("--grid " + arg.substr(0, eq) + ": no values");
  return {arg.substr(0, eq), values};
}

struct ModelFlags {
  std::string preset;
  std::string D, f;
  std::string file;
  std::vector<std::string> params;
  std::optional<double> kappa, nu;

  void attach(CLI::App* app, bool with_coupling) {
    app->add_option("--preset", preset, "named model (" + join(preset_names()) + ")");
    app->add_option("--D", D, "diffusivity expression");
    app->add_option("--f", f, "reaction expression");
    app->add_option("--model", file, "model file with key = value lines");
    app->add_option("--param", params, "model parameter k=v (repeatable)");
    if (with_coupling) {
      app->add_option("--kappa", kappa, "coupling rate for inline two-species models");
      app->add_option("--nu", nu, "far-field level of the second species for inline models");
    }
  }

  ParamMap param_map() const {
    ParamMap out;
    for (const auto& kv : params) out.insert(parse_param(kv));
    return out;
  }

  AnyModel build(bool two_species) const {
    const int sources = !preset.empty() + !file.empty() + (!D.empty() || !f.empty());
    if (sources != 1) throw ValidationError("give exactly one of --preset, --model or --D/--f");
    if (!preset.empty()) return wavebound::preset(preset, param_map());
    if (!file.empty()) {
      auto mf = parse_model_text(read_file(file));
      for (const auto& [k, v] : param_map()) mf.params[k] = v;
      return model_from_file(mf);
    }
    if (D.empty() || f.empty()) throw ValidationError("inline models need both --D and --f");
    if (two_species) {
      return TwoSpeciesModel(parse_expr(D), parse_expr(f), kappa.value_or(0.0), nu.value_or(0.0), param_map());
    }
    return ScalarModel(parse_expr(D), parse_expr(f), param_map());
  }

  ScalarModel scalar() const {
    auto m = build(false);
    if (auto* s = std::get_if<ScalarModel>(&m)) return *s;
    throw ValidationError("this command needs a single-species model");
  }

  TwoSpeciesModel two() const {
    auto m = build(true);
    if (auto* t = std::get_if<TwoSpeciesModel>(&m)) return *t;
    throw ValidationError("this command needs a two-species model");
  }

  json to_json() const {
    json j;
    if (!preset.empty()) j["preset"] = preset;
    if (!D.empty()) j["D"] = D;
    if (!f.empty()) j["f"] = f;
    if (!file.empty()) j["model_file"] = file;
    json p = json::object();
    for (const auto& [k, v] : param_map()) p[k] = v;
    j["params"] = p;
    if (kappa) j["kappa"] = *kappa;
    if (nu) j["nu"] = *nu;
    return j;
  }

  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
    return out;
  }

  static std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open model file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
};

struct SimFlags {
  double L = 400.0, dx = 0.1, T = 150.0, level = 0.1;
  std::optional<double> dt;
  double cfl = 0.2;
  std::vector<double> snapshots;
  int samples = 400;
  std::optional<double> ic_width;

  void attach(CLI::App* app) {
    app->add_option("--L", L, "domain length")->capture_default_str();
    app->add_option("--dx", dx, "grid spacing")->capture_default_str();
    app->add_option("--dt", dt, "time step (default: cfl dx^2 / max D)");
    app->add_option("--cfl", cfl, "diffusive CFL factor for the automatic step")->capture_default_str();
    app->add_option("--T", T, "final time")->capture_default_str();
    app->add_option("--level", level, "front-tracking level")->capture_default_str();
    app->add_option("--snapshots", snapshots, "profile snapshot times")->delimiter(',');
    app->add_option("--samples", samples, "front samples over [0, T]")->capture_default_str();
    app->add_option("--smooth", ic_width, "smooth the initial step over this width");
  }

  SimConfig config() const {
    SimConfig c;
    c.L = L;
    c.dx = dx;
    c.dt = dt;
    c.cfl = cfl;
    c.T = T;
    c.level = level;
    c.snapshot_times = snapshots.empty() ? std::vector<double>{T} : snapshots;
    c.samples = samples;
    if (ic_width) {
      c.ic = InitialCondition::smoothed_step;
      c.ic_width = *ic_width;
    }
    return c;
  }
};

/// Record of one invocation, written next to the outputs.
struct RunManifest {
  std::vector<std::string> command_line;
  std::string command;
  json config = json::object();
  std::vector<std::string> outputs;
  double wall_seconds = 0.0;
  int exit_code = 0;
  std::string error;

  json to_json() const {
    json j{{"tool", "wavebound"}, {"version", kVersion}, {"command_line", command_line}, {"command", command}};
    j["config"] = config;
    j["outputs"] = outputs;
    j["wall_clock_seconds"] = wall_seconds;
    j["exit_code"] = exit_code;
    if (!error.empty()) j["error"] = error;
    return j;
  }
};

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const SyntaxError*>(&e) ||
      dynamic_cast<const DomainError*>(&e) || dynamic_cast<const ConfigError*>(&e)) {
    return kValidation;
  }
  if (dynamic_cast<const ConvergenceError*>(&e) || dynamic_cast<const DivergentIntegral*>(&e)) {
    return kNonConvergence;
  }
  if (dynamic_cast<const InstabilityError*>(&e)) return kInstability;
  if (dynamic_cast<const FrontTrackingError*>(&e)) return kFrontTracking;
  return kUnexpected;
}

inline std::string describe(const std::exception& e) {
  std::string msg = e.what();
  if (auto* c = dynamic_cast<const ConvergenceError*>(&e)) {
    std::ostringstream os;
    os.precision(12);
    os << " (last bracket [" << c->lo() << ", " << c->hi() << "])";
    msg += os.str();
  }
  return msg;
}

/// Runs one command line. Output JSON/text goes to `out`, diagnostics to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  const auto t0 = std::chrono::steady_clock::now();
  CLI::App app{"wavebound: variational lower bounds and simulated speeds for travelling waves"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  std::string out_dir = "wavebound_out";
  app.add_option("--out", out_dir, "directory for outputs and the run manifest")->capture_default_str();

  ModelFlags model_flags;
  SimFlags sim_flags;

  auto* bound = app.add_subcommand("bound", "compute a lower bound on the wave speed");
  bound->require_subcommand(1);
  auto* bound_scalar = bound->add_subcommand("scalar", "single-species bound sup F(beta)");
  auto* bound_two = bound->add_subcommand("two-species", "implicit speed from the coupled principle");
  auto* bound_stefan = bound->add_subcommand("fisher-stefan", "closed-form Fisher-Stefan bound");
  model_flags.attach(bound_scalar, false);
  model_flags.attach(bound_two, true);
  double stefan_kappa = 0.0;
  bound_stefan->add_option("--kappa", stefan_kappa, "Stefan coefficient")->required();

  auto* simulate = app.add_subcommand("simulate", "run a finite-difference simulation");
  simulate->require_subcommand(1);
  auto* sim_scalar = simulate->add_subcommand("scalar", "single-species model");
  auto* sim_two = simulate->add_subcommand("two-species", "degradation system");
  auto* sim_stefan = simulate->add_subcommand("stefan", "Fisher-Stefan moving boundary");
  model_flags.attach(sim_scalar, false);
  model_flags.attach(sim_two, true);
  for (auto* s : {sim_scalar, sim_two, sim_stefan}) sim_flags.attach(s);
  double sim_kappa = 0.0;
  sim_stefan->add_option("--kappa", sim_kappa, "Stefan coefficient")->required();

  auto* figure = app.add_subcommand("figure", "run the sweep behind one figure (1..5)");
  int figure_n = 0;
  FigureOptions fig_opt;
  bool no_sim = false;
  std::vector<std::string> grid_overrides;
  std::optional<unsigned> threads;
  figure->add_option("n", figure_n, "figure number")->required()->check(CLI::Range(1, 5));
  figure->add_flag("--no-sim", no_sim, "bounds only, skip simulations");
  figure->add_option("--dx", fig_opt.dx, "grid spacing for motile fronts")->capture_default_str();
  figure->add_option("--T", fig_opt.T, "simulation horizon for motile fronts")->capture_default_str();
  figure->add_option("--stefan-dx", fig_opt.stefan_dx, "grid spacing for Fisher-Stefan")->capture_default_str();
  figure->add_option("--stefan-T", fig_opt.stefan_T, "horizon for Fisher-Stefan")->capture_default_str();
  figure->add_option("--grid", grid_overrides, "override a sweep grid: name=v1,v2,...");
  figure->add_option("--threads", threads, "worker count (default WAVEBOUND_THREADS or all cores)");

  auto* criterion = app.add_subcommand("criterion", "classify pushed versus pulled selection");
  model_flags.attach(criterion, false);

  RunManifest manifest;
  manifest.command_line = args;

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kValidation;
  }

  namespace fs = std::filesystem;
  auto output_path = [&](const std::string& name) {
    fs::create_directories(out_dir);
    const std::string p = (fs::path(out_dir) / name).string();
    manifest.outputs.push_back(p);
    return p;
  };
  auto finish = [&](int code) {
    manifest.exit_code = code;
    manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    try {
      fs::create_directories(out_dir);
      std::ofstream mf((fs::path(out_dir) / ("manifest_" + manifest.command + ".json")).string());
      mf << manifest.to_json().dump(2) << '\n';
    } catch (const std::exception& e) {
      err << "warning: could not write manifest: " << e.what() << '\n';
    }
    return code;
  };

  try {
    if (bound->parsed()) {
      json result;
      if (bound_scalar->parsed()) {
        manifest.command = "bound_scalar";
        manifest.config["model"] = model_flags.to_json();
        const auto model = model_flags.scalar();
        result = to_json(sup_F(model));
      } else if (bound_two->parsed()) {
        manifest.command = "bound_two_species";
        manifest.config["model"] = model_flags.to_json();
        const auto model = model_flags.two();
        const auto s = solve_implicit_speed(model);
        if (!s.converged) throw ConvergenceError("implicit speed iteration did not converge", s.c, s.c);
        result = to_json(s);
        result["weak_coupling"] = to_json(weak_coupling_report(model, s));
      } else {
        manifest.command = "bound_fisher_stefan";
        manifest.config["kappa"] = stefan_kappa;
        result = json{{"kappa", stefan_kappa}, {"c_lb", fisher_stefan_bound(stefan_kappa)}};
      }
      manifest.config["result"] = result;
      const std::string text = result.dump(2);
      std::ofstream(output_path(manifest.command + ".json")) << text << '\n';
      out << text << '\n';
      return finish(kOk);
    }

    if (simulate->parsed()) {
      const SimConfig cfg = sim_flags.config();
      manifest.config["sim"] = to_json(cfg);
      SimResult res;
      std::vector<std::string> species{"rho"};
      if (sim_scalar->parsed()) {
        manifest.command = "simulate_scalar";
        manifest.config["model"] = model_flags.to_json();
        res = simulate_scalar(model_flags.scalar(), cfg);
      } else if (sim_two->parsed()) {
        manifest.command = "simulate_two_species";
        manifest.config["model"] = model_flags.to_json();
        res = simulate_two_species(model_flags.two(), cfg);
        species = {"rho1", "rho2"};
      } else {
        manifest.command = "simulate_stefan";
        manifest.config["kappa"] = sim_kappa;
        res = simulate_fisher_stefan(sim_kappa, cfg);
      }
      profiles_csv(res, species).write(output_path(manifest.command + "_profiles.csv"));
      front_csv(res).write(output_path(manifest.command + "_front.csv"));
      const json summary = summary_json(res);
      std::ofstream(output_path(manifest.command + "_summary.json")) << summary.dump(2) << '\n';
      manifest.config["result"] = summary;
      for (const auto& w : res.warnings) err << "warning: " << w << '\n';
      out << "fitted_speed " << csv_number(res.fitted_speed) << '\n';
      return finish(kOk);
    }

    if (figure->parsed()) {
      manifest.command = "figure" + std::to_string(figure_n);
      fig_opt.simulate = !no_sim;
      if (threads) fig_opt.threads = std::max(1u, *threads);
      for (const auto& g : grid_overrides) fig_opt.grids.insert(parse_grid(g));
      json cfg{{"figure", figure_n}, {"simulate", fig_opt.simulate}, {"dx", fig_opt.dx}, {"T", fig_opt.T},
               {"stefan_dx", fig_opt.stefan_dx}, {"stefan_L", fig_opt.stefan_L}, {"stefan_T", fig_opt.stefan_T}};
      auto grids = default_grids(figure_n);
      for (const auto& [k, v] : fig_opt.grids) grids[k] = v;
      cfg["grids"] = grids;
      manifest.config = cfg;
      const auto result = run_figure(figure_n, fig_opt);
      for (const auto& c : result.curves) {
        const auto p = output_path(c.file);
        c.table.write(p);
        out << p << '\n';
      }
      if (!result.failures.empty()) {
        manifest.error = std::to_string(result.failures.size()) + " sweep point(s) failed";
        err << "figure " << figure_n << ": " << result.failures.size() << " sweep point(s) failed:\n";
        for (const auto& f : result.failures) err << "  " << f << '\n';
        manifest.config["failed_points"] = result.failures;
        return finish(kPartialFigure);
      }
      return finish(kOk);
    }

    if (criterion->parsed()) {
      manifest.command = "criterion";
      manifest.config["model"] = model_flags.to_json();
      const auto c = selection_criterion(model_flags.scalar());
      const json j = to_json(c);
      manifest.config["result"] = j;
      std::ofstream(output_path("criterion.json")) << j.dump(2) << '\n';
      out << to_string(c.kind) << ' ' << csv_number(c.integral) << '\n';
      return finish(kOk);
    }
  } catch (const std::exception& e) {
    const int code = exit_code_for(e);
    manifest.error = describe(e);
    if (manifest.command.empty()) manifest.command = "error";
    err << "error: " << manifest.error << '\n';
    return finish(code);
  }
  return kUnexpected;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, out, err);
}

}  // namespace wavebound::cli
