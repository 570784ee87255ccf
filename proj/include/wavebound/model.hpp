#pragma once

// Travelling-wave model definitions and the preset catalog.

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wavebound/error.hpp"
#include "wavebound/expr.hpp"

namespace wavebound {

/// Single-species model  rho_t = (D(rho) rho_x)_x + f(rho)  with steady states 0 and 1.
class ScalarModel {
 public:
  ScalarModel(Expr D, Expr f, ParamMap params, std::string name = "custom")
      : D_expr_(std::move(D)), f_expr_(std::move(f)), params_(std::move(params)), name_(std::move(name)) {
    for (const Expr* e : {&D_expr_, &f_expr_}) {
      for (const auto& v : e->variables()) {
        if (v == "u2") throw ValidationError("scalar model may only use the variable u");
      }
    }
    D_ = Program(D_expr_, params_);
    f_ = Program(f_expr_, params_);
    validate();
  }

  double D(double u) const { return D_(u); }
  double f(double u) const { return f_(u); }

  const Expr& D_expr() const noexcept { return D_expr_; }
  const Expr& f_expr() const noexcept { return f_expr_; }
  const ParamMap& params() const noexcept { return params_; }
  const std::string& name() const noexcept { return name_; }
  bool constant_diffusivity() const noexcept { return D_.is_constant(); }

 private:
  void validate() const {
    const double f0 = f(0.0), f1 = f(1.0);
    if (!(std::abs(f0) <= 1e-12) || !(std::abs(f1) <= 1e-12)) {
      std::ostringstream os;
      os << "reaction term must vanish at u=0 and u=1 (f(0)=" << f0 << ", f(1)=" << f1 << ")";
      throw ValidationError(os.str());
    }
    for (int i = 0; i <= 1000; ++i) {
      const double u = i / 1000.0;
      const double d = D(u);
      if (!(d >= 0.0)) {
        std::ostringstream os;
        os << "diffusivity must be non-negative on [0,1] (D(" << u << ")=" << d << ")";
        throw ValidationError(os.str());
      }
    }
  }

  Expr D_expr_, f_expr_;
  ParamMap params_;
  std::string name_;
  Program D_, f_;
};

/// Two-species model with a motile species u1 and a degraded species u2:
///   rho1_t = (D(rho1,rho2) rho1_x)_x + f(rho1,rho2),   rho2_t = -kappa rho1 rho2,
/// rho2 -> nu ahead of the front.
class TwoSpeciesModel {
 public:
  TwoSpeciesModel(Expr D, Expr f, double kappa, double nu, ParamMap params,
                  std::string name = "custom", bool allow_unit_nu = false)
      : D_expr_(std::move(D)), f_expr_(std::move(f)), kappa_(kappa), nu_(nu),
        params_(std::move(params)), name_(std::move(name)) {
    D_ = Program(D_expr_, params_);
    f_ = Program(f_expr_, params_);
    if (!(kappa_ >= 0.0) || !std::isfinite(kappa_)) throw ValidationError("kappa must be >= 0");
    const bool nu_ok = allow_unit_nu ? (nu_ >= 0.0 && nu_ <= 1.0) : (nu_ >= 0.0 && nu_ < 1.0);
    if (!nu_ok) {
      throw ValidationError(allow_unit_nu ? "nu must lie in [0,1]" : "nu must lie in [0,1)");
    }
    validate();
  }

  double D(double u1, double u2) const { return D_(u1, u2); }
  double f(double u1, double u2) const { return f_(u1, u2); }
  /// Coupling g(u1,u2) = -kappa u1 u2.
  double g(double u1, double u2) const { return -kappa_ * u1 * u2; }

  double kappa() const noexcept { return kappa_; }
  double nu() const noexcept { return nu_; }
  const Expr& D_expr() const noexcept { return D_expr_; }
  const Expr& f_expr() const noexcept { return f_expr_; }
  const ParamMap& params() const noexcept { return params_; }
  const std::string& name() const noexcept { return name_; }

 private:
  void validate() const {
    for (int i = 0; i <= 100; ++i) {
      const double u2 = nu_ * i / 100.0;
      if (!(std::abs(f(0.0, u2)) <= 1e-12)) {
        throw ValidationError("reaction term must vanish at u1=0 for every u2 in [0,nu]");
      }
      for (int j = 0; j <= 100; ++j) {
        const double d = D(j / 100.0, u2);
        if (!(d >= 0.0)) throw ValidationError("diffusivity must be non-negative on [0,1]x[0,nu]");
      }
    }
    if (!(std::abs(f(1.0, 0.0)) <= 1e-12)) {
      throw ValidationError("reaction term must vanish at (u1,u2)=(1,0)");
    }
  }

  Expr D_expr_, f_expr_;
  double kappa_, nu_;
  ParamMap params_;
  std::string name_;
  Program D_, f_;
};

using AnyModel = std::variant<ScalarModel, TwoSpeciesModel>;

namespace detail {

inline double require(const ParamMap& p, const std::string& preset, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) throw ValidationError("preset '" + preset + "' requires parameter '" + key + "'");
  if (!std::isfinite(it->second)) throw ValidationError("parameter '" + key + "' must be finite");
  return it->second;
}

inline double optional(const ParamMap& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

}  // namespace detail

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"porous_fisher", "allee",  "fisher_kpp", "linear_shift",
                                                 "ecm_c",         "ecm_b",  "landman"};
  return names;
}

inline bool is_two_species_preset(std::string_view name) {
  return name == "ecm_c" || name == "ecm_b" || name == "landman";
}

/// Builds a validated preset model.
///
///   porous_fisher(m, n)  D = u^m,        f = u(1 - u^n)
///   allee(alpha, a)      D = alpha u + u^2, f = u(1-u)(u-a),  a in [0, 0.5]
///   fisher_kpp           D = 1,          f = u(1-u)
///   linear_shift(delta)  D = u + delta,  f = u(1-u)
///   ecm_c(kappa, nu)     D = 1 - u2,     f = u1(1-u1)
///   ecm_b(kappa, nu)     D = 1 - u2,     f = u1(1-u1-u2)
///   landman(lambda, K)   D = 1,          f = u1(1-u1-lambda u2), kappa = lambda K, nu = 1
///
/// The landman model is the reduced form with u2 = 1 - K n. Its far-field level
/// may be overridden with `nu` (used by the adjoint-scaling diagnostics).
inline AnyModel preset(const std::string& name, const ParamMap& params) {
  using detail::require;
  if (name == "porous_fisher") {
    const double m = require(params, name, "m"), n = require(params, name, "n");
    if (m < 0.0) throw ValidationError("porous_fisher: m must be >= 0");
    if (n <= 0.0) throw ValidationError("porous_fisher: n must be > 0");
    return ScalarModel(parse_expr("u^m"), parse_expr("u*(1-u^n)"), {{"m", m}, {"n", n}}, name);
  }
  if (name == "allee") {
    const double alpha = require(params, name, "alpha"), a = require(params, name, "a");
    if (alpha <= 0.0) throw ValidationError("allee: alpha must be > 0");
    if (a < 0.0 || a > 0.5) throw ValidationError("allee: a must lie in [0, 0.5]");
    return ScalarModel(parse_expr("alpha*u+u^2"), parse_expr("u*(1-u)*(u-a)"),
                       {{"alpha", alpha}, {"a", a}}, name);
  }
  if (name == "fisher_kpp") {
    return ScalarModel(parse_expr("1"), parse_expr("u*(1-u)"), {}, name);
  }
  if (name == "linear_shift") {
    const double delta = require(params, name, "delta");
    if (delta < 0.0) throw ValidationError("linear_shift: delta must be >= 0");
    return ScalarModel(parse_expr("u+delta"), parse_expr("u*(1-u)"), {{"delta", delta}}, name);
  }
  if (name == "ecm_c" || name == "ecm_b") {
    const double kappa = require(params, name, "kappa"), nu = require(params, name, "nu");
    const char* f = name == "ecm_c" ? "u1*(1-u1)" : "u1*(1-u1-u2)";
    return TwoSpeciesModel(parse_expr("1-u2"), parse_expr(f), kappa, nu, {}, name);
  }
  if (name == "landman") {
    const double lambda = require(params, name, "lambda"), K = require(params, name, "K");
    if (lambda < 0.0) throw ValidationError("landman: lambda must be >= 0");
    if (K < 0.0) throw ValidationError("landman: K must be >= 0");
    const double nu = detail::optional(params, "nu", 1.0);
    return TwoSpeciesModel(parse_expr("1"), parse_expr("u1*(1-u1-lambda*u2)"), lambda * K, nu,
                           {{"lambda", lambda}, {"K", K}}, name, /*allow_unit_nu=*/true);
  }
  throw ValidationError("unknown preset '" + name + "'");
}

inline ScalarModel scalar_preset(const std::string& name, const ParamMap& params = {}) {
  auto m = preset(name, params);
  if (auto* s = std::get_if<ScalarModel>(&m)) return *s;
  throw ValidationError("preset '" + name + "' is a two-species model");
}

inline TwoSpeciesModel two_species_preset(const std::string& name, const ParamMap& params = {}) {
  auto m = preset(name, params);
  if (auto* t = std::get_if<TwoSpeciesModel>(&m)) return *t;
  throw ValidationError("preset '" + name + "' is a single-species model");
}

/// Parsed contents of a model file: `key = value` lines, '#' comments.
/// Keys: D, f, kappa, nu, param.<name>.
struct ModelFile {
  std::string D, f;
  std::optional<double> kappa, nu;
  ParamMap params;
};

inline ModelFile parse_model_text(std::string_view text) {
  ModelFile out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string{};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  auto number = [&](const std::string& key, const std::string& v) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0') {
      throw ValidationError("model file line " + std::to_string(lineno) + ": '" + key +
                            "' is not a number");
    }
    return x;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("model file line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "D") {
      out.D = value;
    } else if (key == "f") {
      out.f = value;
    } else if (key == "kappa") {
      out.kappa = number(key, value);
    } else if (key == "nu") {
      out.nu = number(key, value);
    } else if (key.rfind("param.", 0) == 0 && key.size() > 6) {
      out.params[key.substr(6)] = number(key, value);
    } else {
      throw ValidationError("model file line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (out.D.empty() || out.f.empty()) throw ValidationError("model file must define both D and f");
  return out;
}

/// Builds a model from file contents. Presence of kappa or nu selects the
/// two-species class.
inline AnyModel model_from_file(const ModelFile& mf) {
  Expr D = parse_expr(mf.D), f = parse_expr(mf.f);
  if (mf.kappa || mf.nu) {
    return TwoSpeciesModel(std::move(D), std::move(f), mf.kappa.value_or(0.0), mf.nu.value_or(0.0),
                           mf.params);
  }
  return ScalarModel(std::move(D), std::move(f), mf.params);
}

inline AnyModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_file(parse_model_text(ss.str()));
}

}  // namespace wavebound
