#pragma once

// JSON and CSV serialisation of results and run configurations.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavebound/pde.hpp"
#include "wavebound/twospecies.hpp"
#include "wavebound/varbound.hpp"

namespace wavebound {

using json = nlohmann::ordered_json;

inline json to_json(const BoundResult& r) {
  return json{{"beta_star", r.beta_star},
              {"F_star", r.F_star},
              {"c_lb", r.c_lb},
              {"c_linear", r.c_linear},
              {"selection", to_string(r.selection)},
              {"attained_at_boundary", r.attained_at_boundary}};
}

inline json to_json(const SpeedSolve& s) {
  return json{{"c", s.c},
              {"iterations", s.iterations},
              {"residual", s.residual},
              {"epsilon", s.epsilon},
              {"converged", s.converged},
              {"beta_star", s.beta_star},
              {"G_star", s.G_star},
              {"c_linear", s.c_linear},
              {"method", s.method}};
}

inline json to_json(const WeakCouplingReport& r) {
  json j{{"epsilon", r.epsilon}};
  j["threshold_ratio"] = r.threshold_ratio ? json(*r.threshold_ratio) : json(nullptr);
  j["valid"] = r.valid;
  return j;
}

inline json to_json(const CriterionResult& c) {
  return json{{"classification", to_string(c.kind)}, {"integral", c.integral}, {"threshold", c.threshold}};
}

inline json to_json(const SimConfig& c) {
  json j{{"L", c.L}, {"dx", c.dx}};
  j["dt"] = c.dt ? json(*c.dt) : json(nullptr);
  j["cfl"] = c.cfl;
  j["T"] = c.T;
  j["snapshot_times"] = c.snapshot_times;
  j["ic"] = c.ic == InitialCondition::step ? "step" : "smoothed_step";
  j["ic_width"] = c.ic_width;
  j["level"] = c.level;
  j["samples"] = c.samples;
  j["track_front"] = c.track_front;
  return j;
}

inline json summary_json(const SimResult& r) {
  return json{{"fitted_speed", r.fitted_speed}, {"fit_residual", r.fit_residual},
              {"t_end", r.t_end},               {"dt", r.dt},
              {"max_cfl", r.stability_report},  {"min_density", r.min_density},
              {"max_density", r.max_density},   {"warnings", r.warnings}};
}

/// Fixed-format number for CSV output (round-trip precision).
inline std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

/// CSV table with a header row.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw Error("csv: row width does not match header");
    rows_.push_back(std::move(row));
  }
  void add_row(const std::vector<double>& values) {
    std::vector<std::string> row;
    row.reserve(values.size());
    for (double v : values) row.push_back(csv_number(v));
    add_row(std::move(row));
  }

  const std::vector<std::string>& header() const noexcept { return header_; }
  const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }

  void write(std::ostream& os) const {
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
      os << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    write(out);
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Profiles at each snapshot: columns x, then <species>_t<time> per snapshot.
inline CsvTable profiles_csv(const SimResult& r, const std::vector<std::string>& species_names) {
  std::vector<std::string> header{"x"};
  for (const auto& s : r.snapshots) {
    for (std::size_t k = 0; k < s.species.size(); ++k) {
      const std::string name = k < species_names.size() ? species_names[k] : "rho" + std::to_string(k + 1);
      // snapshot times land on the step grid; 10 significant digits hide the drift
      char label[64];
      std::snprintf(label, sizeof label, "%s_t%.10g", name.c_str(), s.t);
      header.push_back(label);
    }
  }
  CsvTable table(header);
  for (std::size_t i = 0; i < r.x_grid.size(); ++i) {
    std::vector<double> row{r.x_grid[i]};
    for (const auto& s : r.snapshots) {
      for (const auto& prof : s.species) row.push_back(prof[i]);
    }
    table.add_row(row);
  }
  return table;
}

inline CsvTable front_csv(const SimResult& r) {
  CsvTable table({"t", "X"});
  for (const auto& [t, X] : r.front_series) table.add_row(std::vector<double>{t, X});
  return table;
}

}  // namespace wavebound
