#include <cmath>

#include <gtest/gtest.h>

#include "wavebound/pde.hpp"
#include "wavebound/varbound.hpp"

using namespace wavebound;

namespace {

SimConfig config(double L, double dx, double T) {
  SimConfig c;
  c.L = L;
  c.dx = dx;
  c.T = T;
  return c;
}

std::vector<double> grid(std::size_t n, double dx) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = (i + 0.5) * dx;
  return x;
}

}  // namespace

TEST(FrontPosition, LinearInterpolationAndErrors) {
  const std::vector<double> x{0, 1, 2, 3};
  EXPECT_DOUBLE_EQ(front_position(x, {1, 1, 0, 0}, 0.1), 1.9);
  EXPECT_DOUBLE_EQ(front_position(x, {1, 0.6, 0.2, 0}, 0.4), 1.5);
  EXPECT_THROW(front_position(x, {1, 1, 1, 1}, 0.1), FrontTrackingError);
  EXPECT_THROW(front_position(x, {0, 0, 0, 0}, 0.1), FrontTrackingError);
  EXPECT_THROW(front_position(x, {0, 1, 1, 0}, 0.1), FrontTrackingError);
  EXPECT_THROW(front_position(x, {1, 0, 1, 0}, 0.1), FrontTrackingError);
}

TEST(EstimateSpeed, TranslatingStep) {
  const double dx = 0.1, s = 1.3;
  const auto x = grid(2000, dx);
  std::vector<std::pair<double, std::vector<double>>> samples;
  for (int k = 0; k <= 200; ++k) {
    const double t = 0.5 * k;
    std::vector<double> prof(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) prof[i] = x[i] <= 10 + s * t ? 1.0 : 0.0;
    samples.emplace_back(t, prof);
  }
  const auto [series, fit] = estimate_speed(x, samples, 0.1);
  EXPECT_EQ(series.size(), samples.size());
  EXPECT_NEAR(fit.speed, s, dx / 50.0);
  EXPECT_LT(fit.residual, dx);
}

TEST(EstimateSpeed, StationaryProfile) {
  const auto x = grid(500, 0.1);
  std::vector<double> prof(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) prof[i] = 1.0 / (1.0 + std::exp(x[i] - 20.0));
  std::vector<std::pair<double, std::vector<double>>> samples;
  for (int k = 0; k <= 100; ++k) samples.emplace_back(k, prof);
  EXPECT_NEAR(estimate_speed(x, samples, 0.1).second.speed, 0.0, 1e-12);
}

TEST(SimConfig, Validation) {
  EXPECT_THROW(config(10, 0.1, 10).validate(), ConfigError);  // 100 cells
  auto c = config(400, 0.1, 10);
  EXPECT_NO_THROW(c.validate());
  c.level = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = config(400, 0.1, -1);
  EXPECT_THROW(c.validate(), ConfigError);
  c = config(400, 0.1, 10);
  c.dt = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = config(400, 0.1, 10);
  c.cfl = 0.6;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(SimConfig, CflFactorSetsAutomaticStep) {
  const ScalarModel m(parse_expr("2"), parse_expr("0"), {});
  auto cfg = config(40, 0.1, 1);
  cfg.track_front = false;
  EXPECT_NEAR(simulate_scalar(m, cfg, std::vector<double>(400, 0.5)).dt, 0.2 * 0.01 / 2, 1e-15);
  cfg.cfl = 0.1;
  EXPECT_NEAR(simulate_scalar(m, cfg, std::vector<double>(400, 0.5)).dt, 0.1 * 0.01 / 2, 1e-15);
}

TEST(SimulateScalar, UniformStateWithoutReactionIsStationary) {
  const ScalarModel m(parse_expr("1+u"), parse_expr("0"), {});
  auto cfg = config(40, 0.1, 5);
  cfg.track_front = false;
  cfg.snapshot_times = {5};
  const auto r = simulate_scalar(m, cfg, std::vector<double>(400, 0.5));
  ASSERT_EQ(r.snapshots.size(), 1u);
  for (double v : r.snapshots[0].species[0]) EXPECT_NEAR(v, 0.5, 1e-12);
}

TEST(SimulateScalar, FisherKppPulledSpeed) {
  const auto r = simulate_scalar(scalar_preset("fisher_kpp"), config(400, 0.1, 150));
  EXPECT_NEAR(r.fitted_speed, 2.0, 0.03);
  EXPECT_LT(r.fit_residual, 0.5 * 0.1);
  EXPECT_GE(r.min_density, -1e-9);
  EXPECT_LE(r.max_density, 1 + 1e-9);
  EXPECT_LE(r.stability_report, 0.2 + 1e-12);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(SimulateScalar, GridConvergenceFisherKpp) {
  const auto coarse = simulate_scalar(scalar_preset("fisher_kpp"), config(400, 0.2, 150));
  const auto fine = simulate_scalar(scalar_preset("fisher_kpp"), config(400, 0.1, 150));
  EXPECT_LT(std::abs(coarse.fitted_speed - fine.fitted_speed), 0.01 * fine.fitted_speed);
}

TEST(SimulateScalar, SharpFrontPorousFisher) {
  const auto r = simulate_scalar(scalar_preset("porous_fisher", {{"m", 1}, {"n", 1}}), config(200, 0.1, 150));
  EXPECT_NEAR(r.fitted_speed, 1.0 / std::sqrt(2.0), 0.02);
  EXPECT_GE(r.min_density, -1e-9);
  EXPECT_LE(r.max_density, 1 + 1e-9);
}

TEST(SimulateScalar, PulledAgreementForLinearShift) {
  const auto m = scalar_preset("linear_shift", {{"delta", 0.8}});
  ASSERT_EQ(selection_criterion(m).kind, SelectionClass::pulled_candidate);
  const auto r = simulate_scalar(m, config(400, 0.1, 150));
  EXPECT_NEAR(r.fitted_speed, linear_speed(m), 0.02 * linear_speed(m));
}

TEST(SimulateScalar, InstabilityGuard) {
  auto cfg = config(40, 0.1, 5);
  cfg.dt = 0.1;
  EXPECT_THROW(simulate_scalar(scalar_preset("fisher_kpp"), cfg), InstabilityError);
}

TEST(SimulateScalar, SnapshotsAndSmoothedStart) {
  auto cfg = config(100, 0.1, 20);
  cfg.snapshot_times = {10, 0, 20};
  cfg.ic = InitialCondition::smoothed_step;
  cfg.ic_width = 2.0;
  const auto r = simulate_scalar(scalar_preset("fisher_kpp"), cfg);
  ASSERT_EQ(r.snapshots.size(), 3u);
  EXPECT_NEAR(r.snapshots[0].t, 0.0, 1e-12);
  EXPECT_NEAR(r.snapshots[2].t, 20.0, 1e-9);
  EXPECT_NEAR(r.snapshots[0].species[0][0], 1.0, 1e-3);
  EXPECT_GT(r.snapshots[0].species[0][100], 0.0);  // smoothed, so no exact zeros near the step
}

TEST(SimulateTwoSpecies, DecoupledReducesToFisherKpp) {
  const auto r = simulate_two_species(two_species_preset("ecm_c", {{"kappa", 0}, {"nu", 0}}), config(400, 0.1, 150));
  EXPECT_NEAR(r.fitted_speed, 2.0, 0.03);
}

TEST(SimulateTwoSpecies, DegradationIsMonotoneAndSelectionIsNonlinear) {
  const auto m = two_species_preset("ecm_c", {{"kappa", 10}, {"nu", 0.5}});
  auto cfg = config(400, 0.1, 150);
  cfg.snapshot_times = {150};
  const auto r = simulate_two_species(m, cfg);
  EXPECT_TRUE(r.secondary_monotone);
  EXPECT_GE(r.min_density, -1e-9);
  ASSERT_EQ(r.snapshots.back().species.size(), 2u);
  EXPECT_NEAR(r.snapshots.back().species[1].back(), 0.5, 1e-12);  // untouched far field
  EXPECT_LT(r.snapshots.back().species[1].front(), 1e-6);
  EXPECT_GT(r.fitted_speed, 2.0 * std::sqrt(0.5) + 3 * r.fit_residual / cfg.T + 0.01);
}

TEST(SimulateTwoSpecies, WeakDegradationAttainsLinearSpeed) {
  const auto r = simulate_two_species(two_species_preset("ecm_c", {{"kappa", 0.1}, {"nu", 0.5}}), config(400, 0.1, 200));
  EXPECT_NEAR(r.fitted_speed, std::sqrt(2.0), 0.03 * std::sqrt(2.0));
}

TEST(SimulateFisherStefan, SmallKappaAndBoundValidity) {
  auto cfg = config(100, 0.05, 400);
  const auto small = simulate_fisher_stefan(0.05, cfg);
  EXPECT_NEAR(small.fitted_speed, 0.05 / std::sqrt(3.0), 0.1 * 0.05 / std::sqrt(3.0));
  cfg.T = 150;
  const auto mid = simulate_fisher_stefan(0.5, cfg);
  EXPECT_GE(mid.fitted_speed, fisher_stefan_bound(0.5) - 0.01);
  EXPECT_GE(mid.min_density, -1e-9);
  EXPECT_THROW(simulate_fisher_stefan(0.0, cfg), DomainError);
}
