#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include <gtest/gtest.h>

#include "wavebound/calculus.hpp"
#include "wavebound/ode.hpp"
#include "wavebound/quadrature.hpp"
#include "wavebound/sweep.hpp"

using namespace wavebound;

TEST(Quadrature, SmoothIntegrands) {
  EXPECT_NEAR(quad::integrate([](double x) { return x * x; }, 0, 1).value, 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(quad::integrate([](double x) { return std::exp(x); }, 0, 2).value, std::exp(2.0) - 1.0, 1e-12);
  EXPECT_NEAR(quad::integrate([](double x) { return std::sin(x); }, 0, M_PI).value, 2.0, 1e-13);
  const auto r = quad::integrate([](double x) { return 1.0 / (1e-4 + x * x); }, -1, 1);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 2.0 / 1e-2 * std::atan(1.0 / 1e-2), 1e-8);
}

TEST(Quadrature, LeftSingularSubstitution) {
  // q (1 - p) = 2 leaves a smooth integrand in s.
  for (auto [p, q] : {std::pair{0.5, 4}, {0.9, 20}, {0.95, 40}}) {
    const auto r = quad::integrate_left_singular([p](double x) { return std::pow(x, -p); }, 0, 1, q);
    EXPECT_NEAR(r.value, 1.0 / (1.0 - p), 1e-8 / (1.0 - p)) << p;
  }
  const auto r = quad::integrate_left_singular([](double x) { return std::log(x); }, 0, 1, 4);
  EXPECT_NEAR(r.value, -1.0, 1e-10);
}

TEST(Calculus, Derivatives) {
  auto f = [](double x) { return x * (1 - x) * (x - 0.3); };
  EXPECT_NEAR(calc::derivative_right(f, 0.0), -0.3, 1e-9);
  EXPECT_NEAR(calc::derivative_central([](double x) { return std::exp(x); }, 1.0), std::exp(1.0), 1e-8);
}

TEST(Calculus, GoldenSectionAndGridSearch) {
  auto g = [](double x) { return -(x - 0.7) * (x - 0.7); };
  const auto m = calc::golden_section_max(g, 0, 2, 1e-10);
  EXPECT_NEAR(m.x, 0.7, 1e-8);
  // Two local maxima: the grid search must find the global one.
  auto h = [](double x) { return std::exp(-50 * (x - 0.3) * (x - 0.3)) + 1.2 * std::exp(-50 * (x - 1.6) * (x - 1.6)); };
  const auto best = calc::grid_golden_max(h, 0, 2, 64, 1e-9);
  EXPECT_NEAR(best.x, 1.6, 1e-6);
  EXPECT_NEAR(calc::bisect([](double x) { return x * x - 2; }, 0, 2, 1e-14), std::sqrt(2.0), 1e-12);
}

TEST(Ode, ExponentialDecayWithDenseOutput) {
  const auto sol = ode::integrate([](double, double y) { return -y; }, 0.0, 1.0, 5.0, {1e-12, 1e-12, 1e-3, 0.1, 100000});
  for (double t : {0.0, 0.37, 1.0, 2.5, 4.99, 5.0}) EXPECT_NEAR(sol(t), std::exp(-t), 1e-10) << t;
}

TEST(Ode, NonlinearLogistic) {
  const auto sol = ode::integrate([](double, double y) { return y * (1 - y); }, 0.0, 0.1, 10.0);
  for (double t : {1.0, 3.0, 10.0}) {
    const double exact = 0.1 * std::exp(t) / (1 - 0.1 + 0.1 * std::exp(t));
    EXPECT_NEAR(sol(t), exact, 1e-8);
  }
}

TEST(Sweep, ResultsComeBackInIndexOrder) {
  const auto out = parallel_sweep<int>(100, [](std::size_t i) { return static_cast<int>(i * i); }, 4);
  ASSERT_EQ(out.size(), 100u);
  for (std::size_t i = 0; i < out.size(); ++i) {
    ASSERT_TRUE(out[i].value);
    EXPECT_EQ(*out[i].value, static_cast<int>(i * i));
  }
}

TEST(Sweep, FailuresAreCapturedPerPoint) {
  const auto out = parallel_sweep<double>(
      10, [](std::size_t i) -> double {
        if (i % 3 == 0) throw std::runtime_error("bad point " + std::to_string(i));
        return 1.0;
      },
      3);
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_EQ(static_cast<bool>(out[i].value), i % 3 != 0);
    if (i % 3 == 0) {
      EXPECT_EQ(out[i].error, "bad point " + std::to_string(i));
    }
  }
}

TEST(Sweep, ThreadCountFromEnvironment) {
  ::setenv("WAVEBOUND_THREADS", "3", 1);
  EXPECT_EQ(worker_count(), 3u);
  ::setenv("WAVEBOUND_THREADS", "0", 1);
  EXPECT_GE(worker_count(), 1u);
  ::unsetenv("WAVEBOUND_THREADS");
  std::atomic<int> calls{0};
  parallel_sweep<int>(0, [&](std::size_t) { return ++calls; });
  EXPECT_EQ(calls.load(), 0);
}
