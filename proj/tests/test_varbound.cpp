#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "wavebound/varbound.hpp"

using namespace wavebound;

namespace {

// Beta function from the standard library's lgamma, independent of specfun.
double B(double a, double b) { return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b)); }

// Composite Simpson on [a, b] with n (even) panels.
template <class F>
double simpson(const F& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// F(beta) for the Allee model by expanding D f u^{-beta}(1-u)^beta into Beta
// functions: (alpha u + u^2) u (1-u)(u-a) = (1-u)[u^4 + (alpha-a) u^3 - alpha a u^2].
double allee_F_oracle(double alpha, double a, double beta) {
  const double N = B(5 - beta, 2 + beta) + (alpha - a) * B(4 - beta, 2 + beta) - alpha * a * B(3 - beta, 2 + beta);
  return beta * N / B(2 - beta, 2 + beta);
}

ScalarModel porous(double m, double n) { return scalar_preset("porous_fisher", {{"m", m}, {"n", n}}); }

}  // namespace

TEST(FOfBeta, ExamplesFromClosedForms) {
  EXPECT_NEAR(F_of_beta(porous(0, 1), 1.0), 1.0, 1e-9);
  EXPECT_NEAR(F_of_beta(porous(1, 1), 1.0), 0.25, 1e-9);
  EXPECT_NEAR(F_of_beta(scalar_preset("allee", {{"alpha", 1}, {"a", 0.25}}), 1.0), 0.0625, 1e-9);
  EXPECT_THROW(F_of_beta(porous(0, 1), 0.0), DomainError);
  EXPECT_THROW(F_of_beta(porous(0, 1), 2.0), DomainError);
}

TEST(FOfBeta, VanishesAsBetaToZero) {
  for (const auto& m : {porous(0, 1), porous(2, 3), scalar_preset("linear_shift", {{"delta", 0.2}})})
    EXPECT_LT(std::abs(F_of_beta(m, 1e-4)), 1e-3);
}

TEST(FOfBeta, AgreesWithAlleeBetaExpansion) {
  for (double alpha : {0.2, 1.0, 2.0})
    for (double a : {0.0, 0.25, 0.5}) {
      const auto m = scalar_preset("allee", {{"alpha", alpha}, {"a", a}});
      for (double beta = 0.05; beta < 1.96; beta += 0.1) {
        const double ref = allee_F_oracle(alpha, a, beta);
        EXPECT_NEAR(F_of_beta(m, beta), ref, 1e-8 * std::max(1.0, std::abs(ref)));
        EXPECT_NEAR(closed_form_F(ClosedFormKind::allee, {0, 1, alpha, a}, beta), ref, 1e-12);
      }
    }
}

TEST(FOfBeta, QuadratureMatchesClosedFormsOnFiftyPointGrid) {
  for (int i = 0; i < 50; ++i) {
    const double beta = 0.05 + 1.9 * i / 49.0;
    for (double m : {0.0, 0.5, 1.0, 2.0, 3.0}) {
      EXPECT_NEAR(F_of_beta(porous(m, 1), beta), closed_form_F(ClosedFormKind::porous_n1, {m}, beta), 1e-7)
          << "m=" << m << " beta=" << beta;
      for (double n : {1.0, 2.0, 3.0}) {
        EXPECT_NEAR(F_of_beta(porous(m, n), beta), closed_form_F(ClosedFormKind::wound, {m, n}, beta), 1e-7)
            << "m=" << m << " n=" << n << " beta=" << beta;
      }
    }
  }
}

TEST(ClosedForms, Examples) {
  EXPECT_NEAR(closed_form_F(ClosedFormKind::wound, {1, 1}, 1.0), 0.25, 1e-14);
  EXPECT_NEAR(closed_form_F(ClosedFormKind::porous_n1, {1, 1}, 1.0), 0.25, 1e-14);
  EXPECT_NEAR(closed_form_F(ClosedFormKind::porous_n1, {0}, 1.7), 1.7, 1e-13);
  EXPECT_DOUBLE_EQ(closed_form_F(ClosedFormKind::allee, {0, 1, 0.7, 0.3}, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(closed_form_F(ClosedFormKind::allee, {0, 1, 0.7, 0.3}, 2.0), 0.0);
  EXPECT_THROW(closed_form_F(ClosedFormKind::wound, {0, 1}, 2.5), DomainError);
}

TEST(LinearLimit, SlopesAndSpeeds) {
  EXPECT_NEAR(F_limit_beta2(scalar_preset("fisher_kpp")), 2.0, 1e-9);
  EXPECT_NEAR(F_limit_beta2(porous(1, 1)), 0.0, 1e-12);
  EXPECT_NEAR(F_limit_beta2(scalar_preset("linear_shift", {{"delta", 0.3}})), 0.6, 1e-9);
  EXPECT_NEAR(linear_speed(scalar_preset("fisher_kpp")), 2.0, 1e-9);
  EXPECT_NEAR(linear_speed(porous(2, 1)), 0.0, 1e-12);
  EXPECT_NEAR(linear_speed(scalar_preset("linear_shift", {{"delta", 0.25}})), 1.0, 1e-9);
  EXPECT_NEAR(linear_speed(scalar_preset("allee", {{"alpha", 1}, {"a", 0.3}})), 0.0, 1e-12);
}

TEST(LinearLimit, FNearTwoApproachesLimit) {
  for (const auto& m : {scalar_preset("fisher_kpp"), scalar_preset("linear_shift", {{"delta", 0.3}})}) {
    EXPECT_NEAR(F_of_beta(m, 1.999), F_limit_beta2(m), 0.02);
    EXPECT_NEAR(F_of_beta(m, 1.99999), F_limit_beta2(m), 1e-3);
  }
}

TEST(SupF, PorousFisherFamily) {
  const auto r0 = sup_F(porous(0, 1));
  EXPECT_NEAR(r0.c_lb, 2.0, 1e-6);
  EXPECT_TRUE(r0.attained_at_boundary);
  EXPECT_NE(r0.selection, Selection::pushed);

  const auto r1 = sup_F(porous(1, 1));
  EXPECT_NEAR(r1.beta_star, 1.0, 1e-7);
  EXPECT_NEAR(r1.c_lb, 1.0 / std::sqrt(2.0), 1e-9);
  EXPECT_EQ(r1.selection, Selection::pushed);
  EXPECT_FALSE(r1.attained_at_boundary);
}

// m = 2: N = B(4-beta, 2+beta), so F = beta (2-beta)(3-beta)/20. The
// maximiser solves 3b^2 - 10b + 6 = 0; F itself is re-evaluated here by
// Simpson quadrature of the smooth integrand u^{3-beta}(1-u)^{1+beta}.
TEST(SupF, PorousMTwoAgainstCubicOracle) {
  const double b_star = (10.0 - std::sqrt(100.0 - 72.0)) / 6.0;
  const double N = simpson([&](double u) { return std::pow(u, 3 - b_star) * std::pow(1 - u, 1 + b_star); }, 0, 1, 20000);
  const double F_star = b_star * N / B(2 - b_star, 2 + b_star);
  EXPECT_NEAR(F_star, b_star * (2 - b_star) * (3 - b_star) / 20.0, 1e-11);

  const auto r = sup_F(porous(2, 1));
  EXPECT_NEAR(r.beta_star, b_star, 1e-8);
  EXPECT_NEAR(r.F_star, F_star, 1e-8);
  EXPECT_NEAR(r.c_lb, std::sqrt(2 * F_star), 1e-8);
  EXPECT_NEAR(r.c_lb, 0.4596, 1e-4);
}

TEST(SupF, AlleeMatchesGridMaximumOfOracle) {
  for (double alpha : {0.3, 1.5})
    for (double a : {0.1, 0.45}) {
      double best = 0.0;
      for (int i = 1; i < 20000; ++i) best = std::max(best, allee_F_oracle(alpha, a, 2.0 * i / 20000));
      const auto r = sup_F(scalar_preset("allee", {{"alpha", alpha}, {"a", a}}));
      EXPECT_NEAR(r.F_star, best, 1e-8);
      EXPECT_EQ(r.selection, Selection::pushed);
    }
}

TEST(SupF, DominatesLinearSpeedOnRandomDraws) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    ScalarModel m = scalar_preset("fisher_kpp");
    switch (i % 4) {
      case 0: m = porous(3 * U(rng), 0.5 + 2.5 * U(rng)); break;
      case 1: m = scalar_preset("allee", {{"alpha", 0.2 + 1.8 * U(rng)}, {"a", 0.5 * U(rng)}}); break;
      case 2: m = scalar_preset("linear_shift", {{"delta", U(rng)}}); break;
      default: break;
    }
    const auto r = sup_F(m);
    EXPECT_GE(r.c_lb, r.c_linear - 1e-8) << m.name();
    EXPECT_GE(r.F_star, 0.0);
    EXPECT_NEAR(r.c_lb, std::sqrt(2 * r.F_star), 1e-12);
    // No grid point beats the reported supremum.
    for (double b = 0.05; b < 1.96; b += 0.1) EXPECT_LE(F_of_beta(m, b), r.F_star + 1e-9);
  }
}

TEST(SupF, MonotoneInPorousParameters) {
  double prev = 0.0;
  for (double n : {0.5, 1.0, 2.0, 3.0, 4.0}) {
    const double c = sup_F(porous(1, n)).c_lb;
    EXPECT_GT(c, prev);
    prev = c;
  }
  prev = 10.0;
  for (double m : {0.5, 1.0, 2.0, 3.0}) {
    const double c = sup_F(porous(m, 1)).c_lb;
    EXPECT_LT(c, prev);
    prev = c;
  }
}

TEST(Criterion, LinearShiftAnalyticIntegral) {
  for (double d : {0.0, 0.1, 0.3, 0.5, 0.7, 1.0}) {
    const auto c = selection_criterion(scalar_preset("linear_shift", {{"delta", d}}));
    EXPECT_NEAR(c.integral, 0.25 - d / 3.0, 1e-9) << d;
    EXPECT_NEAR(c.threshold, d / 6.0, 1e-9) << d;
  }
  EXPECT_EQ(selection_criterion(scalar_preset("linear_shift", {{"delta", 0.4}})).kind, SelectionClass::pushed);
  EXPECT_EQ(selection_criterion(scalar_preset("linear_shift", {{"delta", 0.6}})).kind, SelectionClass::pulled_candidate);
}

TEST(Criterion, ClassicalCases) {
  const auto kpp = selection_criterion(scalar_preset("fisher_kpp"));
  EXPECT_EQ(kpp.kind, SelectionClass::pulled_candidate);
  EXPECT_NEAR(kpp.integral, -1.0 / 3.0, 1e-9);
  EXPECT_EQ(selection_criterion(porous(1, 1)).kind, SelectionClass::degenerate_pushed);
  EXPECT_EQ(selection_criterion(porous(2, 1)).kind, SelectionClass::degenerate_pushed);
  // Allee with a > 0 has f < 0 near zero, so the degenerate shortcut does not apply.
  EXPECT_NE(selection_criterion(scalar_preset("allee", {{"alpha", 1}, {"a", 0.2}})).kind,
            SelectionClass::degenerate_pushed);
}

TEST(Criterion, NonIntegrableIntegrandIsReported) {
  const ScalarModel m(parse_expr("1+u^0.001"), parse_expr("u*(1-u)"), {});
  EXPECT_THROW(selection_criterion(m), DivergentIntegral);
}

TEST(Criterion, PushedImpliesInteriorSupremum) {
  for (double d = 0.1; d < 0.46; d += 0.05) {
    const auto m = scalar_preset("linear_shift", {{"delta", d}});
    ASSERT_EQ(selection_criterion(m).kind, SelectionClass::pushed);
    const auto r = sup_F(m);
    EXPECT_EQ(r.selection, Selection::pushed) << d;
    EXPECT_FALSE(r.attained_at_boundary);
    EXPECT_GT(r.F_star, F_limit_beta2(m) + 1e-7);
  }
  const auto pulled = sup_F(scalar_preset("linear_shift", {{"delta", 0.8}}));
  EXPECT_TRUE(pulled.attained_at_boundary);
  EXPECT_NEAR(pulled.c_lb, 2 * std::sqrt(0.8), 1e-6);
}

// Oracle: ratio of the two integrals with test function exp(-kappa u),
//   int u(1-u) e^{-kappa u} du / (1/kappa^2 + int e^{-kappa u}/kappa du).
TEST(FisherStefan, MatchesQuadratureOfBothIntegrals) {
  for (double k : {0.02, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 50.0}) {
    const double num = simpson([k](double u) { return u * (1 - u) * std::exp(-k * u); }, 0, 1, 20000);
    const double den = 1 / (k * k) + simpson([k](double u) { return std::exp(-k * u) / k; }, 0, 1, 20000);
    EXPECT_NEAR(fisher_stefan_bound(k), std::sqrt(2 * num / den), 1e-9 * std::sqrt(2 * num / den)) << k;
  }
}

TEST(FisherStefan, LimitsAndMonotonicity) {
  EXPECT_NEAR(fisher_stefan_bound(0.01) / (0.01 / std::sqrt(3.0)), 1.0, 0.02);
  EXPECT_NEAR(fisher_stefan_bound(1e-6) / (1e-6 / std::sqrt(3.0)), 1.0, 1e-5);
  // At kappa = 50 the bound is essentially sqrt(1 - 2/kappa) = sqrt(0.96).
  EXPECT_NEAR(fisher_stefan_bound(50.0), std::sqrt(0.96), 1e-12);
  EXPECT_NEAR(fisher_stefan_bound(1e6), 1.0, 1e-5);
  double prev = 0.0;
  for (double k = 0.1; k <= 20.0; k += 0.1) {
    const double c = fisher_stefan_bound(k);
    EXPECT_GT(c, prev);
    prev = c;
  }
  // The series and the direct formula agree where both are accurate.
  const double k = 1.0;
  EXPECT_NEAR(fisher_stefan_bound(k * (1 - 1e-12)), fisher_stefan_bound(k), 1e-10);
  EXPECT_THROW(fisher_stefan_bound(0.0), DomainError);
  EXPECT_THROW(fisher_stefan_bound(-1.0), DomainError);
}
