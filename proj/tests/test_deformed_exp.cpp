#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "defdiv/deformed_exp.hpp"
#include "oracles.hpp"

using defdiv::DeformedExponential;

namespace {

std::vector<DeformedExponential> builtins() {
  return {DeformedExponential::classical(),      DeformedExponential::tsallis(0.5),
          DeformedExponential::tsallis(1.5),     DeformedExponential::tsallis(2.0),
          DeformedExponential::kaniadakis(0.25), DeformedExponential::kaniadakis(-0.5),
          DeformedExponential::kaniadakis(1.0),  DeformedExponential::counterexample()};
}

std::vector<double> grid(double a, double b, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
  return g;
}

}  // namespace

TEST(DeformedExp, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(DeformedExponential::classical().phi(1.0), std::exp(1.0));
  EXPECT_DOUBLE_EQ(DeformedExponential::tsallis(0.5).phi(2.0), 4.0);  // (1 + 0.5 * 2)^2
  EXPECT_DOUBLE_EQ(DeformedExponential::tsallis(0.5).phi(-3.0), 0.0);
  EXPECT_DOUBLE_EQ(DeformedExponential::tsallis(2.0).phi(0.5), 2.0);  // 1 / (1 - u)
  EXPECT_EQ(DeformedExponential::tsallis(2.0).phi(1.5), defdiv::kInf);
  EXPECT_NEAR(DeformedExponential::kaniadakis(0.5).inverse(4.0), 1.5, 1e-14);
  EXPECT_NEAR(DeformedExponential::counterexample().phi(0.0), std::exp(0.5), 1e-15);
  EXPECT_NEAR(DeformedExponential::counterexample().phi(1.0), std::exp(2.0), 1e-13);
  EXPECT_NEAR(DeformedExponential::counterexample().inverse_derivative(std::exp(0.5)), std::exp(-0.5), 1e-15);
}

TEST(DeformedExp, MatchesIndependentFormulas) {
  for (double u : grid(-5.0, 1.8, 69)) {
    for (double q : {0.0, 0.3, 0.5, 1.5})
      EXPECT_NEAR(DeformedExponential::tsallis(q).phi(u), oracle::exp_q(u, q), 1e-12 * (1 + oracle::exp_q(u, q)));
    for (double k : {-1.0, -0.5, 0.25, 0.5, 1.0})
      EXPECT_NEAR(DeformedExponential::kaniadakis(k).phi(u), oracle::exp_k(u, k), 1e-12 * oracle::exp_k(u, k));
  }
}

TEST(DeformedExp, Thresholds) {
  EXPECT_EQ(DeformedExponential::classical().threshold(), -defdiv::kInf);
  EXPECT_DOUBLE_EQ(DeformedExponential::tsallis(0.5).threshold(), -2.0);
  EXPECT_EQ(DeformedExponential::tsallis(2.0).threshold(), -defdiv::kInf);
  EXPECT_EQ(DeformedExponential::kaniadakis(0.5).threshold(), -defdiv::kInf);
}

TEST(DeformedExp, RejectsInvalidParameters) {
  EXPECT_THROW(DeformedExponential::tsallis(-0.1), std::invalid_argument);
  EXPECT_THROW(DeformedExponential::kaniadakis(1.5), std::invalid_argument);
  EXPECT_THROW((void)DeformedExponential::classical().inverse(0.0), std::domain_error);
  EXPECT_THROW((void)DeformedExponential::classical().inverse(-1.0), std::domain_error);
}

TEST(DeformedExp, InverseRoundTrip) {
  for (const auto& phi : builtins()) {
    for (double v : {1e-8, 1e-3, 0.1, 0.5, 1.0, 1.7, 10.0, 1e3}) {
      const double back = phi.phi(phi.inverse(v));
      EXPECT_NEAR(back, v, 1e-10 * std::max(1.0, v)) << phi.id() << " v=" << v;
    }
  }
}

TEST(DeformedExp, DerivativeMatchesFiniteDifference) {
  for (const auto& phi : builtins()) {
    for (double u : grid(-4.0, 0.9, 50)) {
      if (u == 0.0) continue;  // the counterexample's junction, checked separately
      const double h = 1e-6 * std::max(1.0, std::abs(u));
      const double fd = (phi.phi(u + h) - phi.phi(u - h)) / (2 * h);
      const double d = phi.derivative(u);
      if (d == 0.0) continue;
      EXPECT_NEAR(fd, d, 1e-6 * std::max(1e-8, std::abs(d))) << phi.id() << " u=" << u;
    }
  }
}

TEST(DeformedExp, InverseDerivativeIsReciprocal) {
  for (const auto& phi : builtins()) {
    for (double v : {0.01, 0.2, 0.9, 3.0}) {
      const double u = phi.inverse(v);
      EXPECT_NEAR(phi.inverse_derivative(v) * phi.derivative(u), 1.0, 1e-10) << phi.id();
    }
  }
}

TEST(DeformedExp, CounterexampleBranchesAgreeAtJunction) {
  const auto phi = DeformedExponential::counterexample();
  EXPECT_NEAR(phi.derivative(0.0), std::exp(0.5), 1e-12);
  EXPECT_NEAR(phi.derivative(-1e-9), phi.derivative(1e-9), 1e-8);
}

TEST(DeformedExp, ConvexAndIncreasingOnWideGrid) {
  const auto g = grid(-100.0, 100.0, 4001);
  for (const auto& phi : builtins()) {
    const auto rep = defdiv::validate_spec(phi, g);
    EXPECT_TRUE(rep.ok()) << phi.id() << " convexity=" << rep.convexity_violations.size()
                          << " monotone=" << rep.monotonicity_violations.size();
  }
}

TEST(DeformedExp, ValidateSpecFlagsNonConvexTable) {
  // log-linear interpolation through a concave profile
  const auto phi = DeformedExponential::tabulated({{0, 1}, {1, 10}, {2, 11}, {3, 11.5}});
  const auto rep = defdiv::validate_spec(phi, grid(0.0, 3.0, 61));
  EXPECT_FALSE(rep.convexity_violations.empty());
  EXPECT_TRUE(rep.monotonicity_violations.empty());
}

TEST(DeformedExp, QExponentialTendsToExp) {
  double prev = defdiv::kInf;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    double worst = 0.0;
    for (double u : grid(-3.0, 3.0, 61))
      worst = std::max(worst, std::abs(DeformedExponential::tsallis(1.0 - eps).phi(u) - std::exp(u)) / std::exp(u));
    EXPECT_LT(worst, prev);
    prev = worst;
  }
  EXPECT_LT(prev, 1e-3);
  EXPECT_DOUBLE_EQ(DeformedExponential::tsallis(1.0).phi(0.7), std::exp(0.7));
}

TEST(DeformedExp, KaniadakisSymmetricInKappa) {
  for (double u : grid(-10.0, 10.0, 41))
    EXPECT_NEAR(DeformedExponential::kaniadakis(0.5).phi(u), DeformedExponential::kaniadakis(-0.5).phi(u),
                1e-12 * DeformedExponential::kaniadakis(0.5).phi(u));
}

TEST(DeformedExp, TabulatedReproducesExpOnKnots) {
  std::vector<std::pair<double, double>> knots;
  for (double u : grid(-5.0, 5.0, 11)) knots.emplace_back(u, std::exp(u));
  const auto phi = DeformedExponential::tabulated(knots);
  // log-linear interpolation of e^u is exact everywhere
  for (double u : grid(-5.0, 5.0, 37)) EXPECT_NEAR(phi.phi(u), std::exp(u), 1e-12 * std::exp(u));
  EXPECT_NEAR(phi.inverse(std::exp(1.3)), 1.3, 1e-12);
  EXPECT_NEAR(phi.inverse_derivative(2.0), 0.5, 1e-6);
  EXPECT_EQ(phi.threshold(), -5.0);
  EXPECT_THROW((void)phi.phi(6.0), std::out_of_range);
  EXPECT_THROW((void)phi.inverse(1e6), std::domain_error);
}

TEST(DeformedExp, TabulatedValidation) {
  EXPECT_THROW(DeformedExponential::tabulated({{0, 1}}), defdiv::ValidationError);
  EXPECT_THROW(DeformedExponential::tabulated({{0, 1}, {0, 2}}), defdiv::ValidationError);
  EXPECT_THROW(DeformedExponential::tabulated({{0, 2}, {1, 1}}), defdiv::ValidationError);
  EXPECT_THROW(DeformedExponential::tabulated({{0, 0}, {1, 1}}), defdiv::ValidationError);
  const auto flat = DeformedExponential::tabulated({{0, 1}, {1, 2}, {2, 2}, {3, 4}});
  EXPECT_THROW((void)flat.inverse(2.0), std::domain_error);
}

TEST(DeformedExp, Identifiers) {
  EXPECT_EQ(DeformedExponential::tsallis(0.5).id(), "tsallis(q=0.5)");
  EXPECT_EQ(DeformedExponential::kaniadakis(-0.25).id(), "kaniadakis(kappa=-0.25)");
  EXPECT_EQ(DeformedExponential::counterexample().name(), "counterexample");
}
