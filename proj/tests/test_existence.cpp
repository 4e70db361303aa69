#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "defdiv/existence.hpp"
#include "defdiv/kappa_solver.hpp"
#include "oracles.hpp"

using defdiv::DeformedExponential;
using defdiv::Verdict;

namespace {

std::vector<double> grid(double a, double b, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
  return g;
}

std::vector<double> geometric_lambdas(double first, double r, int n) {
  std::vector<double> l;
  for (int i = 0; i < n; ++i) l.push_back(first * std::pow(r, i));
  return l;
}

}  // namespace

TEST(RatioProbe, ClassicalIsBoundedEverywhere) {
  const auto rep = defdiv::ratio_limsup_probe(DeformedExponential::classical(), 1.0, 100.0);
  ASSERT_EQ(rep.verdict, Verdict::Bounded);
  EXPECT_NEAR(rep.K, std::exp(1.0), 1e-12);
  EXPECT_EQ(rep.c, -defdiv::kInf);
  EXPECT_NEAR(rep.alpha_used, std::exp(-1.0), 1e-12);
}

TEST(RatioProbe, CounterexampleIsUnbounded) {
  const auto rep = defdiv::ratio_limsup_probe(DeformedExponential::counterexample(), 1.0, 100.0, 1e12);
  EXPECT_EQ(rep.verdict, Verdict::Unbounded);
  EXPECT_EQ(rep.sup_estimate, defdiv::kInf);
}

TEST(RatioProbe, KaniadakisTailMatchesPowerLaw) {
  const auto rep = defdiv::ratio_limsup_probe(DeformedExponential::kaniadakis(0.5), 1.0, 100.0);
  ASSERT_EQ(rep.verdict, Verdict::Bounded);
  // exp_k(u) ~ (2 k u)^(1/k) for large u
  const double u = rep.u_samples.back();
  EXPECT_NEAR(rep.tail_ratio, std::pow(u / (u - 1.0), 2.0), 1e-3);
  EXPECT_GE(rep.K, rep.tail_ratio);
}

TEST(RatioProbe, TsallisBelowOneBoundedFromZero) {
  const auto rep = defdiv::ratio_limsup_probe(DeformedExponential::tsallis(0.5), 1.0, 100.0);
  ASSERT_EQ(rep.verdict, Verdict::Bounded);
  EXPECT_NEAR(rep.K, 4.0, 1e-9);  // (1 + u/2)^2 / (1 + (u-1)/2)^2 at u = 0
  EXPECT_DOUBLE_EQ(rep.c, 0.0);
}

TEST(RatioProbe, TsallisAboveOneHitsItsPole) {
  // exp_2(u) = 1 / (1 - u) is +inf from u = 1 on, so the ratio is unbounded
  // on any grid that reaches past the pole.
  const auto rep = defdiv::ratio_limsup_probe(DeformedExponential::tsallis(2.0), 1.0, 100.0);
  EXPECT_EQ(rep.verdict, Verdict::Unbounded);
}

TEST(RatioProbe, InvalidArguments) {
  EXPECT_THROW(defdiv::ratio_limsup_probe(DeformedExponential::classical(), 0.0, 10.0), std::invalid_argument);
  EXPECT_THROW(defdiv::ratio_limsup_probe(DeformedExponential::classical(), 1.0, defdiv::kInf),
               std::invalid_argument);
}

TEST(RatioProbe, BoundedImpliesPointwiseInequality) {
  for (const auto& phi : {DeformedExponential::classical(), DeformedExponential::tsallis(0.5),
                          DeformedExponential::kaniadakis(0.5), DeformedExponential::kaniadakis(-1.0)}) {
    for (double lambda0 : {0.5, 1.0, 2.0}) {
      const auto rep = defdiv::ratio_limsup_probe(phi, lambda0, 200.0);
      ASSERT_EQ(rep.verdict, Verdict::Bounded) << phi.id();
      std::vector<double> us;
      for (double u : rep.u_samples)
        if (u >= rep.c) us.push_back(u);
      const auto ev = defdiv::pointwise_inequality_probe(phi, 1.0 / rep.K, lambda0, us);
      EXPECT_TRUE(ev.holds) << phi.id() << " lambda0=" << lambda0 << " c_found=" << ev.c_found;
    }
  }
}

TEST(InequalityProbe, ClassicalExamples) {
  const auto g = grid(-50.0, 50.0, 1001);
  const auto ok = defdiv::pointwise_inequality_probe(DeformedExponential::classical(), std::exp(-1.0), 1.0, g);
  EXPECT_TRUE(ok.holds);
  EXPECT_EQ(ok.c_found, -defdiv::kInf);
  const auto bad = defdiv::pointwise_inequality_probe(DeformedExponential::classical(), 0.5, 1.0, g);
  EXPECT_FALSE(bad.holds);
  EXPECT_EQ(bad.c_found, 50.0);
}

TEST(InequalityProbe, CounterexampleViolatesAtGridEdge) {
  for (double umax : {20.0, 60.0, 150.0}) {
    const auto ev =
        defdiv::pointwise_inequality_probe(DeformedExponential::counterexample(), 0.01, 1.0, grid(-10, umax, 501));
    EXPECT_EQ(ev.c_found, umax);
  }
}

TEST(Kaniadakis, ClosedFormMinimumAndCertificate) {
  for (double k : {-1.0, -0.5, -0.25, 0.25, 0.5, 1.0}) {
    for (double a : {0.1, 0.25, 0.5, 0.9}) {
      const auto c = defdiv::verify_kaniadakis_u0(k, a);
      ASSERT_TRUE(c.unimodal) << k << " " << a;
      EXPECT_NEAR(c.v0, 1.0 / std::sqrt(a), 1e-8 * c.v0);
      EXPECT_NEAR(c.lambda, oracle::kaniadakis_lambda(k, a), 1e-12);
      EXPECT_EQ(c.n, static_cast<int>(std::ceil(1.0 / oracle::kaniadakis_lambda(k, a))));
      EXPECT_TRUE(c.check);
      EXPECT_TRUE(c.step_check);
    }
  }
}

TEST(Kaniadakis, WorkedValue) {
  const auto c = defdiv::verify_kaniadakis_u0(0.5, 0.25);
  EXPECT_NEAR(c.v0, 2.0, 1e-12);
  EXPECT_NEAR(c.lambda, std::sqrt(2.0), 1e-12);
  EXPECT_EQ(c.n, 1);
}

TEST(Envelope, HoldsForBoundedFamilies) {
  const auto vs = grid(0.0, 20.0, 81);
  for (const auto& phi : {DeformedExponential::classical(), DeformedExponential::tsallis(0.5),
                          DeformedExponential::kaniadakis(0.5)}) {
    const auto rep = defdiv::ratio_limsup_probe(phi, 1.0, 200.0);
    ASSERT_EQ(rep.verdict, Verdict::Bounded);
    const double lo = std::isfinite(rep.c) ? rep.c : -50.0;
    const auto ev = defdiv::growth_envelope_check(phi, rep.K, 1.0, rep.c, grid(lo, 100.0, 301), vs);
    EXPECT_TRUE(ev.holds) << phi.id() << " worst=" << ev.worst_log_excess;
    EXPECT_GT(ev.checked, 0u);
  }
}

TEST(Envelope, FailsForCounterexample) {
  const auto ev = defdiv::growth_envelope_check(DeformedExponential::counterexample(), 1e6, 1.0, 0.0,
                                                grid(0.0, 100.0, 201), grid(0.0, 20.0, 41));
  EXPECT_FALSE(ev.holds);
  EXPECT_FALSE(ev.counterexamples.empty());
}

TEST(Construction, CertificateAndInequalityForBuiltins) {
  const auto lambdas = geometric_lambdas(2.0, 0.7, 60);
  for (const auto& phi : {DeformedExponential::classical(), DeformedExponential::tsallis(0.5),
                          DeformedExponential::tsallis(2.0), DeformedExponential::kaniadakis(0.5),
                          DeformedExponential::counterexample()}) {
    const auto c = defdiv::construct_u0_sequence(phi, 0.1, lambdas, 1.0);
    EXPECT_TRUE(c.complete) << phi.id() << ": " << c.note;
    EXPECT_TRUE(c.certificate_holds()) << phi.id();
    EXPECT_GT(c.epsilon, 0.0);
    for (std::size_t i = 1; i < c.u0_sequence.size(); ++i) EXPECT_LT(c.u0_sequence[i], c.u0_sequence[i - 1]);
    EXPECT_EQ(defdiv::sequence_inequality_violations(phi, c), 0u) << phi.id();
  }
}

TEST(Construction, ClassicalSetIsEmptyWhileAlphaBelowShiftFactor) {
  // alpha e^u > e^{u - lambda} never holds once alpha <= e^-lambda
  const auto c = defdiv::construct_u0_sequence(DeformedExponential::classical(), 0.1,
                                               geometric_lambdas(2.0, 0.5, 20), 1.0);
  for (double ct : c.c_tilde) EXPECT_EQ(ct, -defdiv::kInf);
}

TEST(Construction, TsallisSetHugsThreshold) {
  // Just above a = -2, phi(u - lambda) = 0, so c~_n >= a + lambda_n.
  const auto lambdas = geometric_lambdas(2.0, 0.7, 30);
  const auto c = defdiv::construct_u0_sequence(DeformedExponential::tsallis(0.5), 0.1, lambdas, 1.0);
  for (std::size_t n = 0; n < lambdas.size(); ++n) EXPECT_GE(c.c_tilde[n], -2.0 + lambdas[n]);
}

TEST(Construction, RejectsBadInputs) {
  const auto phi = DeformedExponential::classical();
  const std::vector<double> up{0.1, 0.2};
  EXPECT_THROW(defdiv::construct_u0_sequence(phi, 0.1, up, 1.0), std::invalid_argument);
  // alpha e^eta < e^{eta - 1} fails for every eta when alpha > 1/e
  const std::vector<double> ok{1.0, 0.5};
  EXPECT_THROW(defdiv::construct_u0_sequence(phi, 0.5, ok, 1.0), std::invalid_argument);
  defdiv::ConstructionOptions opt;
  opt.eta = -1.5;  // phi(eta - 1) = 0 below the Tsallis threshold
  EXPECT_THROW(defdiv::construct_u0_sequence(DeformedExponential::tsallis(0.5), 0.1, ok, 1.0, opt),
               std::invalid_argument);
}

TEST(Construction, ShiftedSumsStayFinite) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> ua(0.05, 0.5), ur(0.2, 0.6);
  const auto lambdas = geometric_lambdas(2.0, 0.7, 60);
  for (const auto& phi : {DeformedExponential::classical(), DeformedExponential::kaniadakis(0.5),
                          DeformedExponential::counterexample()}) {
    const auto c = defdiv::construct_u0_sequence(phi, 0.1, lambdas, 1.0);
    for (int t = 0; t < 3; ++t) {
      const double a = ua(rng), r = ur(rng);
      defdiv::TruncatedSequence s;
      const auto n = c.u0_sequence.size();
      for (std::size_t i = 1; i <= n; ++i) s.values.push_back(phi.inverse(a * std::pow(r, i)));
      s.tail_phi_bound = a * std::pow(r, n + 1) / (1.0 - r);
      for (double lambda : {0.5, 1.0, 2.0}) {
        const auto cert = defdiv::shifted_sum_certificate(phi, c, s, lambda);
        EXPECT_TRUE(cert.finite()) << phi.id() << " lambda=" << lambda;
      }
    }
  }
}

TEST(Demo, ColumnsBehaveAsPredicted) {
  const auto d = defdiv::adversarial_nonexistence_demo(1.0, 60);
  ASSERT_EQ(d.rows.size(), 60u);
  EXPECT_EQ(d.scale, 1.0);
  EXPECT_LE(std::abs(1.0L - d.rows.back().base_partial), std::ldexp(1.0L, -60));
  for (const auto& r : d.rows) {
    const double expect = std::pow(std::exp(1.0) / 2.0, r.n) * std::exp(1.5);
    EXPECT_NEAR(r.shifted_term, expect, 1e-9 * expect);
  }
  EXPECT_GT(d.rows[49].shifted_partial, 1e6);
  EXPECT_TRUE(d.diverges);
}

TEST(Demo, SmallLambdaRescalesPieces) {
  const auto d = defdiv::adversarial_nonexistence_demo(0.1, 40);
  EXPECT_NEAR(d.scale, 10.0, 1e-12);
  EXPECT_NEAR(d.certified_lambda_min, std::log(2.0) / 10.0, 1e-15);
  EXPECT_TRUE(d.diverges);
  EXPECT_THROW(defdiv::adversarial_nonexistence_demo(1.0, 5), std::invalid_argument);
}

TEST(Demo, AdversarialPairHasNoKappa) {
  const auto phi = DeformedExponential::counterexample();
  for (double lambda : {1.0, 0.3}) {
    const auto pair = defdiv::adversarial_pair(defdiv::adversarial_nonexistence_demo(lambda, 60));
    for (double a : {0.25, 0.5, 0.75}) {
      const auto u0 = defdiv::constant_u0(pair.size());
      EXPECT_LT(defdiv::normalization_functional(phi, pair, a, u0, 0.0), 1.0);
      EXPECT_EQ(defdiv::solve_kappa(phi, pair, a, u0).status, defdiv::SolveStatus::DivergentIntegral);
    }
  }
}
