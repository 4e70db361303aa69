#pragma once

// Normalization functional N(kappa) = int phi(a phi^{-1}(p) + (1-a) phi^{-1}(q) + kappa u0) dmu
// and the bracketed solver for N(kappa) = 1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "defdiv/core.hpp"
#include "defdiv/deformed_exp.hpp"
#include "defdiv/measures.hpp"

namespace defdiv {

enum class SolveStatus { Converged, DivergentIntegral, BracketFailure };

inline std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::DivergentIntegral: return "DivergentIntegral";
    case SolveStatus::BracketFailure: return "BracketFailure";
  }
  return "?";
}

struct KappaSolveResult {
  double alpha = 0.0;
  double kappa = 0.0;
  double residual = 0.0;  // N(kappa) - 1
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::BracketFailure;
  double last_finite_kappa = 0.0;    // largest probe with N finite
  double first_infinite_kappa = kInf;  // smallest probe with N = +inf
  bool locally_strict = true;        // N(kappa - h) < N(kappa + h) at the root
};

struct SolverOptions {
  double tol = 1e-12;
  double initial_hi = 1.0;
  double kappa_max = 1e6;
  int max_iterations = 4000;
};

inline std::vector<double> constant_u0(std::size_t n, double value = 1.0) {
  return std::vector<double>(n, value);
}

/// N(kappa) for fixed (phi, p, q, alpha, u0). The phi^{-1} interpolation is
/// computed once at construction.
class NormalizationFunctional {
 public:
  NormalizationFunctional(const DeformedExponential& phi, const ProbabilityPair& pair, double alpha,
                          std::span<const double> u0)
      : phi_(&phi), measure_(&pair.measure()), tail_(&pair.tail()), alpha_(alpha), u0_(u0.begin(), u0.end()) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
    if (u0.size() != pair.size())
      throw std::invalid_argument("u0 has " + std::to_string(u0.size()) + " values for " +
                                  std::to_string(pair.size()) + " atoms");
    for (std::size_t i = 0; i < u0.size(); ++i)
      if (!(u0[i] > 0.0) || !std::isfinite(u0[i]))
        throw std::invalid_argument("u0 must be positive and finite (atom " + std::to_string(i + 1) + ")");
    base_.resize(pair.size());
    for (std::size_t i = 0; i < base_.size(); ++i) {
      try {
        base_[i] = alpha * phi.inverse(pair.p()[i]) + (1.0 - alpha) * phi.inverse(pair.q()[i]);
      } catch (const std::exception& e) {
        throw std::domain_error("phi inverse failed at atom " + std::to_string(i + 1) + ": " + e.what());
      }
    }
  }

  double operator()(double kappa) const {
    if (!std::isfinite(kappa)) throw std::invalid_argument("kappa must be finite");
    Accumulator acc;
    for (std::size_t i = 0; i < base_.size(); ++i) {
      const double v = phi_->phi(base_[i] + kappa * u0_[i]);
      if (std::isinf(v)) return kInf;
      acc.add(measure_->weight(i) * v);
    }
    if (*tail_ && (*tail_)->normalization) {
      const double t = (*tail_)->normalization(alpha_, kappa);
      if (std::isinf(t)) return kInf;
      acc.add(t);
    }
    return acc.value();
  }

  [[nodiscard]] double alpha() const { return alpha_; }

 private:
  const DeformedExponential* phi_;
  const Measure* measure_;
  const std::optional<AnalyticTail>* tail_;
  double alpha_;
  std::vector<double> u0_;
  std::vector<double> base_;
};

inline double normalization_functional(const DeformedExponential& phi, const ProbabilityPair& pair, double alpha,
                                       std::span<const double> u0, double kappa) {
  return NormalizationFunctional(phi, pair, alpha, u0)(kappa);
}

/// Geometric bracket expansion from [0, initial_hi] followed by bisection.
inline KappaSolveResult solve_kappa(const DeformedExponential& phi, const ProbabilityPair& pair, double alpha,
                                    std::span<const double> u0, const SolverOptions& opt = {}) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("solve_kappa: alpha must lie in (0, 1)");
  if (!(opt.tol > 0.0)) throw std::invalid_argument("solve_kappa: tol must be positive");
  if (!(opt.initial_hi > 0.0)) throw std::invalid_argument("solve_kappa: initial bracket must be positive");
  if (!(opt.kappa_max > 0.0)) throw std::invalid_argument("solve_kappa: kappa_max must be positive");

  const NormalizationFunctional n(phi, pair, alpha, u0);
  KappaSolveResult r;
  r.alpha = alpha;

  auto probe = [&](double k) {
    const double v = n(k);
    if (std::isinf(v))
      r.first_infinite_kappa = std::min(r.first_infinite_kappa, k);
    else
      r.last_finite_kappa = std::max(r.last_finite_kappa, k);
    return v;
  };

  double lo = 0.0;
  double n_lo = probe(0.0);
  if (n_lo >= 1.0 - opt.tol) {
    // The bracket collapses at 0. N(0) > 1 cannot happen for a convex phi.
    r.kappa = 0.0;
    r.residual = n_lo - 1.0;
    r.status = std::abs(r.residual) <= opt.tol ? SolveStatus::Converged : SolveStatus::BracketFailure;
    return r;
  }

  double hi = std::min(opt.initial_hi, opt.kappa_max);
  double n_hi = probe(hi);
  while (n_hi < 1.0) {
    lo = hi;
    n_lo = n_hi;
    if (hi >= opt.kappa_max) {
      r.kappa = lo;
      r.residual = n_lo - 1.0;
      r.bracket_lo = lo;
      r.bracket_hi = hi;
      r.status = SolveStatus::BracketFailure;
      return r;
    }
    hi = std::min(2.0 * hi, opt.kappa_max);
    ++r.iterations;
    n_hi = probe(hi);
  }

  auto residual_ok = [&] {
    return std::abs(n_lo - 1.0) <= opt.tol || (std::isfinite(n_hi) && std::abs(n_hi - 1.0) <= opt.tol);
  };
  while (r.iterations < opt.max_iterations) {
    const bool narrow = hi - lo <= opt.tol * std::max(1.0, lo);
    if (narrow && (residual_ok() || std::isinf(n_hi))) break;
    const double mid = lo + (hi - lo) / 2.0;
    if (mid <= lo || mid >= hi) break;
    const double n_mid = probe(mid);
    ++r.iterations;
    if (n_mid >= 1.0) {
      hi = mid;
      n_hi = n_mid;
    } else {
      lo = mid;
      n_lo = n_mid;
    }
  }

  r.bracket_lo = lo;
  r.bracket_hi = hi;
  const double res_lo = n_lo - 1.0;
  const double res_hi = n_hi - 1.0;
  if (std::isinf(n_hi) && std::abs(res_lo) > opt.tol) {
    // N jumps from below 1 straight to +inf: no root exists.
    r.kappa = lo;
    r.residual = res_lo;
    r.status = SolveStatus::DivergentIntegral;
    return r;
  }
  if (std::isfinite(n_hi) && std::abs(res_hi) < std::abs(res_lo)) {
    r.kappa = hi;
    r.residual = res_hi;
  } else {
    r.kappa = lo;
    r.residual = res_lo;
  }
  r.status = std::abs(r.residual) <= opt.tol ? SolveStatus::Converged : SolveStatus::BracketFailure;
  if (r.status == SolveStatus::Converged) {
    const double h = std::max(1e-8, 1e-6 * r.kappa);
    r.locally_strict = n(r.kappa + h) > n(std::max(0.0, r.kappa - h));
  }
  return r;
}

}  // namespace defdiv
