#pragma once

// Generalized Renyi divergence kappa(alpha) / (alpha (1 - alpha)), the
// phi-divergence, and the classical quantities they reduce to.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "defdiv/core.hpp"
#include "defdiv/deformed_exp.hpp"
#include "defdiv/kappa_solver.hpp"
#include "defdiv/measures.hpp"

namespace defdiv {

struct DivergenceReport {
  double alpha = 0.0;
  double kappa = 0.0;
  double value = 0.0;  // +inf when kappa does not exist, NaN on bracket failure
  std::string family;
  std::string u0_id;
  SolveStatus status = SolveStatus::BracketFailure;
  KappaSolveResult solve;
};

inline DivergenceReport generalized_renyi(const DeformedExponential& phi, const ProbabilityPair& pair, double alpha,
                                          std::span<const double> u0, std::string u0_id = "const:1",
                                          const SolverOptions& opt = {}) {
  DivergenceReport rep;
  rep.alpha = alpha;
  rep.family = phi.id();
  rep.u0_id = std::move(u0_id);
  rep.solve = solve_kappa(phi, pair, alpha, u0, opt);
  rep.kappa = rep.solve.kappa;
  rep.status = rep.solve.status;
  switch (rep.status) {
    case SolveStatus::Converged: rep.value = rep.kappa / (alpha * (1.0 - alpha)); break;
    case SolveStatus::DivergentIntegral: rep.value = kInf; break;
    case SolveStatus::BracketFailure: rep.value = std::nan(""); break;
  }
  return rep;
}

namespace detail {
inline void require_untailed(const ProbabilityPair& pair, const char* what) {
  if (pair.tail()) throw std::invalid_argument(std::string(what) + ": pair carries an analytic tail");
}
}  // namespace detail

/// -log(int p^alpha q^(1-alpha) dmu) / (alpha (1 - alpha)).
inline double classical_renyi(const ProbabilityPair& pair, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("classical_renyi: alpha must lie in (0, 1)");
  detail::require_untailed(pair, "classical_renyi");
  std::vector<double> f(pair.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = std::exp(alpha * std::log(pair.p()[i]) + (1.0 - alpha) * std::log(pair.q()[i]));
  return -std::log(integrate(pair.measure(), f)) / (alpha * (1.0 - alpha));
}

/// ln_q(x) = (x^(1-q) - 1) / (1 - q), with ln_1 = ln.
inline double q_logarithm(double x, double q) {
  if (!(x > 0.0)) throw std::domain_error("q_logarithm: x must be positive");
  if (q == 1.0) return std::log(x);
  return std::expm1((1.0 - q) * std::log(x)) / (1.0 - q);
}

inline double kl_divergence(const ProbabilityPair& pair) {
  detail::require_untailed(pair, "kl_divergence");
  std::vector<double> f(pair.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = pair.p()[i] * std::log(pair.p()[i] / pair.q()[i]);
  return integrate(pair.measure(), f);
}

/// int p ln_q(p / q) dmu.
inline double tsallis_relative_entropy(const ProbabilityPair& pair, double q_param) {
  if (q_param == 1.0) throw std::invalid_argument("tsallis_relative_entropy: q must differ from 1");
  detail::require_untailed(pair, "tsallis_relative_entropy");
  std::vector<double> f(pair.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = pair.p()[i] * q_logarithm(pair.p()[i] / pair.q()[i], q_param);
  return integrate(pair.measure(), f);
}

inline double shannon_entropy(const Measure& m, std::span<const double> p) {
  std::vector<double> f(p.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = -p[i] * std::log(p[i]);
  return integrate(m, f);
}

inline double tsallis_entropy(const Measure& m, std::span<const double> p, double q_param) {
  if (q_param == 1.0) return shannon_entropy(m, p);
  std::vector<double> f(p.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::pow(p[i], q_param);
  return (1.0 - integrate(m, f)) / (q_param - 1.0);
}

struct PhiDivergenceError : std::runtime_error {
  enum class Part { Numerator, Denominator };
  PhiDivergenceError(Part which, const std::string& msg) : std::runtime_error(msg), part(which) {}
  Part part;
};

/// int (phi^{-1}(p) - phi^{-1}(q)) / (phi^{-1})'(p) dmu  over  int u0 / (phi^{-1})'(p) dmu.
inline double phi_divergence(const DeformedExponential& phi, const ProbabilityPair& pair,
                             std::span<const double> u0) {
  detail::require_untailed(pair, "phi_divergence");
  if (u0.size() != pair.size()) throw std::invalid_argument("phi_divergence: u0 length mismatch");
  std::vector<double> num(pair.size());
  std::vector<double> den(pair.size());
  for (std::size_t i = 0; i < num.size(); ++i) {
    const double p = pair.p()[i];
    const double q = pair.q()[i];
    const double d = phi.inverse_derivative(p);
    num[i] = p == q ? 0.0 : (phi.inverse(p) - phi.inverse(q)) / d;
    den[i] = u0[i] / d;
  }
  const double n = integrate(pair.measure(), num);
  const double d = integrate(pair.measure(), den);
  if (!std::isfinite(n))
    throw PhiDivergenceError(PhiDivergenceError::Part::Numerator, "phi_divergence: numerator integral diverges");
  if (!std::isfinite(d) || !(d > 0.0))
    throw PhiDivergenceError(PhiDivergenceError::Part::Denominator,
                             "phi_divergence: denominator integral diverges or vanishes");
  return n / d;
}

struct LimitTableRow {
  double alpha = 0.0;
  double kappa = 0.0;
  double value = 0.0;
  SolveStatus status = SolveStatus::BracketFailure;
};

struct LimitEstimate {
  int endpoint = 1;
  double estimate = 0.0;
  bool converged = true;  // successive differences shrink and every solve converged
  std::vector<LimitTableRow> table;
};

/// alpha_k = 2^-k (endpoint 0) or 1 - 2^-k (endpoint 1) for k = k_min..k_max.
inline std::vector<double> dyadic_alpha_sequence(int endpoint, int k_min = 4, int k_max = 14) {
  std::vector<double> a;
  for (int k = k_min; k <= k_max; ++k) {
    const double h = std::ldexp(1.0, -k);
    a.push_back(endpoint == 0 ? h : 1.0 - h);
  }
  return a;
}

/// Endpoint limit of the generalized Renyi divergence along alpha_sequence,
/// with a single linear (Richardson) extrapolation step from the last two rows.
inline LimitEstimate limit_divergence(const DeformedExponential& phi, const ProbabilityPair& pair,
                                      std::span<const double> u0, int endpoint,
                                      std::span<const double> alpha_sequence, const SolverOptions& opt = {}) {
  if (endpoint != 0 && endpoint != 1) throw std::invalid_argument("limit_divergence: endpoint must be 0 or 1");
  if (alpha_sequence.size() < 2) throw std::invalid_argument("limit_divergence: need at least two alphas");
  const double e = endpoint;
  for (std::size_t i = 0; i < alpha_sequence.size(); ++i) {
    const double a = alpha_sequence[i];
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("limit_divergence: alphas must lie in (0, 1)");
    if (i > 0 && !(std::abs(e - a) < std::abs(e - alpha_sequence[i - 1])))
      throw std::invalid_argument("limit_divergence: alpha sequence must move monotonically toward the endpoint");
  }

  LimitEstimate out;
  out.endpoint = endpoint;
  for (double a : alpha_sequence) {
    const auto r = generalized_renyi(phi, pair, a, u0, "", opt);
    out.table.push_back({a, r.kappa, r.value, r.status});
    if (r.status != SolveStatus::Converged) out.converged = false;
  }
  if (!out.converged) {
    out.estimate = std::nan("");
    return out;
  }
  const auto& t = out.table;
  const std::size_t n = t.size();
  const double h_last = std::abs(e - t[n - 1].alpha);
  const double h_prev = std::abs(e - t[n - 2].alpha);
  out.estimate = t[n - 1].value + (t[n - 1].value - t[n - 2].value) * h_last / (h_prev - h_last);

  const double floor = 1e-9 * std::max(1.0, std::abs(t[n - 1].value));
  for (std::size_t i = 2; i < n; ++i) {
    const double d_prev = std::abs(t[i - 1].value - t[i - 2].value);
    const double d_cur = std::abs(t[i].value - t[i - 1].value);
    if (d_cur > d_prev + floor) out.converged = false;
  }
  return out;
}

/// Worker count from DEFORMED_DIV_THREADS, else hardware concurrency.
inline unsigned sweep_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DEFORMED_DIV_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return n;
}

/// Generalized Renyi divergence over an alpha grid. Rows come back in input
/// order regardless of the number of workers.
inline std::vector<DivergenceReport> divergence_sweep(const DeformedExponential& phi, const ProbabilityPair& pair,
                                                      std::span<const double> u0, std::span<const double> alphas,
                                                      const std::string& u0_id, const SolverOptions& opt = {},
                                                      unsigned threads = sweep_threads()) {
  for (double a : alphas)
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("divergence_sweep: alphas must lie in (0, 1)");
  (void)NormalizationFunctional(phi, pair, 0.5, u0);  // surface input errors before spawning workers
  std::vector<DivergenceReport> rows(alphas.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < alphas.size(); i = next++)
      rows[i] = generalized_renyi(phi, pair, alphas[i], u0, u0_id, opt);
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(alphas.size())));
  if (threads == 1) {
    work();
    return rows;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  return rows;
}

}  // namespace defdiv
