#pragma once

// Executable forms of the u0-existence criteria: the limsup ratio probe, the
// pointwise inequality probe, the Kaniadakis certificate, the growth envelope,
// the constructive u0 sequence for the counting measure, and the adversarial
// non-existence harness for the counterexample phi.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "defdiv/core.hpp"
#include "defdiv/deformed_exp.hpp"
#include "defdiv/measures.hpp"

namespace defdiv {

enum class Verdict { Bounded, Unbounded, Inconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Bounded: return "Bounded";
    case Verdict::Unbounded: return "Unbounded";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

namespace detail {

// a <= b up to a relative slack; used for every log-space comparison below.
inline bool log_leq(double a, double b) {
  if (a == -kInf) return true;
  if (b == kInf) return true;
  if (a == kInf || b == -kInf) return false;
  return a <= b + 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

inline bool in_domain(const DeformedExponential& phi, double u) {
  const auto [lo, hi] = phi.domain();
  return u >= lo && u <= hi;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// limsup_{u -> inf} phi(u) / phi(u - lambda0)

struct ConditionProbeReport {
  double lambda0 = 0.0;
  std::vector<double> u_samples;      // every sample with phi(u - lambda0) > 0
  std::vector<double> ratio_samples;  // phi(u) / phi(u - lambda0), +inf past a pole
  double sup_estimate = 0.0;          // running sup over the tail, +inf when unbounded
  Verdict verdict = Verdict::Inconclusive;
  double K = std::nan("");            // Bounded only
  double c = std::nan("");            // Bounded only; -inf when the bound holds on the whole grid
  double tail_start = 0.0;            // left edge of the region that decides the verdict
  double tail_ratio = std::nan("");   // ratio at the last sample
  double alpha_used = std::nan("");   // 1 / K
  double epsilon_used = std::nan("");
};

struct RatioProbeOptions {
  double u_max = 200.0;
  double threshold = 1e12;
  double stabilization = 1e-6;  // relative change of the running sup over the last decade
  double linear_half_width = 10.0;
  std::size_t linear_points = 2001;
  double geometric_factor = 1.01;
};

/// Linear grid on [-w, w] extended geometrically out to +-u_max.
inline std::vector<double> probe_grid(double u_max, double half_width, std::size_t linear_points, double factor) {
  const double w = std::min(half_width, u_max);
  std::vector<double> g;
  for (double x = u_max; x > w; x /= factor) g.push_back(-x);
  for (std::size_t i = 0; i < linear_points; ++i)
    g.push_back(-w + 2.0 * w * static_cast<double>(i) / static_cast<double>(linear_points - 1));
  std::vector<double> right;
  for (double x = u_max; x > w; x /= factor) right.push_back(x);
  g.insert(g.end(), right.rbegin(), right.rend());
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

inline ConditionProbeReport ratio_limsup_probe(const DeformedExponential& phi, double lambda0,
                                               const RatioProbeOptions& opt = {}) {
  if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) throw std::invalid_argument("ratio probe: lambda0 must be > 0");
  if (!(opt.u_max > lambda0) || !std::isfinite(opt.u_max))
    throw std::invalid_argument("ratio probe: u_max must be finite and exceed lambda0");
  if (!(opt.threshold > 1.0)) throw std::invalid_argument("ratio probe: threshold must exceed 1");

  ConditionProbeReport rep;
  rep.lambda0 = lambda0;
  std::vector<double> log_ratio;
  for (double u : probe_grid(opt.u_max, opt.linear_half_width, opt.linear_points, opt.geometric_factor)) {
    if (!detail::in_domain(phi, u) || !detail::in_domain(phi, u - lambda0)) continue;
    const double den = phi.log_phi(u - lambda0);
    if (den == -kInf) continue;
    const double num = phi.log_phi(u);
    const double lr = (num == kInf) ? kInf : num - den;
    rep.u_samples.push_back(u);
    log_ratio.push_back(lr);
    rep.ratio_samples.push_back(std::exp(lr));
  }
  if (rep.u_samples.empty()) throw std::domain_error("ratio probe: phi(u - lambda0) vanishes on the whole grid");

  const double a = phi.threshold();
  rep.tail_start = std::isfinite(a) ? std::max(0.0, a + lambda0 + 1.0) : 0.0;
  rep.tail_start = std::min(rep.tail_start, rep.u_samples.back());
  rep.tail_ratio = rep.ratio_samples.back();

  const double log_threshold = std::log(opt.threshold);
  const double decade_start = std::max(rep.tail_start, rep.u_samples.back() / 10.0);
  double run_max = -kInf;
  double max_at_decade = -kInf;
  for (std::size_t i = 0; i < rep.u_samples.size(); ++i) {
    if (rep.u_samples[i] < rep.tail_start) continue;
    if (log_ratio[i] > log_threshold) {
      rep.verdict = Verdict::Unbounded;
      rep.sup_estimate = kInf;
      return rep;
    }
    run_max = std::max(run_max, log_ratio[i]);
    if (rep.u_samples[i] <= decade_start) max_at_decade = run_max;
  }
  if (max_at_decade == -kInf) max_at_decade = run_max;
  rep.sup_estimate = std::exp(run_max);
  const double sup_decade = std::exp(max_at_decade);
  if ((rep.sup_estimate - sup_decade) / sup_decade >= opt.stabilization) return rep;  // Inconclusive

  rep.verdict = Verdict::Bounded;
  rep.K = std::max(1.0, rep.sup_estimate);
  rep.alpha_used = 1.0 / rep.K;
  const double log_k = std::log(rep.K);
  std::size_t first = rep.u_samples.size();
  for (std::size_t i = rep.u_samples.size(); i-- > 0;) {
    if (!detail::log_leq(log_ratio[i], log_k)) break;
    first = i;
  }
  const bool whole_grid = first == 0 && !std::isfinite(a) && !std::isfinite(phi.domain().first);
  rep.c = whole_grid ? -kInf : rep.u_samples[first];
  return rep;
}

inline ConditionProbeReport ratio_limsup_probe(const DeformedExponential& phi, double lambda0, double u_max,
                                               double threshold = 1e12) {
  RatioProbeOptions opt;
  opt.u_max = u_max;
  opt.threshold = threshold;
  return ratio_limsup_probe(phi, lambda0, opt);
}

// ---------------------------------------------------------------------------
// alpha phi(u) <= phi(u - u0) for all u >= c

struct InequalityEvidence {
  double c_found = -kInf;  // largest grid point violating the inequality, -inf if none
  bool holds = true;       // no violation on the grid
  std::size_t violations = 0;
  std::size_t checked = 0;
};

inline InequalityEvidence pointwise_inequality_probe(const DeformedExponential& phi, double alpha, double u0_value,
                                                     std::span<const double> u_grid) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("inequality probe: alpha must lie in (0, 1)");
  if (!(u0_value > 0.0)) throw std::invalid_argument("inequality probe: u0 must be positive");
  const double log_alpha = std::log(alpha);
  InequalityEvidence ev;
  for (double u : u_grid) {
    if (!detail::in_domain(phi, u) || !detail::in_domain(phi, u - u0_value)) continue;
    const double lhs = phi.log_phi(u);
    const double rhs = phi.log_phi(u - u0_value);
    if (lhs == kInf && rhs == kInf) continue;  // both past a pole
    ++ev.checked;
    if (!detail::log_leq(log_alpha + lhs, rhs)) {
      ++ev.violations;
      ev.c_found = std::max(ev.c_found, u);
    }
  }
  ev.holds = ev.violations == 0;
  return ev;
}

// ---------------------------------------------------------------------------
// Kaniadakis: lambda <= log_k(v) - log_k(alpha v) for all v > 0

struct KaniadakisCertificate {
  double kappa = 0.0;
  double alpha = 0.0;
  double v0 = 0.0;           // numeric minimizer
  double v0_closed_form = 0.0;  // (1/alpha)^(1/2)
  double lambda = 0.0;       // minimum value
  int n = 0;                 // ceil(1 / lambda)
  bool unimodal = false;
  bool step_check = false;   // alpha exp_k(u) <= exp_k(u - lambda) on the grid
  bool check = false;        // alpha^n exp_k(u) <= exp_k(u - 1) on the grid
  std::size_t grid_points = 0;
};

inline KaniadakisCertificate verify_kaniadakis_u0(double kappa, double alpha, double u_lo = -50.0,
                                                  double u_hi = 50.0, std::size_t grid_points = 10000) {
  if (kappa == 0.0) throw std::invalid_argument("kaniadakis certificate: kappa must be non-zero");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("kaniadakis certificate: alpha must lie in (0, 1)");
  const auto phi = DeformedExponential::kaniadakis(kappa);

  KaniadakisCertificate cert;
  cert.kappa = kappa;
  cert.alpha = alpha;
  cert.v0_closed_form = std::sqrt(1.0 / alpha);

  // d/dv [log_k(v) - log_k(alpha v)] as a function of t = ln v.
  auto slope = [&](double t) {
    const double v = std::exp(t);
    return phi.inverse_derivative(v) - alpha * phi.inverse_derivative(alpha * v);
  };
  auto gap = [&](double v) { return phi.inverse(v) - phi.inverse(alpha * v); };

  const int samples = 601;
  const double t_lo = -30.0, t_hi = 30.0;
  int sign_changes = 0;
  double bracket_lo = 0.0, bracket_hi = 0.0;
  double prev_t = t_lo;
  double prev = slope(t_lo);
  for (int i = 1; i < samples; ++i) {
    const double t = t_lo + (t_hi - t_lo) * i / (samples - 1);
    const double s = slope(t);
    if ((prev < 0.0) != (s < 0.0)) {
      ++sign_changes;
      bracket_lo = prev_t;
      bracket_hi = t;
    }
    prev = s;
    prev_t = t;
  }
  cert.unimodal = sign_changes == 1 && slope(t_lo) < 0.0 && slope(t_hi) > 0.0;
  if (!cert.unimodal) return cert;

  for (int it = 0; it < 200 && bracket_hi - bracket_lo > 0.0; ++it) {
    const double mid = 0.5 * (bracket_lo + bracket_hi);
    if (mid <= bracket_lo || mid >= bracket_hi) break;
    (slope(mid) < 0.0 ? bracket_lo : bracket_hi) = mid;
  }
  cert.v0 = std::exp(0.5 * (bracket_lo + bracket_hi));
  cert.lambda = gap(cert.v0);
  cert.n = static_cast<int>(std::ceil(1.0 / cert.lambda));

  const double log_alpha = std::log(alpha);
  cert.grid_points = grid_points;
  cert.check = true;
  cert.step_check = true;
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double u = u_lo + (u_hi - u_lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    const double lp = phi.log_phi(u);
    if (!detail::log_leq(cert.n * log_alpha + lp, phi.log_phi(u - 1.0))) cert.check = false;
    if (!detail::log_leq(log_alpha + lp, phi.log_phi(u - cert.lambda))) cert.step_check = false;
  }
  return cert;
}

// ---------------------------------------------------------------------------
// phi(u + v) <= K phi(u) e^{lambda v},  lambda = log(K) / lambda0

struct EnvelopeEvidence {
  bool holds = true;
  double lambda = 0.0;
  std::size_t checked = 0;
  std::vector<std::pair<double, double>> counterexamples;  // (u, v), capped
  double worst_log_excess = -kInf;
};

inline EnvelopeEvidence growth_envelope_check(const DeformedExponential& phi, double K, double lambda0, double c,
                                              std::span<const double> u_grid, std::span<const double> v_grid) {
  if (!(K >= 1.0) || !std::isfinite(K)) throw std::invalid_argument("growth envelope: K must be finite and >= 1");
  if (!(lambda0 > 0.0)) throw std::invalid_argument("growth envelope: lambda0 must be positive");
  EnvelopeEvidence ev;
  ev.lambda = std::log(K) / lambda0;
  const double log_k = std::log(K);
  for (double u : u_grid) {
    if (u < c || !detail::in_domain(phi, u)) continue;
    const double lu = phi.log_phi(u);
    for (double v : v_grid) {
      if (v < 0.0 || !detail::in_domain(phi, u + v)) continue;
      const double lhs = phi.log_phi(u + v);
      const double rhs = log_k + lu + ev.lambda * v;
      ++ev.checked;
      if (!detail::log_leq(lhs, rhs)) {
        ev.holds = false;
        ev.worst_log_excess = std::max(ev.worst_log_excess, lhs - rhs);
        if (ev.counterexamples.size() < 32) ev.counterexamples.emplace_back(u, v);
      }
    }
  }
  return ev;
}

// ---------------------------------------------------------------------------
// Constructive u0 for the counting measure on N.

struct U0Construction {
  std::vector<double> u0_sequence;           // lambda_{n_i}
  std::vector<double> c_sequence;            // c_i = c~_{n_i}; -inf when the scanned set is empty
  std::vector<double> phi_c_bounds;          // upper bound on phi(c_i) (includes the scan floor)
  std::vector<std::size_t> selected_indices;  // n_i, 1-based into the lambda sequence
  std::vector<double> c_tilde;               // c~_n for every supplied lambda_n
  double alpha = 0.0;
  double eta = 0.0;
  double epsilon = 0.0;  // phi(eta - lambda_1)
  double summability_target = 0.0;
  double partial_sum_phi_c = 0.0;
  double tail_bound = 0.0;
  bool complete = false;  // false means Inconclusive
  std::string note;

  [[nodiscard]] bool certificate_holds() const {
    return std::isfinite(partial_sum_phi_c + tail_bound) &&
           partial_sum_phi_c + tail_bound <= summability_target * (1.0 + 1e-12);
  }
};

struct ConstructionOptions {
  std::optional<double> eta;
  std::size_t min_terms = 16;
  double fine_width = 50.0;
  double fine_step = 0.01;
  double far_limit = 1e12;
};

namespace detail {

struct SupScan {
  double value = -kInf;       // sup of the sampled set (conservative), -inf if empty
  double floor_phi = 0.0;     // phi at the lowest point scanned
};

// sup{u : alpha phi(u) > phi(u - lambda) and phi(u - lambda) <= eps}, scanned
// from eta downwards. Near-ties count as members so the estimate errs high.
inline SupScan scan_c_tilde(const DeformedExponential& phi, double alpha, double lambda, double log_eps, double eta,
                            const ConstructionOptions& opt) {
  const double log_alpha = std::log(alpha);
  const auto [dlo, dhi] = phi.domain();
  auto member = [&](double u) {
    if (u < dlo || u > dhi || u - lambda < dlo) return false;
    const double lu = phi.log_phi(u);
    if (lu == -kInf) return false;
    const double ls = phi.log_phi(u - lambda);
    if (ls > log_eps) return false;
    return !log_leq(log_alpha + lu, ls) || std::abs(log_alpha + lu - ls) <= 1e-12 * std::max(1.0, std::abs(ls));
  };

  SupScan out;
  const double a = phi.threshold();
  std::vector<double> pts;
  const auto fine = static_cast<std::size_t>(opt.fine_width / opt.fine_step);
  for (std::size_t i = 0; i <= fine; ++i) pts.push_back(eta - opt.fine_step * static_cast<double>(i));
  for (double d = opt.fine_width * 1.01; d <= opt.far_limit; d *= 1.01) pts.push_back(eta - d);

  double prev = std::min(eta, dhi);
  bool have_prev = false;
  auto refine = [&](double lo, double hi) {
    for (int it = 0; it < 100 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (member(mid) ? lo : hi) = mid;
    }
    return hi;
  };
  for (double u : pts) {
    if (u > dhi) continue;
    if (u < dlo + lambda || u <= a) {
      if (std::isfinite(a) && u <= a) {
        // Just above a, phi(u - lambda) = 0 < alpha phi(u): the set always
        // reaches into (a, a + lambda], which a coarse grid can step over.
        const double top = have_prev ? prev : std::min(eta, dhi);
        const double probe = a + 0.5 * std::min(lambda, top - a);
        if (probe > a && member(probe)) out.value = refine(probe, top);
        out.floor_phi = 0.0;
        return out;
      }
      const double edge = std::max(dlo + lambda, a);
      out.floor_phi = (edge > -kInf && edge <= dhi) ? phi.phi(std::max(edge, dlo)) : 0.0;
      return out;
    }
    if (member(u)) {
      out.value = have_prev ? refine(u, prev) : u;
      return out;
    }
    const double lp = phi.log_phi(u);
    prev = u;
    have_prev = true;
    out.floor_phi = std::exp(lp);
    if (lp < -690.0) return out;
  }
  return out;
}

}  // namespace detail

/// Builds u0_i = lambda_{n_i} with sum phi(c_i) <= summability_target by
/// taking, in order, the first n whose phi(c~_n) bound is at most target 2^-i.
inline U0Construction construct_u0_sequence(const DeformedExponential& phi, double alpha,
                                            std::span<const double> lambda_sequence, double summability_target,
                                            const ConstructionOptions& opt = {}) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("construct-u0: alpha must lie in (0, 1)");
  if (!(summability_target > 0.0)) throw std::invalid_argument("construct-u0: summability target must be positive");
  if (lambda_sequence.empty()) throw std::invalid_argument("construct-u0: empty lambda sequence");
  for (std::size_t i = 0; i < lambda_sequence.size(); ++i) {
    if (!(lambda_sequence[i] > 0.0)) throw std::invalid_argument("construct-u0: lambdas must be positive");
    if (i > 0 && !(lambda_sequence[i] < lambda_sequence[i - 1]))
      throw std::invalid_argument("construct-u0: lambdas must be strictly decreasing");
  }
  const double lambda1 = lambda_sequence.front();
  const double log_alpha = std::log(alpha);
  auto eta_ok = [&](double eta) {
    if (!detail::in_domain(phi, eta) || !detail::in_domain(phi, eta - lambda1)) return false;
    const double rhs = phi.log_phi(eta - lambda1);
    return rhs > -kInf && log_alpha + phi.log_phi(eta) < rhs;
  };

  U0Construction out;
  out.alpha = alpha;
  out.summability_target = summability_target;
  if (opt.eta) {
    if (!eta_ok(*opt.eta))
      throw std::invalid_argument("construct-u0: eta must satisfy alpha phi(eta) < phi(eta - lambda_1)");
    out.eta = *opt.eta;
  } else {
    bool found = false;
    for (int k = 0; k <= 2000 && !found; ++k) {
      for (double cand : {static_cast<double>(k), -static_cast<double>(k)}) {
        if (eta_ok(cand)) {
          out.eta = cand;
          found = true;
          break;
        }
      }
    }
    if (!found) throw std::invalid_argument("construct-u0: no integer eta with alpha phi(eta) < phi(eta - lambda_1)");
  }
  const double log_eps = phi.log_phi(out.eta - lambda1);
  out.epsilon = std::exp(log_eps);

  std::vector<double> bounds;
  for (double lambda : lambda_sequence) {
    const auto s = detail::scan_c_tilde(phi, alpha, lambda, log_eps, out.eta, opt);
    out.c_tilde.push_back(s.value);
    bounds.push_back(s.value == -kInf ? s.floor_phi : phi.phi(s.value));
  }
  for (std::size_t n = 1; n < out.c_tilde.size(); ++n) {
    if (out.c_tilde[n] > out.c_tilde[n - 1] + 1e-9 * std::max(1.0, std::abs(out.c_tilde[n - 1]))) {
      out.note = "c~_n is not non-increasing at n=" + std::to_string(n + 1);
      break;
    }
  }

  Accumulator acc;
  std::size_t i = 1;
  for (std::size_t n = 0; n < bounds.size(); ++n) {
    if (bounds[n] <= std::ldexp(summability_target, -static_cast<int>(i))) {
      out.selected_indices.push_back(n + 1);
      out.u0_sequence.push_back(lambda_sequence[n]);
      out.c_sequence.push_back(out.c_tilde[n]);
      out.phi_c_bounds.push_back(bounds[n]);
      acc.add(bounds[n]);
      ++i;
    }
  }
  const auto selected = out.selected_indices.size();
  out.partial_sum_phi_c = acc.value();
  out.tail_bound = std::ldexp(summability_target, -static_cast<int>(selected));
  out.complete = selected >= opt.min_terms && out.note.empty();
  if (selected < opt.min_terms && out.note.empty())
    out.note = "only " + std::to_string(selected) + " terms met the geometric thinning rule";
  return out;
}

/// Checks alpha phi(u) <= phi(u - u0_i) for sampled u > c_i with
/// phi(u - u0_i) < epsilon. Returns the number of violations.
inline std::size_t sequence_inequality_violations(const DeformedExponential& phi, const U0Construction& cons,
                                                  std::size_t samples_per_term = 2000) {
  const double log_alpha = std::log(cons.alpha);
  const double log_eps = std::log(cons.epsilon);
  std::size_t bad = 0;
  for (std::size_t i = 0; i < cons.u0_sequence.size(); ++i) {
    const double lo = std::max(cons.c_sequence[i], cons.eta - 60.0);
    const double hi = cons.eta + 1.0;
    for (std::size_t k = 1; k <= samples_per_term; ++k) {
      const double u = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(samples_per_term);
      if (!detail::in_domain(phi, u) || !detail::in_domain(phi, u - cons.u0_sequence[i])) continue;
      const double rhs = phi.log_phi(u - cons.u0_sequence[i]);
      if (!(rhs < log_eps)) continue;
      if (!detail::log_leq(log_alpha + phi.log_phi(u), rhs)) ++bad;
    }
  }
  return bad;
}

/// A summable test sequence: the first terms plus a declared bound on the rest.
struct TruncatedSequence {
  std::vector<double> values;
  double tail_phi_bound = 0.0;  // bound on sum_{i > n} phi(values_i)
};

struct ShiftedSumCertificate {
  double lambda = 0.0;
  double partial = 0.0;     // sum_{i <= n} phi(c_i + lambda u0_i)
  double tail_bound = kInf;  // bound on the omitted terms
  [[nodiscard]] bool finite() const { return std::isfinite(partial) && std::isfinite(tail_bound); }
};

/// Truncated check of sum phi(c~_i + lambda u0_i) < inf. The tail is bounded
/// by iterating T_k <= T_{k-1} / alpha + (construction tail), valid while
/// every omitted term stays below epsilon.
inline ShiftedSumCertificate shifted_sum_certificate(const DeformedExponential& phi, const U0Construction& cons,
                                                     const TruncatedSequence& test, double lambda) {
  if (test.values.size() != cons.u0_sequence.size())
    throw std::invalid_argument("shifted sum: test sequence length must match the construction");
  if (!(lambda > 0.0)) throw std::invalid_argument("shifted sum: lambda must be positive");
  ShiftedSumCertificate cert;
  cert.lambda = lambda;
  Accumulator acc;
  for (std::size_t i = 0; i < test.values.size(); ++i) acc.add(phi.phi(test.values[i] + lambda * cons.u0_sequence[i]));
  cert.partial = acc.value();
  double tail = test.tail_phi_bound;
  const int steps = static_cast<int>(std::ceil(lambda));
  for (int k = 0; k < steps; ++k) {
    if (!(tail < cons.epsilon)) return cert;
    tail = tail / cons.alpha + cons.tail_bound;
  }
  cert.tail_bound = tail;
  return cert;
}

// ---------------------------------------------------------------------------
// Adversarial harness for the counterexample phi over a non-atomic measure.

struct DemoRow {
  int n = 0;
  double c = 0.0;            // level-set value of c on piece n
  double log_mass = 0.0;     // log mu(piece n)
  double base_term = 0.0;    // mu(piece) phi(c)
  long double base_partial = 0.0L;
  double shifted_term = 0.0;  // mu(piece) phi(c + lambda)
  double shifted_partial = 0.0;
};

struct CounterexampleDemo {
  double lambda = 0.0;
  double scale = 1.0;             // c-values are n * scale
  double critical_shift = 0.0;    // int phi(c + s) is finite for s below this, infinite at and above
  double certified_lambda_min = 0.0;
  bool diverges = false;          // shifted terms are non-decreasing over the emitted tail
  std::vector<DemoRow> rows;
};

/// Pieces of mass 2^-n e^{-(c_n+1)^2/2} carrying c = c_n, u0 = 1, so that
/// int phi(c) dmu = sum 2^-n while int phi(c + lambda) dmu has terms
/// (e^{lambda scale} / 2)^n e^{lambda + lambda^2/2}.
inline CounterexampleDemo adversarial_nonexistence_demo(double lambda, int n_pieces) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("demo: lambda must be positive");
  if (n_pieces < 10) throw std::invalid_argument("demo: need at least 10 pieces");
  const auto phi = DeformedExponential::counterexample();
  const double ln2 = std::log(2.0);

  CounterexampleDemo d;
  d.lambda = lambda;
  d.scale = lambda >= ln2 ? 1.0 : 1.0 / lambda;
  d.critical_shift = ln2 / d.scale;
  d.certified_lambda_min = d.critical_shift;

  long double base_sum = 0.0L;
  Accumulator shifted;
  for (int n = 1; n <= n_pieces; ++n) {
    DemoRow r;
    r.n = n;
    r.c = n * d.scale;
    const double quad = (r.c + 1.0) * (r.c + 1.0) / 2.0;
    r.log_mass = -n * ln2 - quad;
    r.base_term = std::ldexp(std::exp(phi.log_phi(r.c) - quad), -n);
    r.shifted_term = std::ldexp(std::exp(phi.log_phi(r.c + lambda) - quad), -n);
    base_sum += static_cast<long double>(r.base_term);
    shifted.add(r.shifted_term);
    r.base_partial = base_sum;
    r.shifted_partial = shifted.value();
    d.rows.push_back(r);
  }
  // Exactly geometric terms that do not decay certify divergence.
  d.diverges = d.rows.back().shifted_term > 0.0;
  for (std::size_t i = d.rows.size() / 2; i + 1 < d.rows.size(); ++i)
    if (d.rows[i + 1].shifted_term < d.rows[i].shifted_term * (1.0 - 1e-12)) d.diverges = false;
  return d;
}

/// Pair realizing non-existence of kappa for the counterexample phi, u0 = 1.
///
/// With c from the demo, int phi(c + s) is finite for s < s0 and infinite for
/// s >= s0 (s0 = critical_shift). Block k is the single piece n_k = (k+1)^2
/// shifted by s_k < s0 chosen so that its contribution is exactly 2^-(k+1);
/// s_k increases to s0. On the blocks p = q = phi(c + s_k); two further pieces
/// of unit mass carry p = (0.3, 0.2), q = (0.2, 0.3). Blocks whose values do
/// not fit in a double form the analytic tail: mass 2^-(K+1) at kappa = 0, and
/// +inf for every kappa > 0, since infinitely many omitted blocks then reach
/// shift s0 and contribute at least e^{s0 + s0^2/2} each.
inline ProbabilityPair adversarial_pair(const CounterexampleDemo& demo) {
  const auto phi = DeformedExponential::counterexample();
  const double ln2 = std::log(2.0);
  const double sigma = demo.scale;
  const double s0 = demo.critical_shift;

  std::vector<Piece> pieces{{1, 1.0}, {2, 1.0}};
  std::vector<double> p{0.3, 0.2};
  std::vector<double> q{0.2, 0.3};
  int k = 1;
  for (;; ++k) {
    const int n = (k + 1) * (k + 1);
    const double c = n * sigma;
    // log of the block contribution as a function of the shift s
    auto f = [&](double s) { return n * (s * sigma - ln2) + s + s * s / 2.0 + (k + 1) * ln2; };
    double lo = 0.0, hi = s0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (f(mid) < 0.0 ? lo : hi) = mid;
    }
    const double s = 0.5 * (lo + hi);
    const double log_mass = -n * ln2 - (c + 1.0) * (c + 1.0) / 2.0;
    const double value = phi.phi(c + s);
    if (c + s > 30.0 || log_mass < -700.0 || !std::isfinite(value)) break;
    pieces.push_back({static_cast<std::size_t>(n), std::exp(log_mass)});
    p.push_back(value);
    q.push_back(value);
  }
  const int stored_blocks = k - 1;
  const double tail_mass = std::ldexp(1.0, -(stored_blocks + 1));

  AnalyticTail tail;
  tail.p_mass = tail_mass;
  tail.q_mass = tail_mass;
  tail.normalization = [tail_mass](double, double kappa) { return kappa > 0.0 ? kInf : tail_mass; };
  tail.description = "blocks k > " + std::to_string(stored_blocks) + " of the counterexample construction";
  return ProbabilityPair::make(Measure::simple(std::move(pieces)), std::move(p), std::move(q), std::move(tail));
}

}  // namespace defdiv
