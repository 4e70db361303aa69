#pragma once

// Deformed exponential families: convex, non-decreasing phi: R -> [0, inf)
// with phi(-inf) = 0 and phi(+inf) = inf.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "defdiv/core.hpp"

namespace defdiv {

struct ClassicalExp {};

/// q-exponential, the inverse of ln_q(x) = (x^(1-q) - 1) / (1 - q).
/// For q < 1 it is clipped to 0 below -1/(1-q); for q > 1 it has a pole at
/// 1/(q-1) and saturates to +inf from there on.
struct TsallisQ {
  double q = 1.0;
};

/// exp_kappa(u) = (kappa u + sqrt(1 + kappa^2 u^2))^(1/kappa), kappa in [-1, 1].
struct KaniadakisKappa {
  double kappa = 0.0;
};

/// e^((u+1)^2/2) for u >= 0 and e^(u+1/2) for u <= 0. A valid deformed
/// exponential that grows faster than any e^(lambda u).
struct CounterexamplePhi {};

/// Knots (u_i, phi_i), interpolated piecewise-linearly in (u, log phi).
struct TabulatedMonotone {
  std::vector<double> u;
  std::vector<double> phi;
};

using Family = std::variant<ClassicalExp, TsallisQ, KaniadakisKappa,
                            CounterexamplePhi, TabulatedMonotone>;

namespace detail {

inline constexpr double kHalf = 0.5;

struct CounterexampleBranches {
  double left;   // derivative of e^(u+1/2)
  double right;  // derivative of e^((u+1)^2/2)
};

inline CounterexampleBranches counterexample_derivatives(double u) {
  return {std::exp(u + kHalf), (u + 1.0) * std::exp((u + 1.0) * (u + 1.0) / 2.0)};
}

}  // namespace detail

class DeformedExponential {
 public:
  DeformedExponential() = default;

  static DeformedExponential classical() { return DeformedExponential(ClassicalExp{}); }

  static DeformedExponential tsallis(double q) {
    if (!std::isfinite(q) || q < 0.0)
      throw std::invalid_argument("tsallis: q must be a finite value >= 0 (convexity)");
    return DeformedExponential(TsallisQ{q});
  }

  static DeformedExponential kaniadakis(double kappa) {
    if (!std::isfinite(kappa) || kappa < -1.0 || kappa > 1.0)
      throw std::invalid_argument("kaniadakis: kappa must lie in [-1, 1]");
    return DeformedExponential(KaniadakisKappa{kappa});
  }

  static DeformedExponential counterexample() { return DeformedExponential(CounterexamplePhi{}); }

  /// Knots must have strictly increasing u and positive, non-decreasing phi.
  static DeformedExponential tabulated(std::vector<std::pair<double, double>> knots) {
    if (knots.size() < 2) throw ValidationError("tabulated: at least two knots are required");
    TabulatedMonotone t;
    for (std::size_t i = 0; i < knots.size(); ++i) {
      const auto [u, v] = knots[i];
      if (!std::isfinite(u) || !std::isfinite(v))
        throw ValidationError("tabulated: knot " + std::to_string(i + 1) + " is not finite");
      if (v <= 0.0)
        throw ValidationError("tabulated: knot " + std::to_string(i + 1) + " has phi <= 0");
      if (i > 0 && u <= knots[i - 1].first)
        throw ValidationError("tabulated: u not strictly increasing at knot " + std::to_string(i + 1));
      if (i > 0 && v < knots[i - 1].second)
        throw ValidationError("tabulated: phi decreasing at knot " + std::to_string(i + 1));
      t.u.push_back(u);
      t.phi.push_back(v);
    }
    DeformedExponential d(std::move(t));
    const auto& tab = std::get<TabulatedMonotone>(d.family_);
    d.log_knots_.resize(tab.phi.size());
    std::transform(tab.phi.begin(), tab.phi.end(), d.log_knots_.begin(),
                   [](double v) { return std::log(v); });
    return d;
  }

  [[nodiscard]] const Family& family() const { return family_; }

  /// Short family name as used in JSON and on the command line.
  [[nodiscard]] std::string name() const {
    return std::visit(
        [](const auto& f) -> std::string {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, ClassicalExp>) return "exp";
          else if constexpr (std::is_same_v<F, TsallisQ>) return "tsallis";
          else if constexpr (std::is_same_v<F, KaniadakisKappa>) return "kaniadakis";
          else if constexpr (std::is_same_v<F, CounterexamplePhi>) return "counterexample";
          else return "tabulated";
        },
        family_);
  }

  /// Human-readable identifier including parameters, e.g. "tsallis(q=0.5)".
  [[nodiscard]] std::string id() const {
    if (const auto* t = std::get_if<TsallisQ>(&family_)) return "tsallis(q=" + format_double(t->q) + ")";
    if (const auto* k = std::get_if<KaniadakisKappa>(&family_))
      return "kaniadakis(kappa=" + format_double(k->kappa) + ")";
    if (const auto* t = std::get_if<TabulatedMonotone>(&family_))
      return "tabulated(" + std::to_string(t->u.size()) + " knots)";
    return name();
  }

  /// a_phi = inf{u : phi(u) > 0}. For tabulated families this is the lower
  /// edge of the table.
  [[nodiscard]] double threshold() const {
    if (const auto* t = std::get_if<TsallisQ>(&family_))
      return t->q < 1.0 ? -1.0 / (1.0 - t->q) : -kInf;
    if (const auto* t = std::get_if<TabulatedMonotone>(&family_)) return t->u.front();
    return -kInf;
  }

  /// Range of u on which phi may be evaluated.
  [[nodiscard]] std::pair<double, double> domain() const {
    if (const auto* t = std::get_if<TabulatedMonotone>(&family_)) return {t->u.front(), t->u.back()};
    return {-kInf, kInf};
  }

  /// log phi(u); -inf where phi vanishes, +inf past a pole.
  [[nodiscard]] double log_phi(double u) const {
    return std::visit([&](const auto& f) { return log_phi_impl(f, u); }, family_);
  }

  /// phi(u). Values beyond the double range saturate to +inf.
  [[nodiscard]] double phi(double u) const {
    if (std::isnan(u)) throw std::invalid_argument("phi: u is NaN");
    return std::exp(log_phi(u));
  }

  double operator()(double u) const { return phi(u); }

  /// phi'(u).
  [[nodiscard]] double derivative(double u) const {
    return std::visit([&](const auto& f) { return derivative_impl(f, u); }, family_);
  }

  /// phi^{-1}(v) for v > 0, taken on (a_phi, inf).
  [[nodiscard]] double inverse(double v) const {
    if (!(v > 0.0) || std::isinf(v)) throw std::domain_error("phi inverse: v must be finite and > 0");
    return std::visit([&](const auto& f) { return inverse_impl(f, v); }, family_);
  }

  /// (phi^{-1})'(v) = 1 / phi'(phi^{-1}(v)).
  [[nodiscard]] double inverse_derivative(double v) const {
    if (!(v > 0.0) || std::isinf(v))
      throw std::domain_error("phi inverse derivative: v must be finite and > 0");
    const double d = std::visit([&](const auto& f) { return inverse_derivative_impl(f, v); }, family_);
    if (!(d > 0.0) || !std::isfinite(d))
      throw std::domain_error("phi inverse derivative: phi is flat at phi^{-1}(v)");
    return d;
  }

 private:
  explicit DeformedExponential(Family f) : family_(std::move(f)) {}

  // ---- log phi
  static double log_phi_impl(const ClassicalExp&, double u) { return u; }

  static double log_phi_impl(const TsallisQ& t, double u) {
    if (t.q == 1.0) return u;
    const double a = 1.0 - t.q;
    const double bracket = 1.0 + a * u;
    if (bracket <= 0.0) return a > 0.0 ? -kInf : kInf;
    return std::log1p(a * u) / a;
  }

  static double log_phi_impl(const KaniadakisKappa& k, double u) {
    if (k.kappa == 0.0) return u;
    return std::asinh(k.kappa * u) / k.kappa;
  }

  static double log_phi_impl(const CounterexamplePhi&, double u) {
    return u >= 0.0 ? (u + 1.0) * (u + 1.0) / 2.0 : u + detail::kHalf;
  }

  double log_phi_impl(const TabulatedMonotone& t, double u) const {
    if (!(u >= t.u.front() && u <= t.u.back()))
      throw std::out_of_range("tabulated phi: u=" + format_double(u) + " outside knot range");
    const std::size_t i = segment(t, u);
    const double w = (u - t.u[i]) / (t.u[i + 1] - t.u[i]);
    return log_knots_[i] + w * (log_knots_[i + 1] - log_knots_[i]);
  }

  static std::size_t segment(const TabulatedMonotone& t, double u) {
    auto it = std::upper_bound(t.u.begin(), t.u.end(), u);
    std::size_t i = it == t.u.begin() ? 0 : static_cast<std::size_t>(it - t.u.begin()) - 1;
    return std::min(i, t.u.size() - 2);
  }

  // ---- phi'
  static double derivative_impl(const ClassicalExp&, double u) { return std::exp(u); }

  double derivative_impl(const TsallisQ& t, double u) const {
    const double p = phi(u);
    if (p == 0.0) return 0.0;
    return std::pow(p, t.q);
  }

  double derivative_impl(const KaniadakisKappa& k, double u) const {
    return phi(u) / std::sqrt(1.0 + k.kappa * k.kappa * u * u);
  }

  static double derivative_impl(const CounterexamplePhi&, double u) {
    const auto br = detail::counterexample_derivatives(u);
    if (u == 0.0) {
      if (std::abs(br.left - br.right) > 1e-12 * br.right)
        throw std::logic_error("counterexample phi: branch derivatives disagree at u = 0");
      return br.right;
    }
    return u > 0.0 ? br.right : br.left;
  }

  double derivative_impl(const TabulatedMonotone& t, double u) const {
    const std::size_t i = segment(t, u);
    const double slope = (log_knots_[i + 1] - log_knots_[i]) / (t.u[i + 1] - t.u[i]);
    return phi(u) * slope;
  }

  // ---- phi^{-1}
  static double inverse_impl(const ClassicalExp&, double v) { return std::log(v); }

  static double inverse_impl(const TsallisQ& t, double v) {
    if (t.q == 1.0) return std::log(v);
    const double a = 1.0 - t.q;
    return std::expm1(a * std::log(v)) / a;
  }

  static double inverse_impl(const KaniadakisKappa& k, double v) {
    if (k.kappa == 0.0) return std::log(v);
    return std::sinh(k.kappa * std::log(v)) / k.kappa;
  }

  static double inverse_impl(const CounterexamplePhi&, double v) {
    const double lv = std::log(v);
    return lv >= detail::kHalf ? std::sqrt(2.0 * lv) - 1.0 : lv - detail::kHalf;
  }

  double inverse_impl(const TabulatedMonotone& t, double v) const {
    const double lv = std::log(v);
    if (lv < log_knots_.front() || lv > log_knots_.back())
      throw std::domain_error("tabulated phi inverse: v=" + format_double(v) + " outside tabulated range");
    auto it = std::lower_bound(log_knots_.begin(), log_knots_.end(), lv);
    const auto i = static_cast<std::size_t>(it - log_knots_.begin());
    if (log_knots_[i] == lv) {
      const bool flat = (i + 1 < log_knots_.size() && log_knots_[i + 1] == lv) ||
                        (i > 0 && log_knots_[i - 1] == lv);
      if (flat) throw std::domain_error("tabulated phi inverse: v lies on a flat segment");
      return t.u[i];
    }
    const double w = (lv - log_knots_[i - 1]) / (log_knots_[i] - log_knots_[i - 1]);
    return t.u[i - 1] + w * (t.u[i] - t.u[i - 1]);
  }

  // ---- (phi^{-1})'
  static double inverse_derivative_impl(const ClassicalExp&, double v) { return 1.0 / v; }

  static double inverse_derivative_impl(const TsallisQ& t, double v) { return std::pow(v, -t.q); }

  static double inverse_derivative_impl(const KaniadakisKappa& k, double v) {
    return std::cosh(k.kappa * std::log(v)) / v;
  }

  // At the branch junction v = e^{1/2} the u >= 0 branch is used.
  static double inverse_derivative_impl(const CounterexamplePhi&, double v) {
    const double lv = std::log(v);
    return lv >= detail::kHalf ? 1.0 / (v * std::sqrt(2.0 * lv)) : 1.0 / v;
  }

  double inverse_derivative_impl(const TabulatedMonotone&, double v) const {
    const double lo = std::exp(log_knots_.front());
    const double hi = std::exp(log_knots_.back());
    double h = 1e-6 * v;
    if (v - h >= lo && v + h <= hi) return (inverse(v + h) - inverse(v - h)) / (2.0 * h);
    h = std::min(h, 0.5 * (hi - lo));
    if (v + h <= hi) return (inverse(v + h) - inverse(v)) / h;
    return (inverse(v) - inverse(v - h)) / h;
  }

  Family family_ = ClassicalExp{};
  std::vector<double> log_knots_;
};

/// Outcome of numerically checking the deformed-exponential axioms on a grid.
struct SpecValidationReport {
  std::vector<double> convexity_violations;     // middle node of each failing triple
  std::vector<double> monotonicity_violations;  // right node of each decreasing pair
  std::size_t saturated_points = 0;             // phi = +inf (overflow or pole)
  std::size_t skipped_points = 0;               // outside a tabulated domain
  double u_min = 0.0;
  double u_max = 0.0;
  double phi_at_min = 0.0;  // tail probe, should be near 0
  double phi_at_max = 0.0;  // tail probe, should be large

  [[nodiscard]] bool ok() const {
    return convexity_violations.empty() && monotonicity_violations.empty();
  }
};

/// Three-point chord convexity test and monotonicity test over a sorted grid.
/// Violations are reported, never thrown.
inline SpecValidationReport validate_spec(const DeformedExponential& phi, std::span<const double> grid) {
  if (grid.size() < 3) throw std::invalid_argument("validate_spec: grid needs at least 3 points");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw std::invalid_argument("validate_spec: grid must be sorted");

  const auto [dlo, dhi] = phi.domain();
  std::vector<double> us;
  std::vector<double> vs;
  SpecValidationReport rep;
  for (double u : grid) {
    if (u < dlo || u > dhi) {
      ++rep.skipped_points;
      continue;
    }
    const double v = phi.phi(u);
    if (std::isinf(v)) ++rep.saturated_points;
    us.push_back(u);
    vs.push_back(v);
  }
  if (us.empty()) return rep;
  rep.u_min = us.front();
  rep.u_max = us.back();
  rep.phi_at_min = vs.front();
  rep.phi_at_max = vs.back();

  constexpr double rel = 1e-12;
  for (std::size_t i = 1; i < us.size(); ++i) {
    if (std::isinf(vs[i]) || std::isinf(vs[i - 1])) continue;
    if (vs[i] < vs[i - 1] - rel * std::abs(vs[i - 1])) rep.monotonicity_violations.push_back(us[i]);
  }
  for (std::size_t i = 1; i + 1 < us.size(); ++i) {
    const double l = vs[i - 1], m = vs[i], r = vs[i + 1];
    if (!std::isfinite(l) || !std::isfinite(m) || !std::isfinite(r)) continue;
    const double span = us[i + 1] - us[i - 1];
    if (span <= 0.0) continue;
    const double chord = (l * (us[i + 1] - us[i]) + r * (us[i] - us[i - 1])) / span;
    if (m > chord + rel * std::max({l, m, r})) rep.convexity_violations.push_back(us[i]);
  }
  return rep;
}

}  // namespace defdiv
