#pragma once

// Underlying measures at desk scale and probability pairs defined on them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "defdiv/core.hpp"

namespace defdiv {

/// Counting measure on {1, ..., n_atoms}: the leading terms of a sequence on N.
struct Counting {
  std::size_t n_atoms = 0;
};

/// Composite trapezoid rule standing in for a non-atomic measure on an interval.
struct QuadGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
};

struct Piece {
  std::size_t id = 0;
  double mass = 0.0;
};

/// Simple functions over an abstract non-atomic measure: only the masses of
/// the level sets ("pieces") matter.
struct SimpleNonAtomic {
  std::vector<Piece> pieces;
};

class Measure {
 public:
  using Kind = std::variant<Counting, QuadGrid, SimpleNonAtomic>;

  Measure() : kind_(Counting{1}) {}

  static Measure counting(std::size_t n_atoms) {
    if (n_atoms == 0) throw ValidationError("counting measure: n_atoms must be positive");
    return Measure(Counting{n_atoms});
  }

  static Measure quad_grid(std::vector<double> nodes, std::vector<double> weights) {
    if (nodes.size() != weights.size() || nodes.empty())
      throw ValidationError("quad grid: nodes and weights must be non-empty and of equal length");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!std::isfinite(nodes[i])) throw ValidationError("quad grid: node " + std::to_string(i + 1) + " not finite");
      if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
        throw ValidationError("quad grid: weight " + std::to_string(i + 1) + " must be > 0");
      if (i > 0 && nodes[i] <= nodes[i - 1])
        throw ValidationError("quad grid: nodes not strictly increasing at " + std::to_string(i + 1));
    }
    return Measure(QuadGrid{std::move(nodes), std::move(weights)});
  }

  /// Composite trapezoid weights for arbitrary strictly increasing nodes.
  static Measure trapezoid(std::vector<double> nodes) {
    if (nodes.size() < 2) throw ValidationError("trapezoid: need at least two nodes");
    std::vector<double> w(nodes.size(), 0.0);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      const double h = nodes[i + 1] - nodes[i];
      w[i] += h / 2.0;
      w[i + 1] += h / 2.0;
    }
    return quad_grid(std::move(nodes), std::move(w));
  }

  /// Uniform trapezoid grid on [a, b] with n nodes.
  static Measure trapezoid(double a, double b, std::size_t n) {
    if (n < 3 || !(b > a)) throw ValidationError("trapezoid: need a < b and at least 3 nodes");
    std::vector<double> nodes(n);
    const double h = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) nodes[i] = a + h * static_cast<double>(i);
    nodes.back() = b;
    return trapezoid(std::move(nodes));
  }

  static Measure simple(std::vector<Piece> pieces) {
    if (pieces.empty()) throw ValidationError("simple measure: no pieces");
    std::set<std::size_t> ids;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      if (!(pieces[i].mass > 0.0) || !std::isfinite(pieces[i].mass))
        throw ValidationError("simple measure: piece " + std::to_string(i + 1) + " must have positive mass");
      if (!ids.insert(pieces[i].id).second)
        throw ValidationError("simple measure: duplicate piece id " + std::to_string(pieces[i].id));
    }
    return Measure(SimpleNonAtomic{std::move(pieces)});
  }

  [[nodiscard]] const Kind& kind() const { return kind_; }

  [[nodiscard]] std::string kind_name() const {
    if (std::holds_alternative<Counting>(kind_)) return "counting";
    if (std::holds_alternative<QuadGrid>(kind_)) return "quad";
    return "simple";
  }

  [[nodiscard]] std::size_t size() const {
    if (const auto* c = std::get_if<Counting>(&kind_)) return c->n_atoms;
    if (const auto* g = std::get_if<QuadGrid>(&kind_)) return g->nodes.size();
    return std::get<SimpleNonAtomic>(kind_).pieces.size();
  }

  /// mu({atom i}), the trapezoid weight of node i, or the mass of piece i.
  [[nodiscard]] double weight(std::size_t i) const {
    if (std::holds_alternative<Counting>(kind_)) return 1.0;
    if (const auto* g = std::get_if<QuadGrid>(&kind_)) return g->weights[i];
    return std::get<SimpleNonAtomic>(kind_).pieces[i].mass;
  }

  [[nodiscard]] std::vector<double> weights() const {
    std::vector<double> w(size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = weight(i);
    return w;
  }

 private:
  explicit Measure(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

/// Integral of f with respect to m. A +inf value anywhere yields +inf.
inline double integrate(const Measure& m, std::span<const double> f) {
  if (f.size() != m.size())
    throw std::invalid_argument("integrate: " + std::to_string(f.size()) + " values for a measure of size " +
                                std::to_string(m.size()));
  Accumulator acc;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::isinf(f[i]) && f[i] > 0.0) return kInf;
    acc.add(m.weight(i) * f[i]);
  }
  return acc.value();
}

/// Rescale positive raw values into a density with respect to m.
inline std::vector<double> normalize(const Measure& m, std::span<const double> raw) {
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (!(raw[i] > 0.0)) throw ValidationError("normalize: entry " + std::to_string(i + 1) + " is not positive");
  const double total = integrate(m, raw);
  if (!(total > 0.0) || !std::isfinite(total)) throw ValidationError("normalize: total mass must be finite and > 0");
  std::vector<double> out(raw.begin(), raw.end());
  for (double& x : out) x /= total;
  return out;
}

/// Declared contribution of atoms that lie beyond the stored truncation.
/// `normalization(alpha, kappa)` returns the omitted part of the
/// normalization integral; it may be +inf.
struct AnalyticTail {
  double p_mass = 0.0;
  double q_mass = 0.0;
  std::function<double(double alpha, double kappa)> normalization;
  std::string description;
};

/// Two strictly positive densities p, q with unit mass on a shared measure.
class ProbabilityPair {
 public:
  static constexpr double kMassTolerance = 1e-9;

  static ProbabilityPair make(Measure m, std::vector<double> p, std::vector<double> q,
                              std::optional<AnalyticTail> tail = std::nullopt) {
    if (p.size() != m.size() || q.size() != m.size())
      throw ValidationError("pair: p and q must have one value per atom (" + std::to_string(m.size()) + ")");
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!(p[i] > 0.0) || !std::isfinite(p[i]))
        throw ValidationError("pair: p must be positive and finite (row " + std::to_string(i + 1) + ")");
      if (!(q[i] > 0.0) || !std::isfinite(q[i]))
        throw ValidationError("pair: q must be positive and finite (row " + std::to_string(i + 1) + ")");
    }
    const double tp = tail ? tail->p_mass : 0.0;
    const double tq = tail ? tail->q_mass : 0.0;
    const double mp = integrate(m, p) + tp;
    const double mq = integrate(m, q) + tq;
    if (std::abs(mp - 1.0) > kMassTolerance)
      throw ValidationError("pair: p integrates to " + format_double(mp) + ", not 1");
    if (std::abs(mq - 1.0) > kMassTolerance)
      throw ValidationError("pair: q integrates to " + format_double(mq) + ", not 1");
    return ProbabilityPair(std::move(m), std::move(p), std::move(q), std::move(tail));
  }

  [[nodiscard]] const Measure& measure() const { return measure_; }
  [[nodiscard]] std::span<const double> p() const { return p_; }
  [[nodiscard]] std::span<const double> q() const { return q_; }
  [[nodiscard]] const std::optional<AnalyticTail>& tail() const { return tail_; }
  [[nodiscard]] std::size_t size() const { return p_.size(); }

  /// The pair (q, p). A declared tail is re-expressed with alpha -> 1 - alpha.
  [[nodiscard]] ProbabilityPair swapped() const {
    std::optional<AnalyticTail> t;
    if (tail_) {
      t = AnalyticTail{tail_->q_mass, tail_->p_mass, nullptr, tail_->description};
      if (tail_->normalization) {
        auto f = tail_->normalization;
        t->normalization = [f](double alpha, double kappa) { return f(1.0 - alpha, kappa); };
      }
    }
    return ProbabilityPair(measure_, q_, p_, std::move(t));
  }

 private:
  ProbabilityPair(Measure m, std::vector<double> p, std::vector<double> q, std::optional<AnalyticTail> t)
      : measure_(std::move(m)), p_(std::move(p)), q_(std::move(q)), tail_(std::move(t)) {}

  Measure measure_;
  std::vector<double> p_;
  std::vector<double> q_;
  std::optional<AnalyticTail> tail_;
};

}  // namespace defdiv
