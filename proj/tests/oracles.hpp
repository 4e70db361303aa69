#pragma once

// Closed forms written out directly from their textbook definitions, kept
// apart from the library so tests never check the code against itself.

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

inline long double sum_w(const Vec& w, const Vec& f) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < f.size(); ++i) s += static_cast<long double>(w.empty() ? 1.0 : w[i]) * f[i];
  return s;
}

/// -log int p^a q^(1-a) for the classical exponential with u0 = 1.
inline double kappa_exp(const Vec& p, const Vec& q, double a, const Vec& w = {}) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i)
    s += static_cast<long double>(w.empty() ? 1.0 : w[i]) * std::pow(static_cast<long double>(p[i]), a) *
         std::pow(static_cast<long double>(q[i]), 1.0L - a);
  return static_cast<double>(-std::log(s));
}

inline double renyi(const Vec& p, const Vec& q, double a, const Vec& w = {}) {
  return kappa_exp(p, q, a, w) / (a * (1.0 - a));
}

inline double kl(const Vec& p, const Vec& q, const Vec& w = {}) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i)
    s += static_cast<long double>(w.empty() ? 1.0 : w[i]) * p[i] * std::log(static_cast<long double>(p[i]) / q[i]);
  return static_cast<double>(s);
}

inline double exp_q(double u, double q) {
  if (q == 1.0) return std::exp(u);
  const double b = 1.0 + (1.0 - q) * u;
  if (b <= 0.0) return q < 1.0 ? 0.0 : INFINITY;
  return std::pow(b, 1.0 / (1.0 - q));
}

inline double ln_q(double x, double q) { return q == 1.0 ? std::log(x) : (std::pow(x, 1.0 - q) - 1.0) / (1.0 - q); }

inline double exp_k(double u, double k) { return std::pow(k * u + std::sqrt(1.0 + k * k * u * u), 1.0 / k); }

inline double ln_k(double v, double k) { return (std::pow(v, k) - std::pow(v, -k)) / (2.0 * k); }

/// min_v ln_k(v) - ln_k(a v), attained at v = a^(-1/2).
inline double kaniadakis_lambda(double k, double a) { return 2.0 * std::sinh(-k * std::log(a) / 2.0) / k; }

/// phi-divergence for exp_kappa: (ln_k)'(v) = (v^k + v^-k) / (2 v).
inline double phi_div_kaniadakis(const Vec& p, const Vec& q, double k) {
  long double num = 0.0L, den = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = (std::pow(p[i], k) + std::pow(p[i], -k)) / (2.0 * p[i]);
    num += (ln_k(p[i], k) - ln_k(q[i], k)) / d;
    den += 1.0 / d;
  }
  return static_cast<double>(num / den);
}

/// Random strictly positive probability vector with entries bounded away from 0.
inline Vec random_simplex(std::mt19937_64& rng, std::size_t n, double floor = 0.05) {
  std::uniform_real_distribution<double> u(floor, 1.0);
  Vec v(n);
  long double s = 0.0L;
  for (auto& x : v) {
    x = u(rng);
    s += x;
  }
  for (auto& x : v) x = static_cast<double>(x / s);
  return v;
}

}  // namespace oracle
