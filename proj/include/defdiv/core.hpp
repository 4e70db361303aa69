#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace defdiv {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Raised when user-supplied data (pairs, knots, specs) break a model invariant.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised for malformed CSV/JSON input.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Compensated (Neumaier) accumulator. A +inf term saturates the sum.
class Accumulator {
 public:
  void add(double x) {
    if (!std::isfinite(x) || !std::isfinite(sum_)) {
      sum_ += x;
      return;
    }
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  [[nodiscard]] double value() const {
    return std::isfinite(sum_) ? sum_ + comp_ : sum_;
  }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
  Accumulator acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

/// 17 significant digits, the round-trip precision used by every text format.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace defdiv
