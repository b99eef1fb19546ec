#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>

namespace triosc {

inline constexpr double kPi = std::numbers::pi;

// Compensated accumulator (Neumaier variant of Kahan summation).
// Deterministic for a fixed sequence of adds regardless of magnitude order.
struct Neumaier {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + comp; }
};

inline double compensated_sum(std::span<const double> xs) {
  Neumaier acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

// Exact product splitting: returns p = fl(a*b) and err with a*b = p + err.
struct TwoProd {
  double p;
  double err;
};

inline TwoProd two_prod(double a, double b) {
  const double p = a * b;
  const double err = std::fma(a, b, -p);
  return {p, err};
}

// Dot product with exact products and compensated accumulation. Reports the
// true rounding defect of the stored inputs rather than adding its own.
inline double compensated_dot(std::span<const double> a, std::span<const double> b) {
  Neumaier acc;
  const std::size_t n = a.size() < b.size() ? a.size() : b.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto [p, err] = two_prod(a[i], b[i]);
    acc.add(p);
    acc.add(err);
  }
  return acc.value();
}

}  // namespace triosc
