#include "triosc/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace triosc {

namespace {

// Legendre P_n and its derivative at x, by the three-term recurrence.
std::pair<long double, long double> legendre(int n, long double x) {
  long double p0 = 1.0L;
  long double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const long double dp = n * (x * p1 - p0) / (x * x - 1.0L);
  return {p1, dp};
}

QuadratureRule build_rule(int n) {
  if (n < 1) throw std::invalid_argument("quadrature rule needs at least one node");
  if (n == 1) return {{0.0}, {2.0}};
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const long double pi = 3.14159265358979323846264338327950288L;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    long double x = std::cos(pi * (i + 0.75L) / (n + 0.5L));
    for (int it = 0; it < 64; ++it) {
      const auto [p, dp] = legendre(n, x);
      const long double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-19L) break;
    }
    const auto [p, dp] = legendre(n, x);
    (void)p;
    const long double w = 2.0L / ((1.0L - x * x) * dp * dp);
    // Mirror so the rule is exactly symmetric.
    rule.nodes[i] = static_cast<double>(-x);
    rule.nodes[n - 1 - i] = static_cast<double>(x);
    rule.weights[i] = static_cast<double>(w);
    rule.weights[n - 1 - i] = static_cast<double>(w);
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const QuadratureRule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

QuadratureRule scaled_rule(int n, double radius) {
  QuadratureRule rule = gauss_legendre(n);
  for (auto& x : rule.nodes) x *= radius;
  for (auto& w : rule.weights) w *= radius;
  return rule;
}

}  // namespace triosc
