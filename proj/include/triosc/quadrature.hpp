#pragma once

#include <vector>

namespace triosc {

// Nodes and weights on [-1, 1]; symmetric about zero.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule, cached per n. Thread-safe.
const QuadratureRule& gauss_legendre(int n);

// Rule mapped to [-radius, radius].
QuadratureRule scaled_rule(int n, double radius);

}  // namespace triosc
