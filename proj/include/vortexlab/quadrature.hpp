#pragma once

#include <vector>

namespace vlab {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;  // sum to the interval length
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton on P_n).
QuadratureRule gauss_legendre(int n);

/// Composite rule on [a, b] with `panels` equal panels of n points each.
QuadratureRule composite_gauss(double a, double b, int panels, int n);

}  // namespace vlab
