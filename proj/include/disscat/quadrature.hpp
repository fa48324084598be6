#pragma once

#include <vector>

namespace disscat {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
GaussRule gauss_legendre(int n);

/// n-point Gauss-Legendre rule mapped to [a, b].
GaussRule gauss_legendre(int n, double a, double b);

}  // namespace disscat
