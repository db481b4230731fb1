#pragma once

#include <functional>
#include <vector>

namespace spherekde {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b]. Nodes from Newton iteration on
/// P_n started at the Chebyshev-like guesses; exact for degree 2n - 1.
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// n-point trapezoid rule for a periodic integrand over one period [a, a + L).
QuadratureRule periodic_trapezoid(int n, double a, double length);

/// Node count at which an n-point Gauss-Legendre rule integrates
/// exp(i k t) over an interval of length `length` to near machine precision.
int gauss_nodes_for_frequency(double k, double length, int at_least);

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance `tol`.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 50);

}  // namespace spherekde
