#pragma once

// Naive reference implementations shared by the tests. They follow the
// defining formulas term by term and share no code with the library.

#include <cmath>
#include <random>
#include <vector>

#include <boost/math/special_functions/legendre.hpp>

#include "spherekde/geometry.hpp"
#include "spherekde/kde.hpp"
#include "spherekde/specfun.hpp"

namespace oracle {

inline constexpr double pi = 3.14159265358979323846;

// |a - b| <= tol.
inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// (1/(2 pi n)) sum_j [1 + 2 sum_l g(h l) cos(l (theta - theta_j))]
inline double kde_s1(const std::vector<double>& thetas, double h, int r, int cutoff, double theta) {
  double total = 0.0;
  for (double tj : thetas) {
    double inner = 1.0;
    for (int l = 1; l <= cutoff; ++l) {
      inner += 2.0 / (1.0 + std::pow(h * l, r)) * std::cos(l * (theta - tj));
    }
    total += inner;
  }
  return total / (2.0 * pi * static_cast<double>(thetas.size()));
}

// (1/n) sum_j sum_l (2l+1)/(4 pi) g(h sqrt(l(l+1))) P_l(<x, X_j>)
inline double kde_s2(const std::vector<std::array<double, 3>>& xs, double h, int r, int cutoff,
                     const std::array<double, 3>& x) {
  double total = 0.0;
  for (const auto& xj : xs) {
    double t = x[0] * xj[0] + x[1] * xj[1] + x[2] * xj[2];
    t = std::fmax(-1.0, std::fmin(1.0, t));
    for (int l = 0; l <= cutoff; ++l) {
      const double g = 1.0 / (1.0 + std::pow(h * std::sqrt(l * (l + 1.0)), r));
      total += (2.0 * l + 1.0) / (4.0 * pi) * g * boost::math::legendre_p(l, t);
    }
  }
  return total / static_cast<double>(xs.size());
}

inline std::array<double, 3> random_unit(std::mt19937_64& gen) {
  std::normal_distribution<double> z;
  for (;;) {
    std::array<double, 3> v{z(gen), z(gen), z(gen)};
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (n > 1e-6) return {v[0] / n, v[1] / n, v[2] / n};
  }
}

using Matrix = std::array<std::array<double, 3>, 3>;

// Rotation about a unit axis (Rodrigues).
inline Matrix rotation(const std::array<double, 3>& k, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double v = 1.0 - c;
  return {{{c + k[0] * k[0] * v, k[0] * k[1] * v - k[2] * s, k[0] * k[2] * v + k[1] * s},
           {k[1] * k[0] * v + k[2] * s, c + k[1] * k[1] * v, k[1] * k[2] * v - k[0] * s},
           {k[2] * k[0] * v - k[1] * s, k[2] * k[1] * v + k[0] * s, c + k[2] * k[2] * v}}};
}

inline std::array<double, 3> apply(const Matrix& m, const std::array<double, 3>& x) {
  std::array<double, 3> y{};
  for (int i = 0; i < 3; ++i) y[i] = m[i][0] * x[0] + m[i][1] * x[1] + m[i][2] * x[2];
  return y;
}

inline spherekde::SpherePoint unit_point(const std::array<double, 3>& v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  return spherekde::SpherePoint::from_cartesian(v[0] / n, v[1] / n, v[2] / n);
}

}  // namespace oracle
