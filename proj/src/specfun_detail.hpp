// Precision-generic kernels behind the public specfun interface. Every
// template here is instantiated for double and for fixed-width MPFR numbers.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include "spherekde/errors.hpp"

namespace spherekde::detail {

template <unsigned Digits10>
using MpReal = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<Digits10>,
                                             boost::multiprecision::et_off>;

template <class Real>
inline constexpr bool kIsDouble = std::is_same_v<Real, double>;

/// Runs `fn(Real{})` with the narrowest supported MPFR type of at least
/// `bits` mantissa bits.
template <class Fn>
decltype(auto) with_extended(unsigned bits, Fn&& fn) {
  // digits10 d gives ceil(d * log2(10)) + 1 bits or more.
  if (bits <= 64) return fn(MpReal<20>{});
  if (bits <= 128) return fn(MpReal<39>{});
  if (bits <= 256) return fn(MpReal<78>{});
  if (bits <= 512) return fn(MpReal<155>{});
  if (bits <= 1024) return fn(MpReal<309>{});
  return fn(MpReal<617>{});
}

template <class Real>
Real pi_v() {
  if constexpr (kIsDouble<Real>) {
    return 3.14159265358979323846;
  } else {
    return boost::math::constants::pi<Real>();
  }
}

template <class Real>
Real lgamma_pos(const Real& x) {
  if constexpr (kIsDouble<Real>) {
    return boost::math::lgamma(x);
  } else {
    return lgamma(x);
  }
}

template <class Real>
Real to_real(double v) {
  return Real(v);
}

template <class Real>
double to_double(const Real& v) {
  if constexpr (kIsDouble<Real>) {
    return v;
  } else {
    return v.template convert_to<double>();
  }
}

/// Neumaier compensated accumulator.
template <class Real>
class CompensatedSum {
 public:
  void add(const Real& v) {
    using std::abs;
    const Real t = sum_ + v;
    if (abs(sum_) >= abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  Real value() const { return sum_ + comp_; }

 private:
  Real sum_ = 0;
  Real comp_ = 0;
};

// ---------------------------------------------------------------------------
// Polynomials

template <class Real>
Real legendre_recurrence(int ell, const Real& u) {
  if (ell == 0) return Real(1);
  Real prev(1);
  Real cur = u;
  for (int l = 1; l < ell; ++l) {
    Real next = (Real(2 * l + 1) * u * cur - Real(l) * prev) / Real(l + 1);
    prev = cur;
    cur = next;
  }
  return cur;
}

template <class Real>
Real assoc_legendre_recurrence(int ell, int m, const Real& u) {
  using std::sqrt;
  Real pmm(1);
  if (m > 0) {
    const Real somx2 = sqrt((Real(1) - u) * (Real(1) + u));
    Real fact(1);
    for (int i = 1; i <= m; ++i) {
      pmm *= -fact * somx2;
      fact += 2;
    }
  }
  if (ell == m) return pmm;
  Real pmmp1 = u * Real(2 * m + 1) * pmm;
  if (ell == m + 1) return pmmp1;
  Real pll(0);
  for (int ll = m + 2; ll <= ell; ++ll) {
    pll = (Real(2 * ll - 1) * u * pmmp1 - Real(ll + m - 1) * pmm) / Real(ll - m);
    pmm = pmmp1;
    pmmp1 = pll;
  }
  return pll;
}

// ---------------------------------------------------------------------------
// Incomplete Beta

/// Continued fraction for the incomplete Beta function (modified Lentz).
template <class Real>
Real beta_continued_fraction(const Real& a, const Real& b, const Real& x) {
  using std::abs;
  const Real eps = std::numeric_limits<Real>::epsilon();
  const Real tiny = eps * eps * eps;
  const Real qab = a + b;
  const Real qap = a + 1;
  const Real qam = a - 1;
  Real c(1);
  Real d = Real(1) - qab * x / qap;
  if (abs(d) < tiny) d = tiny;
  d = Real(1) / d;
  Real h = d;
  const int max_iter = 20000;
  for (int m = 1; m <= max_iter; ++m) {
    const int m2 = 2 * m;
    Real aa = Real(m) * (b - m) * x / ((qam + m2) * (a + m2));
    d = Real(1) + aa * d;
    if (abs(d) < tiny) d = tiny;
    c = Real(1) + aa / c;
    if (abs(c) < tiny) c = tiny;
    d = Real(1) / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = Real(1) + aa * d;
    if (abs(d) < tiny) d = tiny;
    c = Real(1) + aa / c;
    if (abs(c) < tiny) c = tiny;
    d = Real(1) / d;
    const Real del = d * c;
    h *= del;
    if (abs(del - Real(1)) <= eps) return h;
  }
  throw NumericalError("incomplete Beta continued fraction did not converge");
}

template <class Real>
Real beta_complete(const Real& a, const Real& b) {
  using std::exp;
  return exp(lgamma_pos(a) + lgamma_pos(b) - lgamma_pos(Real(a + b)));
}

/// x^a (1-x)^b for 0 < x < 1.
template <class Real>
Real beta_prefactor(const Real& x, const Real& a, const Real& b) {
  using std::exp;
  using std::log;
  using std::log1p;
  return exp(a * log(x) + b * log1p(-x));
}

/// Non-regularized lower incomplete Beta B(x; a, b).
template <class Real>
Real incomplete_beta_impl(const Real& x, const Real& a, const Real& b) {
  if (x <= 0) return Real(0);
  if (x >= 1) return beta_complete(a, b);
  const Real front = beta_prefactor(x, a, b);
  if (x < (a + 1) / (a + b + 2)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return beta_complete(a, b) - front * beta_continued_fraction(b, a, Real(Real(1) - x)) / b;
}

/// table[m][k] = B(t; m/2 + 1, k - m/2 + 1) for 1 <= m <= k <= max_degree.
/// Seeded by the continued fraction at k = m and advanced in k with
/// B(t; a, b+1) = b/(a+b) B(t; a, b) + t^a (1-t)^b / (a+b), whose terms are
/// all nonnegative.
template <class Real>
std::vector<std::vector<Real>> beta_kernel_table(int max_degree, const Real& t) {
  std::vector<std::vector<Real>> table(max_degree + 1);
  for (int m = 1; m <= max_degree; ++m) {
    table[m].assign(max_degree + 1, Real(0));
    const Real a = Real(m) / 2 + 1;
    Real b = a;  // k = m
    Real value = incomplete_beta_impl(t, a, b);
    table[m][m] = value;
    if (t <= 0) continue;
    Real front = (t >= 1) ? Real(0) : beta_prefactor(t, a, b);
    const Real one_minus_t = Real(1) - t;
    for (int k = m + 1; k <= max_degree; ++k) {
      value = (b * value + front) / (a + b);
      front *= one_minus_t;
      b += 1;
      table[m][k] = value;
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Coefficients of the power expansion of P_ell in (1 - u)

/// log(k!) for k >= 0.
double log_factorial(int k);

/// Coefficient C(l,k) C(l+k,k) * scale where log(scale) = log_extra, as a
/// double built in log space.
inline double binomial_product_double(int ell, int k, double log_extra) {
  return std::exp(log_factorial(ell + k) - 2.0 * log_factorial(k) - log_factorial(ell - k) +
                  log_extra);
}

using BigInt = boost::multiprecision::cpp_int;

inline BigInt big_factorial(int n) {
  BigInt r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

/// Exact C(l,k) C(l+k,k) = (l+k)! / (k!^2 (l-k)!) for 0 <= k <= l <= max.
inline std::vector<std::vector<BigInt>> binomial_product_table(int max_degree) {
  std::vector<BigInt> fact(2 * max_degree + 1);
  fact[0] = 1;
  for (int i = 1; i <= 2 * max_degree; ++i) fact[i] = fact[i - 1] * i;
  std::vector<std::vector<BigInt>> table(max_degree + 1);
  for (int l = 0; l <= max_degree; ++l) {
    table[l].resize(l + 1);
    for (int k = 0; k <= l; ++k) table[l][k] = fact[l + k] / (fact[k] * fact[k] * fact[l - k]);
  }
  return table;
}

/// N_{l,m} * int_{g1}^{g2} P_l^m(u) du for 0 <= m <= l <= max_degree,
/// triangular row-major layout. The m = 0 entries use the power sum in
/// (1 - u); m >= 1 entries use the incomplete-Beta form.
/// Normalized integral values together with a running bound on their
/// rounding error (machine epsilon times the sum of absolute terms).
struct IntegralTableResult {
  std::vector<double> values;
  double error_bound = 0.0;
};

template <class Real>
IntegralTableResult normalized_integral_table(int max_degree, double gamma1, double gamma2) {
  using std::pow;
  using std::sqrt;
  const Real g1(gamma1);
  const Real g2(gamma2);
  const Real four_pi = Real(4) * pi_v<Real>();
  using std::abs;
  std::vector<double> out(static_cast<std::size_t>(max_degree + 1) * (max_degree + 2) / 2, 0.0);
  const double eps = to_double(Real(std::numeric_limits<Real>::epsilon()));
  double error_bound = 0.0;

  // Powers (1 - g)^{k+1}.
  std::vector<Real> pow_lo(max_degree + 2), pow_hi(max_degree + 2);
  {
    const Real one_minus_lo = Real(1) - g1;  // 1 - cos(theta2)
    const Real one_minus_hi = Real(1) - g2;  // 1 - cos(theta1)
    pow_lo[0] = Real(1);
    pow_hi[0] = Real(1);
    for (int k = 1; k <= max_degree + 1; ++k) {
      pow_lo[k] = pow_lo[k - 1] * one_minus_lo;
      pow_hi[k] = pow_hi[k - 1] * one_minus_hi;
    }
  }

  const Real t1 = (Real(1) + g1) / 2;
  const Real t2 = (Real(1) + g2) / 2;
  const auto beta_lo = beta_kernel_table<Real>(max_degree, t1);
  const auto beta_hi = beta_kernel_table<Real>(max_degree, t2);

  if constexpr (kIsDouble<Real>) {
    for (int l = 0; l <= max_degree; ++l) {
      const double log_norm0 = 0.5 * std::log((2.0 * l + 1.0) / (4.0 * 3.14159265358979323846));
      CompensatedSum<double> s0;
      double magnitude = 0.0;
      for (int k = 0; k <= l; ++k) {
        const double c = binomial_product_double(l, k, log_norm0 - k * std::log(2.0));
        const double term = c / (k + 1) * (pow_lo[k + 1] - pow_hi[k + 1]);
        s0.add((k % 2 == 0) ? term : -term);
        magnitude += std::abs(term);
      }
      out[l * (l + 1) / 2] = s0.value();
      error_bound = std::max(error_bound, eps * magnitude);
      for (int m = 1; m <= l; ++m) {
        const double log_norm =
            0.5 * (std::log((2.0 * l + 1.0) / (4.0 * 3.14159265358979323846)) +
                   log_factorial(l - m) - log_factorial(l + m));
        CompensatedSum<double> s;
        double magnitude = 0.0;
        for (int k = m; k <= l; ++k) {
          const double c = binomial_product_double(
              l, k, std::log(2.0) + log_factorial(k) - log_factorial(k - m) + log_norm);
          const double term = c * (beta_hi[m][k] - beta_lo[m][k]);
          s.add((k % 2 == 0) ? term : -term);
          magnitude += std::abs(term);
        }
        out[l * (l + 1) / 2 + m] = s.value();
        error_bound = std::max(error_bound, eps * magnitude);
      }
    }
  } else {
    const auto binom = binomial_product_table(max_degree);
    std::vector<BigInt> fact(2 * max_degree + 1);
    fact[0] = 1;
    for (int i = 1; i <= 2 * max_degree; ++i) fact[i] = fact[i - 1] * i;
    // Kernel differences and falling factorials k!/(k-m)! as Real.
    for (int l = 0; l <= max_degree; ++l) {
      Real s0(0);
      Real magnitude0(0);
      Real half_pow(1);  // (1/2)^k
      for (int k = 0; k <= l; ++k) {
        Real term = Real(binom[l][k]) * half_pow / Real(k + 1) * (pow_lo[k + 1] - pow_hi[k + 1]);
        if (k % 2 == 0) {
          s0 += term;
        } else {
          s0 -= term;
        }
        magnitude0 += abs(term);
        half_pow /= 2;
      }
      const Real norm0 = sqrt(Real(2 * l + 1) / four_pi);
      out[l * (l + 1) / 2] = to_double(Real(norm0 * s0));
      error_bound = std::max(error_bound, eps * to_double(Real(norm0 * magnitude0)));
      for (int m = 1; m <= l; ++m) {
        Real s(0);
        Real magnitude(0);
        for (int k = m; k <= l; ++k) {
          const BigInt coeff = binom[l][k] * 2 * (fact[k] / fact[k - m]);
          Real term = Real(coeff) * (beta_hi[m][k] - beta_lo[m][k]);
          if (k % 2 == 0) {
            s += term;
          } else {
            s -= term;
          }
          magnitude += abs(term);
        }
        const Real norm = sqrt(Real(2 * l + 1) / four_pi * Real(fact[l - m]) / Real(fact[l + m]));
        out[l * (l + 1) / 2 + m] = to_double(Real(norm * s));
        error_bound = std::max(error_bound, eps * to_double(Real(norm * magnitude)));
      }
    }
  }
  return {std::move(out), error_bound};
}

}  // namespace spherekde::detail
