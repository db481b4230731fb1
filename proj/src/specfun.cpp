#include "spherekde/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "specfun_detail.hpp"

namespace spherekde {

namespace detail {

double log_factorial(int k) {
  static const std::vector<double> table = [] {
    std::vector<double> t(1025, 0.0);
    for (int i = 2; i < static_cast<int>(t.size()); ++i) t[i] = t[i - 1] + std::log(double(i));
    return t;
  }();
  if (k < static_cast<int>(table.size())) return table[k];
  return boost::math::lgamma(double(k) + 1.0);
}

}  // namespace detail

namespace {

void require_unit_interval(double u, const char* fn) {
  if (!(u >= -1.0 && u <= 1.0)) {
    throw std::invalid_argument(std::string(fn) + ": argument must lie in [-1, 1]");
  }
}

// Dispatches `fn(Real{})` on the concrete precision of `mode`.
template <class Fn>
decltype(auto) dispatch(PrecisionMode mode, Fn&& fn) {
  if (mode.kind() == PrecisionMode::Kind::Extended) return detail::with_extended(mode.bits(), fn);
  return fn(double{});
}

template <class Real>
Real assoc_integral_single(int ell, int m, double gamma1, double gamma2) {
  const Real g1(gamma1);
  const Real g2(gamma2);
  const Real t1 = (Real(1) + g1) / 2;
  const Real t2 = (Real(1) + g2) / 2;
  const Real a = Real(m) / 2 + 1;
  if constexpr (detail::kIsDouble<Real>) {
    detail::CompensatedSum<double> sum;
    for (int k = m; k <= ell; ++k) {
      const double b = k - m / 2.0 + 1.0;
      const double kernel =
          detail::incomplete_beta_impl(t2, a, b) - detail::incomplete_beta_impl(t1, a, b);
      const double c = detail::binomial_product_double(
          ell, k, std::log(2.0) + detail::log_factorial(k) - detail::log_factorial(k - m));
      sum.add((k % 2 == 0 ? c : -c) * kernel);
    }
    return sum.value();
  } else {
    const auto binom = detail::binomial_product_table(ell);
    Real sum(0);
    for (int k = m; k <= ell; ++k) {
      const Real b = Real(k) - Real(m) / 2 + 1;
      const Real kernel =
          detail::incomplete_beta_impl(t2, a, b) - detail::incomplete_beta_impl(t1, a, b);
      const detail::BigInt coeff =
          binom[ell][k] * 2 * (detail::big_factorial(k) / detail::big_factorial(k - m));
      const Real term = Real(coeff) * kernel;
      if (k % 2 == 0) {
        sum += term;
      } else {
        sum -= term;
      }
    }
    return sum;
  }
}

template <class Real>
Real legendre_integral_single(int ell, double gamma_lo, double gamma_hi) {
  const Real lo = Real(1) - Real(gamma_lo);
  const Real hi = Real(1) - Real(gamma_hi);
  if constexpr (detail::kIsDouble<Real>) {
    detail::CompensatedSum<double> sum;
    for (int k = 0; k <= ell; ++k) {
      const double c = detail::binomial_product_double(ell, k, -k * std::log(2.0));
      const double diff = std::pow(lo, k + 1) - std::pow(hi, k + 1);
      sum.add((k % 2 == 0 ? c : -c) * diff / (k + 1));
    }
    return sum.value();
  } else {
    using std::pow;
    const auto binom = detail::binomial_product_table(ell);
    Real sum(0);
    Real half_pow(1);
    for (int k = 0; k <= ell; ++k) {
      const Real term =
          Real(binom[ell][k]) * half_pow * (pow(lo, k + 1) - pow(hi, k + 1)) / Real(k + 1);
      if (k % 2 == 0) {
        sum += term;
      } else {
        sum -= term;
      }
      half_pow /= 2;
    }
    return sum;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// PrecisionMode

PrecisionMode PrecisionMode::extended(unsigned bits) {
  if (bits < 64) throw std::invalid_argument("extended precision needs at least 64 bits");
  if (bits > kMaxExtendedBits) {
    throw std::invalid_argument("extended precision is limited to " +
                                std::to_string(kMaxExtendedBits) + " bits");
  }
  return PrecisionMode(Kind::Extended, bits);
}

PrecisionMode PrecisionMode::parse(const std::string& text) {
  if (text == "double") return double_precision();
  if (text == "auto") return automatic();
  if (text == "extended") return extended();
  const std::string prefix = "extended:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string digits = text.substr(prefix.size());
    std::size_t pos = 0;
    unsigned long bits = 0;
    try {
      bits = std::stoul(digits, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != digits.size()) {
      throw std::invalid_argument("bad precision bits: '" + digits + "'");
    }
    return extended(static_cast<unsigned>(bits));
  }
  throw std::invalid_argument("unknown precision mode '" + text +
                              "' (expected double, auto, extended or extended:<bits>)");
}

unsigned auto_extended_bits(int max_degree) {
  // The alternating sums lose a little under 3 bits per degree.
  const long bits = 3L * std::max(max_degree, 0) + 96;
  return static_cast<unsigned>(std::clamp<long>(bits, 256, kMaxExtendedBits));
}

PrecisionMode PrecisionMode::resolve(int max_degree) const {
  if (kind_ != Kind::Automatic) return *this;
  if (max_degree <= kDoubleMaxDegree) return double_precision();
  return extended(auto_extended_bits(max_degree));
}

std::string PrecisionMode::to_string() const {
  switch (kind_) {
    case Kind::Double:
      return "double";
    case Kind::Extended:
      return "extended:" + std::to_string(bits_);
    case Kind::Automatic:
      return "auto";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Legendre functions

double legendre_p(int ell, double u, PrecisionMode mode) {
  if (ell < 0) throw std::invalid_argument("legendre_p: degree must be nonnegative");
  require_unit_interval(u, "legendre_p");
  mode = mode.resolve(ell);
  return dispatch(mode, [&](auto tag) {
    using Real = decltype(tag);
    return detail::to_double(detail::legendre_recurrence(ell, Real(u)));
  });
}

void legendre_p_all(int max_degree, double u, std::vector<double>& out) {
  out.resize(max_degree + 1);
  out[0] = 1.0;
  if (max_degree == 0) return;
  out[1] = u;
  for (int l = 1; l < max_degree; ++l) {
    out[l + 1] = ((2 * l + 1) * u * out[l] - l * out[l - 1]) / (l + 1);
  }
}

double legendre_p_expansion_exact(int ell, long num, long den) {
  using boost::multiprecision::cpp_int;
  using boost::multiprecision::cpp_rational;
  if (ell < 0 || den == 0) throw std::invalid_argument("legendre_p_expansion_exact: bad input");
  const cpp_rational u{cpp_int(num), cpp_int(den)};
  if (u < -1 || u > 1) throw std::invalid_argument("legendre_p_expansion_exact: |u| > 1");
  const auto binom = detail::binomial_product_table(ell);
  const cpp_rational w = (1 - u) / 2;
  cpp_rational sum = 0;
  cpp_rational power = 1;
  for (int k = 0; k <= ell; ++k) {
    const cpp_rational term = cpp_rational(binom[ell][k]) * power;
    sum += (k % 2 == 0) ? term : cpp_rational(-term);
    power *= w;
  }
  return sum.convert_to<double>();
}

double legendre_p_expansion_double(int ell, double u) {
  double sum = 0.0;
  double power = 1.0;
  const double w = (1.0 - u) / 2.0;
  for (int k = 0; k <= ell; ++k) {
    double c = 1.0;  // C(l,k) C(l+k,k) accumulated as a double product
    for (int i = 1; i <= k; ++i) c = c * (ell - k + i) / i * (ell + i) / i;
    sum += ((k % 2 == 0) ? c : -c) * power;
    power *= w;
  }
  return sum;
}

double assoc_legendre(int ell, int m, double u, PrecisionMode mode) {
  if (!(m >= 1 && m <= ell)) throw std::invalid_argument("assoc_legendre: need 1 <= m <= ell");
  require_unit_interval(u, "assoc_legendre");
  mode = mode.resolve(ell);
  return dispatch(mode, [&](auto tag) {
    using Real = decltype(tag);
    return detail::to_double(detail::assoc_legendre_recurrence(ell, m, Real(u)));
  });
}

double sh_norm_const(int ell, int m) {
  if (!(m >= 0 && m <= ell)) throw std::invalid_argument("sh_norm_const: need 0 <= m <= ell");
  const double log_ratio = detail::log_factorial(ell - m) - detail::log_factorial(ell + m);
  return std::sqrt((2.0 * ell + 1.0) / (4.0 * kPi)) * std::exp(0.5 * log_ratio);
}

void normalized_assoc_legendre_all(int max_degree, double u, std::vector<double>& out) {
  out.assign(triangular_index(max_degree, max_degree) + 1, 0.0);
  const double s = std::sqrt((1.0 - u) * (1.0 + u));
  double pmm = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 0; m <= max_degree; ++m) {
    if (m > 0) pmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
    out[triangular_index(m, m)] = pmm;
    if (m == max_degree) break;
    double prev = pmm;
    double cur = std::sqrt(2.0 * m + 3.0) * u * pmm;
    out[triangular_index(m + 1, m)] = cur;
    for (int l = m + 2; l <= max_degree; ++l) {
      const double l2 = double(l) * l;
      const double m2 = double(m) * m;
      const double a = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
      const double lm1 = l - 1.0;
      const double b = std::sqrt((lm1 * lm1 - m2) / (4.0 * lm1 * lm1 - 1.0));
      const double next = a * (u * cur - b * prev);
      prev = cur;
      cur = next;
      out[triangular_index(l, m)] = cur;
    }
  }
}

// ---------------------------------------------------------------------------
// Beta family

double incomplete_beta(double u, double a, double b, PrecisionMode mode) {
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("incomplete_beta: u must lie in [0, 1]");
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("incomplete_beta: a, b must be positive");
  mode = mode.resolve(0);
  return dispatch(mode, [&](auto tag) {
    using Real = decltype(tag);
    return detail::to_double(detail::incomplete_beta_impl(Real(u), Real(a), Real(b)));
  });
}

double beta_function(double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("beta_function: a, b must be positive");
  return detail::beta_complete(a, b);
}

double beta_kernel(const BetaKernelArgs& args, PrecisionMode mode) {
  if (!(args.m >= 1 && args.m <= args.k)) throw std::invalid_argument("beta_kernel: need 1 <= m <= k");
  require_unit_interval(args.gamma1, "beta_kernel");
  require_unit_interval(args.gamma2, "beta_kernel");
  if (args.gamma1 > args.gamma2) throw std::invalid_argument("beta_kernel: need gamma1 <= gamma2");
  mode = mode.resolve(args.k);
  return dispatch(mode, [&](auto tag) {
    using Real = decltype(tag);
    const Real a = Real(args.m) / 2 + 1;
    const Real b = Real(args.k) - Real(args.m) / 2 + 1;
    const Real t1 = (Real(1) + Real(args.gamma1)) / 2;
    const Real t2 = (Real(1) + Real(args.gamma2)) / 2;
    return detail::to_double(
        Real(detail::incomplete_beta_impl(t2, a, b) - detail::incomplete_beta_impl(t1, a, b)));
  });
}

double assoc_legendre_integral(int ell, int m, double gamma1, double gamma2, PrecisionMode mode) {
  if (!(m >= 1 && m <= ell)) throw std::invalid_argument("assoc_legendre_integral: need 1 <= m <= ell");
  require_unit_interval(gamma1, "assoc_legendre_integral");
  require_unit_interval(gamma2, "assoc_legendre_integral");
  if (!(gamma1 < gamma2)) throw std::invalid_argument("assoc_legendre_integral: need gamma1 < gamma2");
  mode = mode.resolve(ell);
  return dispatch(mode, [&](auto tag) {
    using Real = decltype(tag);
    return detail::to_double(assoc_integral_single<Real>(ell, m, gamma1, gamma2));
  });
}

double legendre_integral(int ell, double theta1, double theta2, PrecisionMode mode) {
  if (ell < 0) throw std::invalid_argument("legendre_integral: degree must be nonnegative");
  if (!(theta1 >= 0.0 && theta1 < theta2 && theta2 <= kPi)) {
    throw std::invalid_argument("legendre_integral: need 0 <= theta1 < theta2 <= pi");
  }
  mode = mode.resolve(ell);
  const double gamma_lo = std::cos(theta2);
  const double gamma_hi = theta1 == 0.0 ? 1.0 : std::cos(theta1);
  return dispatch(mode, [&](auto tag) {
    using Real = decltype(tag);
    return detail::to_double(legendre_integral_single<Real>(ell, gamma_lo, gamma_hi));
  });
}

LegendreIntegralTable::LegendreIntegralTable(int max_degree, double gamma1, double gamma2,
                                             PrecisionMode mode)
    : max_degree_(max_degree), mode_(mode.resolve(max_degree)) {
  if (max_degree < 0) throw std::invalid_argument("LegendreIntegralTable: negative degree");
  require_unit_interval(gamma1, "LegendreIntegralTable");
  require_unit_interval(gamma2, "LegendreIntegralTable");
  if (!(gamma1 < gamma2)) throw std::invalid_argument("LegendreIntegralTable: need gamma1 < gamma2");
  auto result = dispatch(mode_, [&](auto tag) {
    using Real = decltype(tag);
    return detail::normalized_integral_table<Real>(max_degree, gamma1, gamma2);
  });
  values_ = std::move(result.values);
  error_bound_ = result.error_bound;
  const bool finite = std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
  if (!finite || !(error_bound_ <= kTableErrorLimit)) {
    throw NumericalError("cancellation in the degree-" + std::to_string(max_degree) +
                         " Legendre integral table exceeds the error limit in " + mode_.to_string() +
                         "; raise the extended precision bits");
  }
}

// ---------------------------------------------------------------------------
// Bessel

double bessel_i0_scaled(double kappa) {
  if (!(kappa >= 0.0)) throw std::invalid_argument("bessel_i0: kappa must be nonnegative");
  if (kappa <= 15.0) {
    // sum_k (kappa^2/4)^k / (k!)^2, all terms positive.
    const double q = kappa * kappa / 4.0;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 500; ++k) {
      term *= q / (double(k) * k);
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return sum * std::exp(-kappa);
  }
  // Asymptotic series, truncated at its smallest term.
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * kappa);
    if (next > term) break;
    term = next;
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum / std::sqrt(2.0 * kPi * kappa);
}

double bessel_i0(double kappa) {
  if (!(kappa >= 0.0)) throw std::invalid_argument("bessel_i0: kappa must be nonnegative");
  if (kappa <= 15.0) return bessel_i0_scaled(kappa) * std::exp(kappa);
  return std::exp(kappa + std::log(bessel_i0_scaled(kappa)));
}

// ---------------------------------------------------------------------------

AdditionCheck sh_addition_check(int ell, const SpherePoint& x, const SpherePoint& y) {
  if (ell < 0 || ell > 30) throw std::invalid_argument("sh_addition_check: need 0 <= ell <= 30");
  const double lhs = (2.0 * ell + 1.0) / (4.0 * kPi) * legendre_p(ell, std::clamp(dot(x, y), -1.0, 1.0));

  auto harmonic = [&](int m, const SpherePoint& p) {
    const double ux = p.x3();
    const double radial = m == 0 ? legendre_p(ell, ux) : assoc_legendre(ell, m, ux);
    return sh_norm_const(ell, m) * radial * std::polar(1.0, m * p.phi());
  };

  std::complex<double> rhs = 0.0;
  for (int m = 0; m <= ell; ++m) {
    const std::complex<double> yx = harmonic(m, x);
    const std::complex<double> yy = harmonic(m, y);
    rhs += yx * std::conj(yy);
    if (m > 0) {
      // Y^{-m} = (-1)^m conj(Y^m); the two signs cancel in the product.
      rhs += std::conj(yx) * yy;
    }
  }
  return {lhs, rhs.real()};
}

}  // namespace spherekde
