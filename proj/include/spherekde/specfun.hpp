#pragma once

#include <string>
#include <vector>

#include "spherekde/geometry.hpp"

namespace spherekde {

/// Arithmetic used by the special-function routines. Extended precision
/// runs on MPFR with at least the requested number of mantissa bits.
/// Automatic selects Double for degrees up to kDoubleMaxDegree and
/// Extended(auto_extended_bits(degree)) above.
class PrecisionMode {
 public:
  enum class Kind { Double, Extended, Automatic };

  static PrecisionMode double_precision() { return PrecisionMode(Kind::Double, 53); }
  static PrecisionMode extended(unsigned bits = 256);
  static PrecisionMode automatic() { return PrecisionMode(Kind::Automatic, 0); }

  /// Parses "double", "auto", "extended" or "extended:<bits>".
  static PrecisionMode parse(const std::string& text);

  Kind kind() const { return kind_; }
  unsigned bits() const { return bits_; }
  bool is_extended() const { return kind_ == Kind::Extended; }

  /// Concrete mode for a computation whose largest degree is `max_degree`.
  PrecisionMode resolve(int max_degree) const;

  std::string to_string() const;

  friend bool operator==(const PrecisionMode&, const PrecisionMode&) = default;

 private:
  PrecisionMode(Kind kind, unsigned bits) : kind_(kind), bits_(bits) {}
  Kind kind_;
  unsigned bits_;
};

/// Largest degree for which the alternating closed-form sums are evaluated
/// in double precision under PrecisionMode::automatic().
inline constexpr int kDoubleMaxDegree = 8;

/// Widest supported extended precision.
inline constexpr unsigned kMaxExtendedBits = 2048;

/// Mantissa bits chosen by PrecisionMode::automatic() above the double
/// range: at least 256, growing linearly with the degree.
unsigned auto_extended_bits(int max_degree);

/// Largest tolerated rounding-error bound of a LegendreIntegralTable entry.
inline constexpr double kTableErrorLimit = 1e-9;

/// Legendre polynomial P_ell(u), three-term recurrence.
double legendre_p(int ell, double u, PrecisionMode mode = PrecisionMode::double_precision());

/// All of P_0(u) .. P_maxdeg(u) into `out` (resized).
void legendre_p_all(int max_degree, double u, std::vector<double>& out);

/// P_ell(u) from the alternating power expansion in (1 - u), evaluated in
/// exact rational arithmetic at u = num/den and rounded at the end.
double legendre_p_expansion_exact(int ell, long num, long den);

/// The same expansion evaluated naively in double precision. Kept only to
/// exhibit the cancellation it suffers at high degree.
double legendre_p_expansion_double(int ell, double u);

/// Associated Legendre function P_ell^m(u) = (-1)^m (1-u^2)^{m/2} d^m/du^m
/// P_ell(u), 1 <= m <= ell (Condon-Shortley phase included).
double assoc_legendre(int ell, int m, double u, PrecisionMode mode = PrecisionMode::double_precision());

/// Spherical-harmonic normalization sqrt((2l+1)/(4pi) (l-m)!/(l+m)!).
double sh_norm_const(int ell, int m);

/// Normalized functions N_{l,m} P_l^m(u) for 0 <= m <= l <= max_degree,
/// stored row-major by degree: index l*(l+1)/2 + m. Stable for large l.
void normalized_assoc_legendre_all(int max_degree, double u, std::vector<double>& out);

inline std::size_t triangular_index(int ell, int m) {
  return static_cast<std::size_t>(ell) * (ell + 1) / 2 + m;
}

/// Lower incomplete Beta function int_0^u t^{a-1} (1-t)^{b-1} dt (not
/// regularized).
double incomplete_beta(double u, double a, double b,
                       PrecisionMode mode = PrecisionMode::double_precision());

/// Complete Beta function.
double beta_function(double a, double b);

struct BetaKernelArgs {
  int m;
  int k;
  double gamma1;
  double gamma2;
};

/// B((1+g2)/2; m/2+1, k-m/2+1) - B((1+g1)/2; m/2+1, k-m/2+1).
double beta_kernel(const BetaKernelArgs& args, PrecisionMode mode = PrecisionMode::double_precision());

/// int_{gamma1}^{gamma2} P_ell^m(u) du, 1 <= m <= ell, through the
/// incomplete-Beta closed form.
double assoc_legendre_integral(int ell, int m, double gamma1, double gamma2,
                               PrecisionMode mode = PrecisionMode::automatic());

/// int_{cos theta2}^{cos theta1} P_ell(u) du, 0 <= theta1 < theta2 <= pi,
/// through the power-sum closed form.
double legendre_integral(int ell, double theta1, double theta2,
                         PrecisionMode mode = PrecisionMode::automatic());

/// Integrals of every normalized associated Legendre function over one
/// interval [gamma1, gamma2]: value(l, m) = N_{l,m} int P_l^m(u) du.
/// Computed in the given precision and rounded to double once at the end.
/// Throws NumericalError when cancellation makes the entries unreliable.
class LegendreIntegralTable {
 public:
  LegendreIntegralTable(int max_degree, double gamma1, double gamma2, PrecisionMode mode);

  int max_degree() const { return max_degree_; }
  PrecisionMode mode() const { return mode_; }
  double normalized(int ell, int m) const { return values_[triangular_index(ell, m)]; }
  /// Rounding-error bound over all entries (epsilon times the absolute sum).
  double error_bound() const { return error_bound_; }

 private:
  int max_degree_;
  PrecisionMode mode_;
  std::vector<double> values_;
  double error_bound_ = 0.0;
};

/// Modified Bessel function of the first kind, order zero.
double bessel_i0(double kappa);
/// exp(-kappa) I_0(kappa), finite for all kappa >= 0.
double bessel_i0_scaled(double kappa);

struct AdditionCheck {
  double lhs;
  double rhs;
};

/// Both sides of the spherical-harmonic addition formula at degree ell.
AdditionCheck sh_addition_check(int ell, const SpherePoint& x, const SpherePoint& y);

}  // namespace spherekde
