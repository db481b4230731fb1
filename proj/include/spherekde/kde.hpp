#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spherekde/geometry.hpp"

namespace spherekde {

/// Smallest integer strictly greater than s (so strict_ceil(1) == 2).
int strict_ceil(double s);

/// 2d + strict_ceil(s) + 1.
int default_r(int d, double s);

/// n^(-1/(2s+d)).
double bandwidth(long n, double s, int d);

/// floor((n^((s+r)/(2s+d)) / (d pi (r-d)))^(1/(r-d))) + 1. Requires r > d.
int truncation_index(long n, double s, int d, int r);

/// g_r(lambda) = 1 / (1 + |lambda|^r).
double symbol_g_r(int r, double lambda);

struct KdeConfig {
  int d = 1;
  double s = 1.0;
  int r = 5;
  long n = 1;
  double h = 1.0;
  int cutoff = 1;  // N_s
  bool r_defaulted = true;

  /// Derives h and N_s. When r is omitted default_r(d, s) is used.
  static KdeConfig make(int d, double s, long n, std::optional<int> r = std::nullopt);

  /// Copy with N_s replaced; h and the rest are kept.
  KdeConfig with_cutoff(int cutoff) const;
};

struct SampleMetadata {
  std::string source;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> stream;
  /// Mixture component of each draw, when the sample came from a mixture.
  std::vector<int> components;
};

struct SampleS1 {
  std::vector<CirclePoint> points;
  SampleMetadata meta;
  std::size_t size() const { return points.size(); }
};

struct SampleS2 {
  std::vector<SpherePoint> points;
  SampleMetadata meta;
  std::size_t size() const { return points.size(); }
};

/// Finite-order Fourier estimator on the circle. The trigonometric moments
/// of the sample are accumulated once, so evaluation is O(N_s).
class KdeS1 {
 public:
  KdeS1(const SampleS1& sample, const KdeConfig& cfg);

  double operator()(double theta) const;

  const KdeConfig& config() const { return cfg_; }
  /// g(h l) for l = 0..N_s.
  const std::vector<double>& symbols() const { return g_; }
  /// Sums over the sample of cos(l theta_j) and sin(l theta_j).
  const std::vector<double>& cos_moments() const { return a_; }
  const std::vector<double>& sin_moments() const { return b_; }

 private:
  KdeConfig cfg_;
  std::vector<double> g_;
  std::vector<double> a_;
  std::vector<double> b_;
};

/// Finite-order Legendre estimator on the sphere.
class KdeS2 {
 public:
  KdeS2(const SampleS2& sample, const KdeConfig& cfg);

  double operator()(const SpherePoint& x) const;

  const KdeConfig& config() const { return cfg_; }
  const std::vector<SpherePoint>& points() const { return points_; }
  /// g(h sqrt(l(l+1))) for l = 0..N_s.
  const std::vector<double>& symbols() const { return g_; }
  /// (2l+1)/(4 pi) g(h sqrt(l(l+1))).
  const std::vector<double>& coefficients() const { return c_; }

 private:
  KdeConfig cfg_;
  std::vector<SpherePoint> points_;
  std::vector<double> g_;
  std::vector<double> c_;
};

double kde_eval_s1(const SampleS1& sample, const KdeConfig& cfg, double theta);
double kde_eval_s2(const SampleS2& sample, const KdeConfig& cfg, const SpherePoint& x);

struct GridSpec {
  int theta_count = 65;  // S1: points over [-pi, pi]; S2: inclination points over [0, pi]
  int phi_count = 0;     // S2 only: azimuth points over [-pi, pi]
};

struct GridValue {
  double theta;
  double phi;  // 0 on S1
  double value;
};

/// Equispaced grid including both end points, row-major with theta outer
/// and phi inner. The S2 default 33 x 65 is a pi/32 step in each angle.
std::vector<GridValue> kde_grid_eval(const KdeS1& kde, const GridSpec& grid);
std::vector<GridValue> kde_grid_eval(const KdeS2& kde, const GridSpec& grid);

}  // namespace spherekde
