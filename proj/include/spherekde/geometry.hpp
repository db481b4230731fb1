#pragma once

#include <array>
#include <numbers>
#include <vector>

namespace spherekde {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduce an angle into the half-open interval (-pi, pi].
double wrap_angle(double theta);

/// A point on the unit circle, stored by its polar angle in (-pi, pi].
class CirclePoint {
 public:
  CirclePoint() = default;

  double theta() const { return theta_; }
  double x1() const;
  double x2() const;

  friend CirclePoint point_from_angle(double theta);

 private:
  explicit CirclePoint(double theta) : theta_(theta) {}
  double theta_ = 0.0;
};

/// A point on the unit sphere. Cartesian coordinates are authoritative; the
/// inclination theta in [0, pi] and azimuth phi in (-pi, pi] are cached.
/// At the poles (x1 = x2 = 0) the azimuth is pi.
class SpherePoint {
 public:
  SpherePoint();  // north pole

  /// Accepts vectors whose norm is within 1e-9 of one and renormalizes.
  static SpherePoint from_cartesian(double x1, double x2, double x3);
  static SpherePoint from_cartesian(const std::array<double, 3>& x) {
    return from_cartesian(x[0], x[1], x[2]);
  }

  double x1() const { return x_[0]; }
  double x2() const { return x_[1]; }
  double x3() const { return x_[2]; }
  const std::array<double, 3>& cartesian() const { return x_; }
  double theta() const { return theta_; }
  double phi() const { return phi_; }

  friend SpherePoint sphere_from_angles(double theta, double phi);

 private:
  SpherePoint(const std::array<double, 3>& x, double theta, double phi)
      : x_(x), theta_(theta), phi_(phi) {}

  std::array<double, 3> x_;
  double theta_;
  double phi_;
};

struct SphericalAngles {
  double theta;
  double phi;
};

CirclePoint point_from_angle(double theta);

/// Polar angle of a point (x1, x2) with x1^2 + x2^2 = 1 (tolerance 1e-9).
double angle_of_cartesian(double x1, double x2);

/// theta in [0, pi]; phi is reduced into (-pi, pi].
SpherePoint sphere_from_angles(double theta, double phi);

SphericalAngles angles_of_sphere(const SpherePoint& x);

/// Great-circle (geodesic) distance in radians.
double distance(const CirclePoint& a, const CirclePoint& b);
double distance(const SpherePoint& a, const SpherePoint& b);

double dot(const SpherePoint& a, const SpherePoint& b);

/// Geographic latitude/longitude in degrees, lat in [-90, 90] and
/// lon in (-180, 180] (-180 is accepted as the same meridian as 180).
SpherePoint latlon_to_cartesian(double lat_deg, double lon_deg);

/// Affine map of a period (a, b] onto (-pi, pi].
CirclePoint periodic_to_angle(double t, double a, double b);

// ---------------------------------------------------------------------------
// Regions

struct Arc {
  double lo;
  double hi;
};

/// Disjoint union of closed arcs [lo, hi] with -pi <= lo < hi <= pi. The
/// lower end -pi denotes the open end of (-pi, hi].
class ArcRegion {
 public:
  ArcRegion() = default;
  explicit ArcRegion(std::vector<Arc> arcs);

  /// An arc from `lo` counter-clockwise to `hi`. Angles are wrapped first;
  /// an arc that passes through the +-pi seam is split in two. hi - lo >=
  /// 2 pi gives the full circle; otherwise lo == hi after wrapping is
  /// rejected.
  static ArcRegion span(double lo, double hi);
  static ArcRegion full_circle();

  /// Union with another region; the result must stay disjoint.
  ArcRegion united(const ArcRegion& other) const;

  const std::vector<Arc>& arcs() const { return arcs_; }
  double length() const;

  /// Membership with the half-open [lo, hi) convention, closed at hi = pi.
  bool contains(const CirclePoint& p) const;

 private:
  std::vector<Arc> arcs_;
};

struct Rect {
  double theta_lo;
  double theta_hi;
  double phi_lo;
  double phi_hi;
};

/// Disjoint union of coordinate rectangles [theta_lo, theta_hi] x
/// [phi_lo, phi_hi] with 0 <= theta_lo < theta_hi <= pi and
/// -pi <= phi_lo < phi_hi <= pi.
class RectRegion {
 public:
  RectRegion() = default;
  explicit RectRegion(std::vector<Rect> rects);

  /// Azimuths are wrapped; a range that passes through the seam is split.
  static RectRegion box(double theta_lo, double theta_hi, double phi_lo, double phi_hi);
  static RectRegion full_sphere();
  /// Geographic box in degrees; lon_min > lon_max crosses the antimeridian.
  static RectRegion latlon_box(double lat_min, double lat_max, double lon_min, double lon_max);

  RectRegion united(const RectRegion& other) const;

  const std::vector<Rect>& rects() const { return rects_; }
  double area() const;

  /// Half-open [lo, hi) in theta and phi, closed where hi = pi.
  bool contains(const SpherePoint& p) const;

 private:
  std::vector<Rect> rects_;
};

}  // namespace spherekde
