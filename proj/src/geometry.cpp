#include "spherekde/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace spherekde {

namespace {

constexpr double kNormTolerance = 1e-9;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be finite");
  }
}

// Membership in [lo, hi) with the upper end closed when it is the domain
// maximum pi.
bool in_half_open(double v, double lo, double hi) {
  return (v >= lo && v < hi) || (hi == kPi && v == kPi);
}

}  // namespace

double wrap_angle(double theta) {
  require_finite(theta, "angle");
  if (theta > -kPi && theta <= kPi) return theta;
  double r = std::remainder(theta, kTwoPi);  // in [-pi, pi]
  if (r <= -kPi) r += kTwoPi;
  return r;
}

double CirclePoint::x1() const { return std::cos(theta_); }
double CirclePoint::x2() const { return std::sin(theta_); }

CirclePoint point_from_angle(double theta) { return CirclePoint(wrap_angle(theta)); }

double angle_of_cartesian(double x1, double x2) {
  require_finite(x1, "x1");
  require_finite(x2, "x2");
  if (std::abs(x1 * x1 + x2 * x2 - 1.0) > kNormTolerance) {
    throw std::invalid_argument("angle_of_cartesian: point is not on the unit circle");
  }
  // Same value as +-arccos(x1) selected by the sign of x2, evaluated with
  // atan2 for accuracy near the axis.
  double t = std::atan2(x2, x1);
  if (x2 >= 0.0 && t < 0.0) t = -t;  // atan2(-0.0, x)
  return t <= -kPi ? kPi : t;
}

SpherePoint::SpherePoint() : x_{0.0, 0.0, 1.0}, theta_(0.0), phi_(kPi) {}

SpherePoint SpherePoint::from_cartesian(double x1, double x2, double x3) {
  require_finite(x1, "x1");
  require_finite(x2, "x2");
  require_finite(x3, "x3");
  const double norm = std::sqrt(x1 * x1 + x2 * x2 + x3 * x3);
  if (std::abs(norm - 1.0) > kNormTolerance) {
    throw std::invalid_argument("SpherePoint: vector is not of unit norm");
  }
  // Vectors already normalized to rounding are kept bit for bit, so that
  // written samples read back unchanged.
  const double scale = std::abs(norm - 1.0) <= 4 * std::numeric_limits<double>::epsilon() ? 1.0 : norm;
  const std::array<double, 3> x{x1 / scale, x2 / scale, x3 / scale};
  const double rho = std::hypot(x[0], x[1]);
  // theta = arccos(x3), computed in the well-conditioned atan2 form.
  const double theta = std::atan2(rho, x[2]);
  double phi = kPi;
  if (x[0] != 0.0 || x[1] != 0.0) {
    phi = std::atan2(x[1], x[0]);
    if (phi <= -kPi) phi = kPi;
  }
  return SpherePoint(x, theta, phi);
}

SpherePoint sphere_from_angles(double theta, double phi) {
  require_finite(theta, "theta");
  if (theta < 0.0 || theta > kPi) {
    throw std::invalid_argument("sphere_from_angles: theta must lie in [0, pi]");
  }
  phi = wrap_angle(phi);
  if (theta == 0.0) return SpherePoint({0.0, 0.0, 1.0}, 0.0, kPi);
  if (theta == kPi) return SpherePoint({0.0, 0.0, -1.0}, kPi, kPi);
  const double st = std::sin(theta);
  return SpherePoint({st * std::cos(phi), st * std::sin(phi), std::cos(theta)}, theta, phi);
}

SphericalAngles angles_of_sphere(const SpherePoint& x) { return {x.theta(), x.phi()}; }

double distance(const CirclePoint& a, const CirclePoint& b) {
  const double diff = std::abs(a.theta() - b.theta());
  return std::min(diff, kTwoPi - diff);
}

double dot(const SpherePoint& a, const SpherePoint& b) {
  return a.x1() * b.x1() + a.x2() * b.x2() + a.x3() * b.x3();
}

double distance(const SpherePoint& a, const SpherePoint& b) {
  // arccos(<a, b>) via atan2(|a x b|, <a, b>), which stays accurate for
  // nearly equal and nearly antipodal points and never sees |dot| > 1.
  const double c1 = a.x2() * b.x3() - a.x3() * b.x2();
  const double c2 = a.x3() * b.x1() - a.x1() * b.x3();
  const double c3 = a.x1() * b.x2() - a.x2() * b.x1();
  const double d = std::clamp(dot(a, b), -1.0, 1.0);
  return std::atan2(std::sqrt(c1 * c1 + c2 * c2 + c3 * c3), d);
}

SpherePoint latlon_to_cartesian(double lat_deg, double lon_deg) {
  require_finite(lat_deg, "latitude");
  require_finite(lon_deg, "longitude");
  if (lat_deg < -90.0 || lat_deg > 90.0) {
    throw std::invalid_argument("latitude must lie in [-90, 90]");
  }
  if (lon_deg < -180.0 || lon_deg > 180.0) {
    throw std::invalid_argument("longitude must lie in [-180, 180]");
  }
  if (std::abs(lat_deg) == 90.0) return SpherePoint::from_cartesian(0.0, 0.0, lat_deg > 0 ? 1.0 : -1.0);
  const double lat = lat_deg * kPi / 180.0;
  const double lon = lon_deg * kPi / 180.0;
  return SpherePoint::from_cartesian(std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon),
                                     std::sin(lat));
}

CirclePoint periodic_to_angle(double t, double a, double b) {
  require_finite(t, "t");
  require_finite(a, "a");
  require_finite(b, "b");
  if (!(a < b)) throw std::invalid_argument("periodic_to_angle: need a < b");
  if (!(t > a && t <= b)) throw std::invalid_argument("periodic_to_angle: t must lie in (a, b]");
  return point_from_angle(kTwoPi * (t - a) / (b - a) - kPi);
}

// ---------------------------------------------------------------------------

ArcRegion::ArcRegion(std::vector<Arc> arcs) : arcs_(std::move(arcs)) {
  for (const Arc& a : arcs_) {
    require_finite(a.lo, "arc bound");
    require_finite(a.hi, "arc bound");
    if (!(a.lo >= -kPi && a.lo < a.hi && a.hi <= kPi)) {
      throw std::invalid_argument("arc bounds must satisfy -pi <= lo < hi <= pi");
    }
  }
  std::sort(arcs_.begin(), arcs_.end(), [](const Arc& x, const Arc& y) { return x.lo < y.lo; });
  for (std::size_t i = 1; i < arcs_.size(); ++i) {
    if (arcs_[i].lo < arcs_[i - 1].hi) throw std::invalid_argument("arcs overlap");
  }
}

ArcRegion ArcRegion::span(double lo, double hi) {
  require_finite(lo, "arc bound");
  require_finite(hi, "arc bound");
  if (hi - lo >= kTwoPi) return full_circle();
  lo = wrap_angle(lo);
  hi = wrap_angle(hi);
  if (lo == hi) throw std::invalid_argument("empty arc: lo equals hi");
  if (lo == kPi) lo = -kPi;  // starting at the seam: no split needed
  if (lo < hi) return ArcRegion({{lo, hi}});
  // Passes through the seam: [lo, pi] u (-pi, hi].
  return ArcRegion({{-kPi, hi}, {lo, kPi}});
}

ArcRegion ArcRegion::full_circle() { return ArcRegion({{-kPi, kPi}}); }

ArcRegion ArcRegion::united(const ArcRegion& other) const {
  std::vector<Arc> all = arcs_;
  all.insert(all.end(), other.arcs_.begin(), other.arcs_.end());
  return ArcRegion(std::move(all));
}

double ArcRegion::length() const {
  double total = 0.0;
  for (const Arc& a : arcs_) total += a.hi - a.lo;
  return total;
}

bool ArcRegion::contains(const CirclePoint& p) const {
  return std::any_of(arcs_.begin(), arcs_.end(),
                     [&](const Arc& a) { return in_half_open(p.theta(), a.lo, a.hi); });
}

RectRegion::RectRegion(std::vector<Rect> rects) : rects_(std::move(rects)) {
  for (const Rect& r : rects_) {
    for (double v : {r.theta_lo, r.theta_hi, r.phi_lo, r.phi_hi}) require_finite(v, "rect bound");
    if (!(r.theta_lo >= 0.0 && r.theta_lo < r.theta_hi && r.theta_hi <= kPi)) {
      throw std::invalid_argument("rect theta bounds must satisfy 0 <= lo < hi <= pi");
    }
    if (!(r.phi_lo >= -kPi && r.phi_lo < r.phi_hi && r.phi_hi <= kPi)) {
      throw std::invalid_argument("rect phi bounds must satisfy -pi <= lo < hi <= pi");
    }
  }
  for (std::size_t i = 0; i < rects_.size(); ++i) {
    for (std::size_t j = i + 1; j < rects_.size(); ++j) {
      const Rect& a = rects_[i];
      const Rect& b = rects_[j];
      const bool theta_overlap = a.theta_lo < b.theta_hi && b.theta_lo < a.theta_hi;
      const bool phi_overlap = a.phi_lo < b.phi_hi && b.phi_lo < a.phi_hi;
      if (theta_overlap && phi_overlap) throw std::invalid_argument("rects overlap");
    }
  }
}

RectRegion RectRegion::box(double theta_lo, double theta_hi, double phi_lo, double phi_hi) {
  double plo = phi_lo;
  double phi_hi_w = phi_hi;
  // A full-width azimuth range stays a single rect.
  if (std::abs((phi_hi - phi_lo) - kTwoPi) < 1e-15 || phi_hi - phi_lo > kTwoPi) {
    return RectRegion({{theta_lo, theta_hi, -kPi, kPi}});
  }
  plo = (phi_lo == -kPi) ? -kPi : wrap_angle(phi_lo);
  phi_hi_w = wrap_angle(phi_hi);
  if (plo == phi_hi_w) throw std::invalid_argument("empty azimuth range");
  if (plo < phi_hi_w) return RectRegion({{theta_lo, theta_hi, plo, phi_hi_w}});
  return RectRegion({{theta_lo, theta_hi, -kPi, phi_hi_w}, {theta_lo, theta_hi, plo, kPi}});
}

RectRegion RectRegion::full_sphere() { return RectRegion({{0.0, kPi, -kPi, kPi}}); }

RectRegion RectRegion::latlon_box(double lat_min, double lat_max, double lon_min, double lon_max) {
  for (double v : {lat_min, lat_max, lon_min, lon_max}) require_finite(v, "box bound");
  if (!(lat_min >= -90.0 && lat_min < lat_max && lat_max <= 90.0)) {
    throw std::invalid_argument("latitude box needs -90 <= min < max <= 90");
  }
  const double deg = kPi / 180.0;
  // theta = pi/2 - lat, so the northern edge gives the smaller inclination.
  const double theta_lo = std::max(0.0, (90.0 - lat_max) * deg);
  const double theta_hi = std::min(kPi, (90.0 - lat_min) * deg);
  return box(theta_lo, theta_hi, lon_min * deg, lon_max * deg);
}

RectRegion RectRegion::united(const RectRegion& other) const {
  std::vector<Rect> all = rects_;
  all.insert(all.end(), other.rects_.begin(), other.rects_.end());
  return RectRegion(std::move(all));
}

double RectRegion::area() const {
  double total = 0.0;
  for (const Rect& r : rects_) {
    total += (std::cos(r.theta_lo) - std::cos(r.theta_hi)) * (r.phi_hi - r.phi_lo);
  }
  return total;
}

bool RectRegion::contains(const SpherePoint& p) const {
  return std::any_of(rects_.begin(), rects_.end(), [&](const Rect& r) {
    return in_half_open(p.theta(), r.theta_lo, r.theta_hi) &&
           in_half_open(p.phi(), r.phi_lo, r.phi_hi);
  });
}

}  // namespace spherekde
