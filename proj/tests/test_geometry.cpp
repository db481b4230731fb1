#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "spherekde/geometry.hpp"
#include "support.hpp"

using namespace spherekde;
using doctest::Approx;

TEST_CASE("point_from_angle wraps into (-pi, pi]") {
  CHECK(point_from_angle(0.0).theta() == 0.0);
  CHECK(point_from_angle(3.0 * kPi).theta() == Approx(kPi).epsilon(1e-15));
  CHECK(point_from_angle(-kPi).theta() == kPi);
  CHECK(point_from_angle(-3.0 * kPi).theta() == Approx(kPi).epsilon(1e-15));
  CHECK_THROWS_AS(point_from_angle(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(point_from_angle(INFINITY), std::invalid_argument);
}

TEST_CASE("angle_of_cartesian branches on the sign of x2") {
  CHECK(angle_of_cartesian(1.0, 0.0) == 0.0);
  CHECK(angle_of_cartesian(0.0, -1.0) == Approx(-kPi / 2));
  CHECK(angle_of_cartesian(-1.0, 0.0) == kPi);
  CHECK(angle_of_cartesian(-1.0, -0.0) == kPi);
  CHECK_THROWS_AS(angle_of_cartesian(1.0, 0.1), std::invalid_argument);
}

TEST_CASE("sphere_from_angles") {
  const SpherePoint n = sphere_from_angles(0.0, 1.234);
  CHECK(n.x3() == 1.0);
  CHECK(n.phi() == kPi);
  const SpherePoint a = sphere_from_angles(kPi / 2, 0.0);
  CHECK(a.x1() == Approx(1.0));
  CHECK(std::abs(a.x3()) < 1e-15);
  const SpherePoint b = sphere_from_angles(kPi / 2, kPi / 2);
  CHECK(std::abs(b.x1()) < 1e-15);
  CHECK(b.x2() == Approx(1.0));
  CHECK_THROWS_AS(sphere_from_angles(-0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(sphere_from_angles(kPi + 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("angles_of_sphere") {
  const auto np = angles_of_sphere(SpherePoint::from_cartesian(0.0, 0.0, 1.0));
  CHECK(np.theta == 0.0);
  CHECK(np.phi == kPi);
  const auto eq = angles_of_sphere(SpherePoint::from_cartesian(1.0, 0.0, 0.0));
  CHECK(eq.theta == Approx(kPi / 2));
  CHECK(eq.phi == 0.0);
  CHECK_THROWS_AS(SpherePoint::from_cartesian(1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("angle and point round trips on 10^4 random inputs") {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto v = oracle::random_unit(gen);
    const SpherePoint x = SpherePoint::from_cartesian(v[0], v[1], v[2]);
    const auto a = angles_of_sphere(x);
    const SpherePoint y = sphere_from_angles(a.theta, a.phi);
    worst = std::max({worst, std::abs(x.x1() - y.x1()), std::abs(x.x2() - y.x2()), std::abs(x.x3() - y.x3())});
    const double norm = x.x1() * x.x1() + x.x2() * x.x2() + x.x3() * x.x3();
    REQUIRE(std::abs(norm - 1.0) < 1e-12);

    const double t = ang(gen);
    const CirclePoint c = point_from_angle(t);
    worst = std::max(worst, std::abs(angle_of_cartesian(c.x1(), c.x2()) - c.theta()));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("distance") {
  const CirclePoint p = point_from_angle(1.0);
  CHECK(distance(p, p) == 0.0);
  CHECK(distance(point_from_angle(0.0), point_from_angle(kPi)) == Approx(kPi));
  CHECK(distance(point_from_angle(3.0), point_from_angle(-3.0)) == Approx(2 * kPi - 6.0).epsilon(1e-12));

  const SpherePoint x = SpherePoint::from_cartesian(0.6, 0.0, 0.8);
  const SpherePoint y = SpherePoint::from_cartesian(-0.6, 0.0, -0.8);
  CHECK(distance(x, x) == 0.0);
  CHECK(distance(x, y) == Approx(kPi));
}

TEST_CASE("distance is a metric on random triples") {
  std::mt19937_64 gen(5);
  for (int i = 0; i < 2000; ++i) {
    const auto a = oracle::unit_point(oracle::random_unit(gen));
    const auto b = oracle::unit_point(oracle::random_unit(gen));
    const auto c = oracle::unit_point(oracle::random_unit(gen));
    REQUIRE(distance(a, b) == Approx(distance(b, a)).epsilon(1e-14));
    REQUIRE(distance(a, c) <= distance(a, b) + distance(b, c) + 1e-12);
    REQUIRE(distance(a, b) == Approx(std::acos(std::clamp(dot(a, b), -1.0, 1.0))).epsilon(1e-7));
  }
}

TEST_CASE("latlon_to_cartesian") {
  const SpherePoint n = latlon_to_cartesian(90.0, 0.0);
  CHECK(n.x1() == 0.0);
  CHECK(n.x2() == 0.0);
  CHECK(n.x3() == 1.0);
  const SpherePoint a = latlon_to_cartesian(0.0, 0.0);
  CHECK(a.x1() == 1.0);
  const SpherePoint b = latlon_to_cartesian(0.0, 90.0);
  CHECK(std::abs(b.x1()) < 1e-15);
  CHECK(b.x2() == 1.0);
  CHECK_THROWS_AS(latlon_to_cartesian(91.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(latlon_to_cartesian(0.0, 181.0), std::invalid_argument);

  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> lat(-90.0, 90.0);
  std::uniform_real_distribution<double> lon(-180.0, 180.0);
  for (int i = 0; i < 10000; ++i) {
    const SpherePoint x = latlon_to_cartesian(lat(gen), lon(gen));
    REQUIRE(std::abs(x.x1() * x.x1() + x.x2() * x.x2() + x.x3() * x.x3() - 1.0) < 1e-12);
  }
}

TEST_CASE("periodic_to_angle is affine") {
  CHECK(periodic_to_angle(5.0, 0.0, 10.0).theta() == Approx(0.0));
  CHECK(periodic_to_angle(10.0, 0.0, 10.0).theta() == kPi);
  CHECK(periodic_to_angle(2.5, 0.0, 10.0).theta() == Approx(-kPi / 2));
  CHECK_THROWS_AS(periodic_to_angle(0.0, 0.0, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(periodic_to_angle(11.0, 0.0, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(periodic_to_angle(1.0, 2.0, 2.0), std::invalid_argument);

  // Equal time differences give equal angle differences.
  const double a = 0.0;
  const double b = 365.0;
  const double d1 = periodic_to_angle(40.0, a, b).theta() - periodic_to_angle(30.0, a, b).theta();
  const double d2 = periodic_to_angle(210.0, a, b).theta() - periodic_to_angle(200.0, a, b).theta();
  CHECK(d1 == Approx(d2).epsilon(1e-12));
  CHECK(d1 == Approx(10.0 * kTwoPi / 365.0).epsilon(1e-12));
}

TEST_CASE("arc regions") {
  const ArcRegion a = ArcRegion::span(-1.0, 2.0);
  REQUIRE(a.arcs().size() == 1);
  CHECK(a.length() == Approx(3.0));

  // Passing through the seam splits in two.
  const ArcRegion s = ArcRegion::span(2.46, -3.03);
  REQUIRE(s.arcs().size() == 2);
  CHECK(s.length() == Approx(kPi - 2.46 + kPi - 3.03));
  CHECK(s.contains(point_from_angle(kPi)));
  CHECK(s.contains(point_from_angle(-3.1)));
  CHECK_FALSE(s.contains(point_from_angle(0.0)));

  // Starting at -pi needs no split.
  const ArcRegion left = ArcRegion::span(-kPi, 0.0);
  REQUIRE(left.arcs().size() == 1);
  CHECK(left.length() == Approx(kPi));
  CHECK(ArcRegion::span(-kPi, kPi).length() == Approx(kTwoPi));
  CHECK(ArcRegion::full_circle().length() == Approx(kTwoPi));

  CHECK_THROWS_AS(ArcRegion::span(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ArcRegion::span(0.0, 1.0).united(ArcRegion::span(0.5, 2.0)), std::invalid_argument);

  // Half-open membership: each point of a partition counted once.
  const ArcRegion lo = ArcRegion::span(-kPi, 0.0);
  const ArcRegion hi = ArcRegion::span(0.0, kPi);
  for (double t : {-kPi, -1.0, 0.0, 1.0, kPi}) {
    const CirclePoint p = point_from_angle(t);
    CHECK(lo.contains(p) + hi.contains(p) == 1);
  }
}

TEST_CASE("rect regions") {
  const RectRegion r = RectRegion::box(0.0, kPi / 2, 2.5, -2.5);
  REQUIRE(r.rects().size() == 2);
  CHECK(r.area() == Approx(kTwoPi - 5.0).epsilon(1e-12));
  CHECK(RectRegion::full_sphere().area() == Approx(4 * kPi));
  CHECK(RectRegion::box(0.0, kPi, -kPi, kPi).rects().size() == 1);

  const RectRegion japan = RectRegion::latlon_box(31.0, 45.5, 129.4, 145.5);
  REQUIRE(japan.rects().size() == 1);
  CHECK(japan.rects()[0].theta_lo == Approx((90.0 - 45.5) * kPi / 180));
  CHECK(japan.rects()[0].theta_hi == Approx((90.0 - 31.0) * kPi / 180));
  CHECK(japan.contains(latlon_to_cartesian(35.7, 139.7)));
  CHECK_FALSE(japan.contains(latlon_to_cartesian(-33.4, -70.6)));

  CHECK_THROWS_AS(RectRegion::box(1.0, 1.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(RectRegion::box(0.0, 1.0, 0.0, 1.0).united(RectRegion::box(0.5, 2.0, 0.5, 2.0)),
                  std::invalid_argument);
}
