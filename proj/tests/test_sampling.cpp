#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "spherekde/evaluation.hpp"
#include "spherekde/sampling.hpp"
#include "spherekde/studies.hpp"
#include "support.hpp"

using namespace spherekde;
using doctest::Approx;

namespace {

// Three binomial standard deviations.
double three_sigma(double p, std::size_t n) { return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

// Arc probability of a circular vMF law from its Fourier series:
// (1/2 pi) [ (b - a) + 2 sum_k I_k/I_0 (sin k(b - mu) - sin k(a - mu)) / k ].
double vmf_arc_series(double mu, double kappa, double a, double b) {
  const double i0 = boost::math::cyl_bessel_i(0, kappa);
  double total = b - a;
  for (int k = 1; k <= 200; ++k) {
    const double ratio = boost::math::cyl_bessel_i(k, kappa) / i0;
    if (ratio < 1e-18) break;
    total += 2.0 * ratio * (std::sin(k * (b - mu)) - std::sin(k * (a - mu))) / k;
  }
  return total / (2.0 * oracle::pi);
}

}  // namespace

TEST_CASE("seeded streams are reproducible and distinct") {
  SeededRng a(42, 3);
  SeededRng b(42, 3);
  SeededRng c(42, 4);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u64();
    REQUIRE(x == b.next_u64());
    differs |= x != c.next_u64();
  }
  CHECK(differs);
  SeededRng u(1);
  for (int i = 0; i < 10000; ++i) {
    const double v = u.uniform();
    REQUIRE((v >= 0.0 && v < 1.0));
    const double w = u.uniform_positive();
    REQUIRE((w > 0.0 && w <= 1.0));
  }

  SeededRng r1(9), r2(9);
  const SampleS2 s1 = sample_vmf_s2(VmfSpec::sphere({0, 0, 1}, 3.0), 200, r1);
  const SampleS2 s2 = sample_vmf_s2(VmfSpec::sphere({0, 0, 1}, 3.0), 200, r2);
  for (std::size_t i = 0; i < s1.size(); ++i) REQUIRE(s1.points[i].x3() == s2.points[i].x3());
  CHECK(s1.meta.seed == 9u);
}

TEST_CASE("uniform samplers") {
  SeededRng rng(5);
  const SampleS2 s = sample_uniform_s2(100000, rng);
  double m[3] = {0, 0, 0};
  std::size_t upper = 0;
  for (const auto& p : s.points) {
    REQUIRE(std::abs(p.x1() * p.x1() + p.x2() * p.x2() + p.x3() * p.x3() - 1.0) < 1e-12);
    m[0] += p.x1();
    m[1] += p.x2();
    m[2] += p.x3();
    upper += p.x3() > 0.0;
  }
  const double n = static_cast<double>(s.size());
  CHECK(std::sqrt(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) / n < 0.02);
  CHECK(std::abs(upper / n - 0.5) < three_sigma(0.5, s.size()));

  const SampleS1 c = sample_uniform_s1(10000, rng);
  std::size_t right = 0;
  for (const auto& p : c.points) {
    REQUIRE((p.theta() > -kPi && p.theta() <= kPi));
    right += p.x1() > 0.0;
  }
  CHECK(std::abs(right / 10000.0 - 0.5) < three_sigma(0.5, 10000));
  CHECK_THROWS_AS(sample_uniform_s1(0, rng), std::invalid_argument);
}

TEST_CASE("circular vMF sampler") {
  SeededRng rng(6);
  const SampleS1 s = sample_vmf_s1(VmfSpec::circle(0.0, 4.0), 10000, rng);
  double cx = 0.0, cy = 0.0;
  for (const auto& p : s.points) {
    cx += p.x1();
    cy += p.x2();
  }
  CHECK(std::abs(std::atan2(cy, cx)) < 0.05);

  for (double kappa : {0.1, 0.5, 1.0, 4.0, 12.0, 50.0}) {
    RejectionStats stats;
    sample_vmf_s1(VmfSpec::circle(1.0, kappa), 5000, rng, &stats);
    CHECK(stats.draws == 5000u);
    CHECK(stats.mean_trials() < 2.0);
  }

  const SampleS1 k1 = sample_vmf_s1(VmfSpec::circle(0.0, 1.0), 10000, rng);
  const double p = vmf_arc_series(0.0, 1.0, -kPi / 4, kPi / 4);
  const double f = region_frequency(k1, ArcRegion::span(-kPi / 4, kPi / 4));
  CHECK(std::abs(f - p) < three_sigma(p, 10000));
}

TEST_CASE("spherical vMF sampler") {
  SeededRng rng(7);
  const SampleS2 s = sample_vmf_s2(VmfSpec::sphere({0, 0, 1}, 1.0), 10000, rng);
  const double f = region_frequency(s, RectRegion::box(0.0, kPi / 2, -kPi, kPi));
  CHECK(std::abs(f - 0.7311) < three_sigma(0.7311, 10000));

  const double r3 = 1.0 / std::sqrt(3.0);
  const SampleS2 t = sample_vmf_s2(VmfSpec::sphere({r3, r3, r3}, 10.0), 10000, rng);
  double m[3] = {0, 0, 0};
  for (const auto& p : t.points) {
    m[0] += p.x1();
    m[1] += p.x2();
    m[2] += p.x3();
  }
  const double norm = std::sqrt(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]);
  for (double& v : m) v /= norm;
  CHECK(std::sqrt(std::pow(m[0] - r3, 2) + std::pow(m[1] - r3, 2) + std::pow(m[2] - r3, 2)) < 0.05);

  const SampleS2 flat = sample_vmf_s2(VmfSpec::sphere({0, 0, 1}, 1e-4), 10000, rng);
  const double up = region_frequency(flat, RectRegion::box(0.0, kPi / 2, -kPi, kPi));
  CHECK(std::abs(up - 0.5) < three_sigma(0.5, 10000));

  // Mean at the south pole uses the reflection.
  const SampleS2 south = sample_vmf_s2(VmfSpec::sphere({0, 0, -1}, 20.0), 2000, rng);
  double z = 0.0;
  for (const auto& p : south.points) z += p.x3();
  CHECK(z / 2000.0 < -0.9);
}

TEST_CASE("rotation matrix carries the pole to the mean") {
  for (const auto& mu : std::vector<std::array<double, 3>>{
           {0, 0, 1}, {0, 0, -1}, {1, 0, 0}, {0.6, 0.0, -0.8}, {0.48, 0.6, 0.64}}) {
    const auto r = vmf_rotation(mu);
    for (int j = 0; j < 3; ++j) CHECK(oracle::near(r[2][j], mu[j], 1e-14));
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < 3; ++k) {
        double dotp = 0.0;
        for (int j = 0; j < 3; ++j) dotp += r[i][j] * r[k][j];
        CHECK(oracle::near(dotp, i == k ? 1.0 : 0.0, 1e-14));
      }
    }
  }
}

TEST_CASE("mixture sampler") {
  const VmfMixtureSpec four = four_peak_mixture_s1();
  SeededRng rng(8);
  const SampleS1 s = sample_vmf_mixture_s1(four, 10000, rng);
  REQUIRE(s.meta.components.size() == 10000);
  std::vector<int> counts(4, 0);
  for (int k : s.meta.components) ++counts[k];
  for (int k = 0; k < 4; ++k) {
    CHECK(std::abs(counts[k] / 10000.0 - four.weights[k]) < three_sigma(four.weights[k], 10000));
  }

  const VmfSpec single = VmfSpec::sphere({0.0, 0.6, 0.8}, 5.0);
  SeededRng a(3, 1), b(3, 1);
  const SampleS2 m = sample_vmf_mixture_s2({{1.0}, {single}}, 500, a);
  const SampleS2 v = sample_vmf_s2(single, 500, b);
  for (std::size_t i = 0; i < 500; ++i) {
    REQUIRE(m.points[i].x1() == v.points[i].x1());
    REQUIRE(m.points[i].x3() == v.points[i].x3());
  }

  CHECK_THROWS_AS(sample_vmf_mixture_s1({{0.5, 0.4}, four.components}, 10, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_vmf_mixture_s2({{1.0}, {VmfSpec::circle(0.0, 1.0)}}, 10, rng), std::invalid_argument);
}

TEST_CASE("vMF density") {
  const VmfSpec s = VmfSpec::sphere({0, 0, 1}, 1.0);
  CHECK(vmf_density(s, SpherePoint::from_cartesian(0, 0, 1)) == Approx(std::exp(1.0) / (4 * kPi * std::sinh(1.0))).epsilon(1e-14));
  CHECK(oracle::near(vmf_density(s, SpherePoint::from_cartesian(0, 0, 1)), 0.184065, 1e-6));

  const RectRegion all = RectRegion::full_sphere();
  for (double kappa : {0.5, 1.0, 12.0}) {
    const VmfSpec v = VmfSpec::sphere({0.48, 0.6, 0.64}, kappa);
    CHECK(oracle::near(integrate_density_s2([&](const SpherePoint& x) { return vmf_density(v, x); }, all), 1.0, 1e-8));
    const VmfSpec c = VmfSpec::circle(-2.0, kappa);
    CHECK(oracle::near(integrate_density_s1([&](double t) { return vmf_density(c, point_from_angle(t)); },
                                            ArcRegion::full_circle()),
                       1.0, 1e-8));
  }
  // Depends on <x, mu> only.
  const VmfSpec n = VmfSpec::sphere({0, 0, 1}, 3.0);
  CHECK(oracle::near(vmf_density(n, sphere_from_angles(0.7, 0.1)), vmf_density(n, sphere_from_angles(0.7, -2.9)), 1e-14));
  const VmfSpec c = VmfSpec::circle(0.0, 3.0);
  CHECK(oracle::near(vmf_density(c, point_from_angle(0.7)), vmf_density(c, point_from_angle(-0.7)), 1e-14));
  CHECK(vmf_density(VmfSpec::circle(0.0, 1.0), point_from_angle(0.0)) ==
        Approx(std::exp(1.0) / (2 * kPi * boost::math::cyl_bessel_i(0, 1.0))).epsilon(1e-13));
  CHECK_THROWS_AS(VmfSpec::sphere({0, 0, 1}, 0.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(VmfSpec::sphere({0, 0, 2}, 1.0).validate(), std::invalid_argument);
}

TEST_CASE("mixture density") {
  const VmfSpec a = VmfSpec::sphere({0, 0, 1}, 12.0);
  const VmfSpec b = VmfSpec::sphere({0, -1, 0}, 10.0);
  const SpherePoint x = sphere_from_angles(0.4, -1.2);
  CHECK(mixture_density({{1.0, 0.0}, {a, b}}, x) == vmf_density(a, x));

  const VmfSpec c = VmfSpec::sphere({0, -1, 0}, 12.0);
  CHECK(oracle::near(mixture_density({{0.5, 0.5}, {a, c}}, x), mixture_density({{0.5, 0.5}, {c, a}}, x), 1e-15));

  const VmfMixtureSpec two = two_peak_mixture_s2();
  CHECK(oracle::near(integrate_density_s2([&](const SpherePoint& p) { return mixture_density(two, p); },
                                          RectRegion::full_sphere()),
                     1.0, 1e-8));
  const LawS2 law = mixture_law_s2(two);
  CHECK(oracle::near(law.probability(RectRegion::box(0.0, kPi / 6, -kPi, kPi)), 0.4001, 1e-3));

  // The first cap is also available per component in closed form.
  const double cap = 0.5 * vmf_true_prob_cap(12.0, kPi / 6) +
                     0.5 * integrate_density_s2([&](const SpherePoint& p) { return vmf_density(b, p); },
                                                RectRegion::box(0.0, kPi / 6, -kPi, kPi), 1e-12);
  CHECK(oracle::near(law.probability(RectRegion::box(0.0, kPi / 6, -kPi, kPi)), cap, 1e-8));
}

TEST_CASE("circular mixture probabilities against the Bessel series") {
  const VmfMixtureSpec four = four_peak_mixture_s1();
  const LawS1 law = mixture_law_s1(four);
  for (const auto& arc : four_peak_arcs()) {
    double series = 0.0;
    for (const Arc& piece : arc.region.arcs()) {
      for (std::size_t k = 0; k < four.components.size(); ++k) {
        const auto& c = four.components[k];
        series += four.weights[k] * vmf_arc_series(std::atan2(c.mu[1], c.mu[0]), c.kappa, piece.lo, piece.hi);
      }
    }
    CHECK(oracle::near(law.probability(arc.region), series, 1e-8));
  }
  CHECK(oracle::near(integrate_density_s1([&](double t) { return mixture_density(four, point_from_angle(t)); },
                                          ArcRegion::full_circle()),
                     1.0, 1e-8));
}
