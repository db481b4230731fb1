#include "spherekde/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "spherekde/specfun.hpp"

namespace spherekde {

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

double SeededRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double SeededRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return u * factor;
}

// ---------------------------------------------------------------------------

VmfSpec VmfSpec::circle(double mean_angle, double kappa) {
  const CirclePoint p = point_from_angle(mean_angle);
  VmfSpec spec{1, {p.x1(), p.x2(), 0.0}, kappa};
  spec.validate();
  return spec;
}

VmfSpec VmfSpec::sphere(const std::array<double, 3>& mu, double kappa) {
  VmfSpec spec{2, mu, kappa};
  spec.validate();
  return spec;
}

void VmfSpec::validate() const {
  if (d != 1 && d != 2) throw std::invalid_argument("vMF dimension must be 1 or 2");
  if (!(std::isfinite(kappa) && kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  const double norm2 = d == 1 ? mu[0] * mu[0] + mu[1] * mu[1]
                              : mu[0] * mu[0] + mu[1] * mu[1] + mu[2] * mu[2];
  if (!(std::abs(std::sqrt(norm2) - 1.0) <= 1e-9)) {
    throw std::invalid_argument("vMF mean direction must have unit norm");
  }
}

int VmfMixtureSpec::d() const {
  if (components.empty()) throw std::invalid_argument("mixture has no components");
  return components.front().d;
}

void VmfMixtureSpec::validate() const {
  if (components.empty()) throw std::invalid_argument("mixture has no components");
  if (weights.size() != components.size()) {
    throw std::invalid_argument("mixture has " + std::to_string(weights.size()) + " weights but " +
                                std::to_string(components.size()) + " components");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(std::isfinite(w) && w > 0.0)) throw std::invalid_argument("mixture weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("mixture weights must sum to 1");
  for (const VmfSpec& c : components) {
    c.validate();
    if (c.d != components.front().d) throw std::invalid_argument("mixture components differ in d");
  }
}

// ---------------------------------------------------------------------------

namespace {

void check_n(std::size_t n) {
  if (n == 0) throw std::invalid_argument("sample size must be at least 1");
}

SampleMetadata metadata(const char* source, const SeededRng& rng) {
  SampleMetadata meta;
  meta.source = source;
  meta.seed = rng.seed();
  meta.stream = rng.stream();
  return meta;
}

// Gaussian vector of length k normalized by its Euclidean norm; the
// (probability zero) null vector is redrawn.
template <std::size_t K>
std::array<double, K> uniform_direction(SeededRng& rng) {
  for (;;) {
    std::array<double, K> z;
    double norm2 = 0.0;
    for (double& v : z) {
      v = rng.normal();
      norm2 += v * v;
    }
    if (norm2 == 0.0) continue;
    const double norm = std::sqrt(norm2);
    for (double& v : z) v /= norm;
    return z;
  }
}

// One draw centred at angle 0 (Best-Fisher wrapped-Cauchy envelope).
double best_fisher_angle(double kappa, double r, SeededRng& rng, RejectionStats* stats) {
  double f = 0.0;
  for (;;) {
    const double u1 = rng.uniform();
    const double u2 = rng.uniform_positive();
    const double u3 = rng.uniform();
    if (stats) ++stats->trials;
    const double z = std::cos(kPi * u1);
    f = (1.0 + r * z) / (r + z);
    const double c = kappa * (r - f);
    const bool quick = c * (2.0 - c) - u2 > 0.0;
    if (quick || std::log(c / u2) + 1.0 - c >= 0.0) {
      if (stats) ++stats->draws;
      const double t = std::acos(std::clamp(f, -1.0, 1.0));
      return u3 < 0.5 ? -t : t;
    }
  }
}

double best_fisher_r(double kappa) {
  const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
  const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
  return (1.0 + rho * rho) / (2.0 * rho);
}

CirclePoint draw_vmf_s1(const VmfSpec& spec, double r, double mean_angle, SeededRng& rng,
                        RejectionStats* stats) {
  // (cos t, sin t) times the rotation by the mean angle.
  return point_from_angle(best_fisher_angle(spec.kappa, r, rng, stats) + mean_angle);
}

SpherePoint draw_vmf_s2(const VmfSpec& spec, const std::array<std::array<double, 3>, 3>& rot,
                        SeededRng& rng) {
  const double phi = kPi - kTwoPi * rng.uniform();  // (-pi, pi]
  const double u = rng.uniform();
  // 1 + log(U + (1 - U) e^{-2k}) / k, written without cancellation.
  const double w = std::clamp(1.0 + std::log1p((1.0 - u) * std::expm1(-2.0 * spec.kappa)) / spec.kappa,
                              -1.0, 1.0);
  const double st = std::sqrt((1.0 - w) * (1.0 + w));
  const std::array<double, 3> m{std::cos(phi) * st, std::sin(phi) * st, w};
  std::array<double, 3> v{};
  for (int c = 0; c < 3; ++c) v[c] = m[0] * rot[0][c] + m[1] * rot[1][c] + m[2] * rot[2][c];
  const double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  return SpherePoint::from_cartesian(v[0] / norm, v[1] / norm, v[2] / norm);
}

std::size_t draw_component(const std::vector<double>& weights, SeededRng& rng) {
  if (weights.size() == 1) return 0;
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    cumulative += weights[i];
    if (u < cumulative) return i;
  }
  return weights.size() - 1;
}

double mean_angle_of(const VmfSpec& spec) { return angle_of_cartesian(spec.mu[0], spec.mu[1]); }

}  // namespace

std::array<std::array<double, 3>, 3> vmf_rotation(const std::array<double, 3>& mu) {
  const double m1 = mu[0];
  const double m2 = mu[1];
  const double m3 = mu[2];
  const double rho2 = m1 * m1 + m2 * m2;
  if (rho2 == 0.0) {
    if (m3 > 0.0) return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    return {{{-1, 0, 0}, {0, -1, 0}, {0, 0, -1}}};
  }
  // 1 / (1 + m3) equals (1 - m3) / rho^2; the second form keeps accuracy
  // near the south pole.
  const double k = m3 > 0.0 ? 1.0 / (1.0 + m3) : (1.0 - m3) / rho2;
  return {{{1.0 - m1 * m1 * k, -m1 * m2 * k, -m1},
           {-m1 * m2 * k, 1.0 - m2 * m2 * k, -m2},
           {m1, m2, m3}}};
}

SampleS1 sample_uniform_s1(std::size_t n, SeededRng& rng) {
  check_n(n);
  SampleS1 out;
  out.meta = metadata("uniform", rng);
  out.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto z = uniform_direction<2>(rng);
    out.points.push_back(point_from_angle(std::atan2(z[1], z[0])));
  }
  return out;
}

SampleS2 sample_uniform_s2(std::size_t n, SeededRng& rng) {
  check_n(n);
  SampleS2 out;
  out.meta = metadata("uniform", rng);
  out.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.points.push_back(SpherePoint::from_cartesian(uniform_direction<3>(rng)));
  return out;
}

SampleS1 sample_vmf_s1(const VmfSpec& spec, std::size_t n, SeededRng& rng, RejectionStats* stats) {
  check_n(n);
  spec.validate();
  if (spec.d != 1) throw std::invalid_argument("sample_vmf_s1 needs a d = 1 spec");
  const double r = best_fisher_r(spec.kappa);
  const double mean = mean_angle_of(spec);
  SampleS1 out;
  out.meta = metadata("vmf", rng);
  out.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.points.push_back(draw_vmf_s1(spec, r, mean, rng, stats));
  return out;
}

SampleS2 sample_vmf_s2(const VmfSpec& spec, std::size_t n, SeededRng& rng) {
  check_n(n);
  spec.validate();
  if (spec.d != 2) throw std::invalid_argument("sample_vmf_s2 needs a d = 2 spec");
  const auto rot = vmf_rotation(spec.mu);
  SampleS2 out;
  out.meta = metadata("vmf", rng);
  out.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.points.push_back(draw_vmf_s2(spec, rot, rng));
  return out;
}

SampleS1 sample_vmf_mixture_s1(const VmfMixtureSpec& spec, std::size_t n, SeededRng& rng) {
  check_n(n);
  spec.validate();
  if (spec.d() != 1) throw std::invalid_argument("sample_vmf_mixture_s1 needs d = 1 components");
  std::vector<double> r;
  std::vector<double> mean;
  for (const VmfSpec& c : spec.components) {
    r.push_back(best_fisher_r(c.kappa));
    mean.push_back(mean_angle_of(c));
  }
  SampleS1 out;
  out.meta = metadata("vmf-mixture", rng);
  out.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = draw_component(spec.weights, rng);
    out.meta.components.push_back(static_cast<int>(k));
    out.points.push_back(draw_vmf_s1(spec.components[k], r[k], mean[k], rng, nullptr));
  }
  return out;
}

SampleS2 sample_vmf_mixture_s2(const VmfMixtureSpec& spec, std::size_t n, SeededRng& rng) {
  check_n(n);
  spec.validate();
  if (spec.d() != 2) throw std::invalid_argument("sample_vmf_mixture_s2 needs d = 2 components");
  std::vector<std::array<std::array<double, 3>, 3>> rot;
  for (const VmfSpec& c : spec.components) rot.push_back(vmf_rotation(c.mu));
  SampleS2 out;
  out.meta = metadata("vmf-mixture", rng);
  out.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = draw_component(spec.weights, rng);
    out.meta.components.push_back(static_cast<int>(k));
    out.points.push_back(draw_vmf_s2(spec.components[k], rot[k], rng));
  }
  return out;
}

// ---------------------------------------------------------------------------

double vmf_density(const VmfSpec& spec, const CirclePoint& x) {
  if (spec.d != 1) throw std::invalid_argument("circle density needs a d = 1 spec");
  const double t = x.x1() * spec.mu[0] + x.x2() * spec.mu[1];
  // c = 1 / (2 pi I0(k)); both factors carry e^{-k} to stay finite.
  return std::exp(spec.kappa * (t - 1.0)) / (kTwoPi * bessel_i0_scaled(spec.kappa));
}

double vmf_density(const VmfSpec& spec, const SpherePoint& x) {
  if (spec.d != 2) throw std::invalid_argument("sphere density needs a d = 2 spec");
  const double t = x.x1() * spec.mu[0] + x.x2() * spec.mu[1] + x.x3() * spec.mu[2];
  // k / (4 pi sinh k) e^{k t} = k / (2 pi (1 - e^{-2k})) e^{k (t - 1)}
  return spec.kappa / (-kTwoPi * std::expm1(-2.0 * spec.kappa)) * std::exp(spec.kappa * (t - 1.0));
}

double mixture_density(const VmfMixtureSpec& spec, const CirclePoint& x) {
  double total = 0.0;
  for (std::size_t i = 0; i < spec.components.size(); ++i) {
    total += spec.weights[i] * vmf_density(spec.components[i], x);
  }
  return total;
}

double mixture_density(const VmfMixtureSpec& spec, const SpherePoint& x) {
  double total = 0.0;
  for (std::size_t i = 0; i < spec.components.size(); ++i) {
    total += spec.weights[i] * vmf_density(spec.components[i], x);
  }
  return total;
}

}  // namespace spherekde
