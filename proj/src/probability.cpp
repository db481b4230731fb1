#include "spherekde/probability.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "spherekde/errors.hpp"
#include "spherekde/parallel.hpp"
#include "spherekde/quadrature.hpp"

namespace spherekde {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

class Accumulator {
 public:
  void add(double v) {
    const double t = sum_ + v;
    comp_ += (std::abs(sum_) >= std::abs(v)) ? (sum_ - t) + v : (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// sin and cos of l * angle. The domain ends +-pi stand for the exact value
// pi, so their multiples are taken exactly rather than through the rounded
// constant.
void sincos_multiple(int l, double angle, double& s, double& c) {
  if (angle == kPi || angle == -kPi) {
    s = 0.0;
    c = (l % 2 == 0) ? 1.0 : -1.0;
    return;
  }
  s = std::sin(l * angle);
  c = std::cos(l * angle);
}

// Azimuthal integral of cos(m (phi - phi_j)) over [phi1, phi2], m >= 1.
double azimuth_factor(int m, double phi1, double phi2, double phi_j) {
  return (std::sin(m * (phi2 - phi_j)) - std::sin(m * (phi1 - phi_j))) / m;
}

}  // namespace

std::string to_string(ProbMethod method) {
  return method == ProbMethod::ClosedForm ? "closed-form" : "quadrature";
}

ProbEstimate prob_arc_s1(const KdeS1& kde, const ArcRegion& region) {
  const auto start = Clock::now();
  const KdeConfig& cfg = kde.config();
  const auto& g = kde.symbols();
  const auto& a = kde.cos_moments();
  const auto& b = kde.sin_moments();
  Accumulator total;
  for (const Arc& arc : region.arcs()) {
    total.add((arc.hi - arc.lo) / kTwoPi);
    Accumulator osc;
    for (int l = 1; l <= cfg.cutoff; ++l) {
      double s2, c2, s1, c1;
      sincos_multiple(l, arc.hi, s2, c2);
      sincos_multiple(l, arc.lo, s1, c1);
      // sum_j sin(l (t - theta_j)) = sin(l t) A_l - cos(l t) B_l
      const double diff = (s2 * a[l] - c2 * b[l]) - (s1 * a[l] - c1 * b[l]);
      osc.add(g[l] / l * diff);
    }
    total.add(osc.value() / (kPi * cfg.n));
  }
  ProbEstimate out;
  out.value = total.value();
  out.region = region;
  out.method = ProbMethod::ClosedForm;
  out.precision = PrecisionMode::double_precision();
  out.elapsed = seconds_since(start);
  return out;
}

ProbEstimate prob_rect_s2(const KdeS2& kde, const RectRegion& region, PrecisionMode mode) {
  const auto start = Clock::now();
  const KdeConfig& cfg = kde.config();
  const int N = cfg.cutoff;
  const auto& g = kde.symbols();
  const auto& points = kde.points();
  const PrecisionMode resolved = mode.resolve(N);

  Accumulator total;
  for (const Rect& rect : region.rects()) {
    const double gamma1 = std::cos(rect.theta_hi);
    const double gamma2 = rect.theta_lo == 0.0 ? 1.0 : std::cos(rect.theta_lo);
    const LegendreIntegralTable table(N, gamma1, gamma2, resolved);
    const double width = rect.phi_hi - rect.phi_lo;
    // Full-turn azimuth ranges integrate every m >= 1 harmonic to zero.
    const bool full_turn = rect.phi_lo == -kPi && rect.phi_hi == kPi;

    std::vector<double> per_point(points.size());
    parallel_for(points.size(), [&](std::size_t j) {
      std::vector<double> pbar;
      const SpherePoint& x = points[j];
      normalized_assoc_legendre_all(N, x.x3(), pbar);
      Accumulator acc;
      for (int l = 0; l <= N; ++l) {
        Accumulator row;
        row.add(table.normalized(l, 0) * pbar[triangular_index(l, 0)] * width);
        if (!full_turn) {
          for (int m = 1; m <= l; ++m) {
            row.add(2.0 * table.normalized(l, m) * pbar[triangular_index(l, m)] *
                    azimuth_factor(m, rect.phi_lo, rect.phi_hi, x.phi()));
          }
        }
        acc.add(g[l] * row.value());
      }
      per_point[j] = acc.value();
    });
    Accumulator rect_sum;
    for (double v : per_point) rect_sum.add(v);
    total.add(rect_sum.value() / static_cast<double>(points.size()));
  }
  ProbEstimate out;
  out.value = total.value();
  out.region = region;
  out.method = ProbMethod::ClosedForm;
  out.precision = resolved;
  out.elapsed = seconds_since(start);
  return out;
}

ProbEstimate prob_arc_s1(const SampleS1& sample, const KdeConfig& cfg, const ArcRegion& region) {
  return prob_arc_s1(KdeS1(sample, cfg), region);
}

ProbEstimate prob_rect_s2(const SampleS2& sample, const KdeConfig& cfg, const RectRegion& region,
                          PrecisionMode mode) {
  return prob_rect_s2(KdeS2(sample, cfg), region, mode);
}

// ---------------------------------------------------------------------------

ProbEstimate quadrature_prob(const KdeS1& kde, const ArcRegion& region,
                             const QuadratureOptions& options) {
  const auto start = Clock::now();
  Accumulator total;
  for (const Arc& arc : region.arcs()) {
    total.add(adaptive_simpson([&](double t) { return kde(t); }, arc.lo, arc.hi,
                               options.arc_tolerance));
  }
  ProbEstimate out;
  out.value = total.value();
  out.region = region;
  out.method = ProbMethod::Quadrature;
  out.precision = PrecisionMode::double_precision();
  out.elapsed = seconds_since(start);
  return out;
}

namespace {

QuadratureRule azimuth_rule(const Rect& rect, int nodes, int degree, bool adapt) {
  const double width = rect.phi_hi - rect.phi_lo;
  if (rect.phi_lo == -kPi && rect.phi_hi == kPi) {
    // The trapezoid rule with M nodes is exact for harmonics below M.
    const int m = adapt ? std::max(nodes, degree + 2) : nodes;
    return periodic_trapezoid(m, -kPi, kTwoPi);
  }
  const int m = adapt ? gauss_nodes_for_frequency(degree, width, nodes) : nodes;
  return gauss_legendre(m, rect.phi_lo, rect.phi_hi);
}

double integrate_rect(const std::function<double(const SpherePoint&)>& f,
                      const QuadratureRule& theta_rule, const QuadratureRule& phi_rule) {
  std::vector<double> rows(theta_rule.nodes.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    const double theta = theta_rule.nodes[i];
    Accumulator row;
    for (std::size_t k = 0; k < phi_rule.nodes.size(); ++k) {
      row.add(phi_rule.weights[k] * f(sphere_from_angles(theta, phi_rule.nodes[k])));
    }
    rows[i] = theta_rule.weights[i] * std::sin(theta) * row.value();
  });
  Accumulator total;
  for (double v : rows) total.add(v);
  return total.value();
}

}  // namespace

ProbEstimate quadrature_prob(const KdeS2& kde, const RectRegion& region,
                             const QuadratureOptions& options) {
  const auto start = Clock::now();
  const int N = kde.config().cutoff;
  Accumulator total;
  for (const Rect& rect : region.rects()) {
    const double height = rect.theta_hi - rect.theta_lo;
    const int tn = options.adapt_to_degree
                       ? gauss_nodes_for_frequency(N + 1, height, options.theta_nodes)
                       : options.theta_nodes;
    const QuadratureRule theta_rule = gauss_legendre(tn, rect.theta_lo, rect.theta_hi);
    const QuadratureRule phi_rule = azimuth_rule(rect, options.phi_nodes, N, options.adapt_to_degree);
    total.add(integrate_rect([&](const SpherePoint& x) { return kde(x); }, theta_rule, phi_rule));
  }
  ProbEstimate out;
  out.value = total.value();
  out.region = region;
  out.method = ProbMethod::Quadrature;
  out.precision = PrecisionMode::double_precision();
  out.elapsed = seconds_since(start);
  return out;
}

double vmf_true_prob_cap(double kappa, double theta_max) {
  if (!(std::isfinite(kappa) && kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  if (!(theta_max > 0.0 && theta_max <= kPi)) {
    throw std::invalid_argument("cap angle must lie in (0, pi]");
  }
  // (e^k - e^{k cos t}) / (e^k - e^{-k}), scaled by e^{-k} to stay finite.
  return std::expm1(kappa * (std::cos(theta_max) - 1.0)) / std::expm1(-2.0 * kappa);
}

double integrate_density_s1(const std::function<double(double)>& density, const ArcRegion& region,
                            double tol) {
  Accumulator total;
  for (const Arc& arc : region.arcs()) total.add(adaptive_simpson(density, arc.lo, arc.hi, tol));
  return total.value();
}

double integrate_density_s2(const std::function<double(const SpherePoint&)>& density,
                            const RectRegion& region, double tol) {
  Accumulator total;
  for (const Rect& rect : region.rects()) {
    int nodes = 32;
    double previous = std::numeric_limits<double>::quiet_NaN();
    for (;;) {
      const QuadratureRule theta_rule = gauss_legendre(nodes, rect.theta_lo, rect.theta_hi);
      const QuadratureRule phi_rule = (rect.phi_lo == -kPi && rect.phi_hi == kPi)
                                          ? periodic_trapezoid(2 * nodes, -kPi, kTwoPi)
                                          : gauss_legendre(nodes, rect.phi_lo, rect.phi_hi);
      const double value = integrate_rect(density, theta_rule, phi_rule);
      if (std::abs(value - previous) < tol) {
        total.add(value);
        break;
      }
      if (nodes >= 1024) throw NumericalError("density quadrature did not reach its tolerance");
      previous = value;
      nodes *= 2;
    }
  }
  return total.value();
}

}  // namespace spherekde
