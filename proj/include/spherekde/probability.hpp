#pragma once

#include <functional>
#include <string>
#include <variant>

#include "spherekde/geometry.hpp"
#include "spherekde/kde.hpp"
#include "spherekde/specfun.hpp"

namespace spherekde {

enum class ProbMethod { ClosedForm, Quadrature };

std::string to_string(ProbMethod method);

struct ProbEstimate {
  double value = 0.0;
  std::variant<ArcRegion, RectRegion> region;
  ProbMethod method = ProbMethod::ClosedForm;
  PrecisionMode precision = PrecisionMode::double_precision();
  double elapsed = 0.0;  // seconds, monotonic clock
};

/// Closed-form probability of an arc union under the circle estimator.
ProbEstimate prob_arc_s1(const KdeS1& kde, const ArcRegion& region);

/// Closed-form probability of a rect union under the sphere estimator.
/// The coefficient tables run in `mode` (resolved against N_s).
ProbEstimate prob_rect_s2(const KdeS2& kde, const RectRegion& region,
                          PrecisionMode mode = PrecisionMode::automatic());

ProbEstimate prob_arc_s1(const SampleS1& sample, const KdeConfig& cfg, const ArcRegion& region);
ProbEstimate prob_rect_s2(const SampleS2& sample, const KdeConfig& cfg, const RectRegion& region,
                          PrecisionMode mode = PrecisionMode::automatic());

struct QuadratureOptions {
  int theta_nodes = 64;  // Gauss-Legendre nodes in the inclination
  int phi_nodes = 128;   // azimuth nodes
  /// Raise the node counts so that degree-N_s oscillations are resolved.
  bool adapt_to_degree = true;
  double arc_tolerance = 1e-10;  // adaptive Simpson on S1
};

/// Numerical integration of the estimator. On S2 each rect uses a
/// Gauss-Legendre rule in theta (weight sin theta) times a trapezoid rule
/// in phi over a full turn or a Gauss-Legendre rule over a partial range.
/// On S1 each arc uses adaptive Simpson.
ProbEstimate quadrature_prob(const KdeS1& kde, const ArcRegion& region,
                             const QuadratureOptions& options = {});
ProbEstimate quadrature_prob(const KdeS2& kde, const RectRegion& region,
                             const QuadratureOptions& options = {});

/// Probability of the polar cap {theta <= theta_max} under a vMF law with
/// mean at the north pole.
double vmf_true_prob_cap(double kappa, double theta_max);

/// Integral of a smooth density over a region, refined until two
/// successive rules differ by less than `tol`.
double integrate_density_s1(const std::function<double(double)>& density, const ArcRegion& region,
                            double tol = 1e-10);
double integrate_density_s2(const std::function<double(const SpherePoint&)>& density,
                            const RectRegion& region, double tol = 1e-10);

}  // namespace spherekde
