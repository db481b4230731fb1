#include "spherekde/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

#include "spherekde/parallel.hpp"
#include "spherekde/quadrature.hpp"

namespace spherekde {

namespace {

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

double circle_density_integral(const std::function<double(const CirclePoint&)>& density,
                               const ArcRegion& region) {
  return integrate_density_s1([&](double t) { return density(point_from_angle(t)); }, region);
}

bool is_north_pole(const std::array<double, 3>& mu) {
  return mu[0] == 0.0 && mu[1] == 0.0 && mu[2] == 1.0;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 == 1 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

template <class Estimator, class Law>
MiseReport mise_impl(const Law& law, int d, double s, long n, int reps, std::uint64_t seed,
                     std::optional<int> r) {
  if (reps < 1) throw std::invalid_argument("need at least one replication");
  const KdeConfig cfg = KdeConfig::make(d, s, n, r);
  MiseReport report;
  report.d = d;
  report.s = s;
  report.r = cfg.r;
  report.cutoff = cfg.cutoff;
  report.n = n;
  report.reps = reps;
  report.seed = seed;
  report.values.assign(reps, 0.0);
  parallel_for(static_cast<std::size_t>(reps), [&](std::size_t i) {
    SeededRng rng(seed, i);
    const auto sample = law.sample(static_cast<std::size_t>(n), rng);
    report.values[i] = integrated_squared_error(Estimator(sample, cfg), law.density);
  });
  Accumulator sum;
  for (double v : report.values) sum.add(v);
  report.mean = sum.value() / reps;
  if (reps > 1) {
    Accumulator sq;
    for (double v : report.values) sq.add((v - report.mean) * (v - report.mean));
    report.std_error = std::sqrt(sq.value() / (reps - 1) / reps);
  }
  return report;
}

}  // namespace

// ---------------------------------------------------------------------------
// Laws

LawS1 uniform_law_s1() {
  LawS1 law;
  law.name = "uniform";
  law.density = [](const CirclePoint&) { return 1.0 / kTwoPi; };
  law.sample = [](std::size_t n, SeededRng& rng) { return sample_uniform_s1(n, rng); };
  law.probability = [](const ArcRegion& region) { return region.length() / kTwoPi; };
  return law;
}

LawS1 vmf_law_s1(const VmfSpec& spec) {
  spec.validate();
  LawS1 law;
  law.name = "vmf";
  law.density = [spec](const CirclePoint& x) { return vmf_density(spec, x); };
  law.sample = [spec](std::size_t n, SeededRng& rng) { return sample_vmf_s1(spec, n, rng); };
  law.probability = [density = law.density](const ArcRegion& region) {
    return circle_density_integral(density, region);
  };
  return law;
}

LawS1 mixture_law_s1(const VmfMixtureSpec& spec) {
  spec.validate();
  LawS1 law;
  law.name = "vmf-mixture";
  law.density = [spec](const CirclePoint& x) { return mixture_density(spec, x); };
  law.sample = [spec](std::size_t n, SeededRng& rng) { return sample_vmf_mixture_s1(spec, n, rng); };
  law.probability = [density = law.density](const ArcRegion& region) {
    return circle_density_integral(density, region);
  };
  return law;
}

LawS2 uniform_law_s2() {
  LawS2 law;
  law.name = "uniform";
  law.density = [](const SpherePoint&) { return 1.0 / (4.0 * kPi); };
  law.sample = [](std::size_t n, SeededRng& rng) { return sample_uniform_s2(n, rng); };
  law.probability = [](const RectRegion& region) { return region.area() / (4.0 * kPi); };
  return law;
}

LawS2 vmf_law_s2(const VmfSpec& spec) {
  spec.validate();
  LawS2 law;
  law.name = "vmf";
  law.density = [spec](const SpherePoint& x) { return vmf_density(spec, x); };
  law.sample = [spec](std::size_t n, SeededRng& rng) { return sample_vmf_s2(spec, n, rng); };
  law.probability = [spec, density = law.density](const RectRegion& region) {
    Accumulator total;
    for (const Rect& rect : region.rects()) {
      const RectRegion single({rect});
      if (is_north_pole(spec.mu) && rect.phi_lo == -kPi && rect.phi_hi == kPi) {
        const double upper = vmf_true_prob_cap(spec.kappa, rect.theta_hi);
        const double lower = rect.theta_lo > 0.0 ? vmf_true_prob_cap(spec.kappa, rect.theta_lo) : 0.0;
        total.add(upper - lower);
      } else {
        total.add(integrate_density_s2(density, single));
      }
    }
    return total.value();
  };
  return law;
}

LawS2 mixture_law_s2(const VmfMixtureSpec& spec) {
  spec.validate();
  LawS2 law;
  law.name = "vmf-mixture";
  law.density = [spec](const SpherePoint& x) { return mixture_density(spec, x); };
  law.sample = [spec](std::size_t n, SeededRng& rng) { return sample_vmf_mixture_s2(spec, n, rng); };
  law.probability = [density = law.density](const RectRegion& region) {
    return integrate_density_s2(density, region);
  };
  return law;
}

// ---------------------------------------------------------------------------
// Errors

double integrated_squared_error(const KdeS1& kde, const std::function<double(const CirclePoint&)>& truth,
                                const IseGrid& grid) {
  if (grid.circle_points < 2) throw std::invalid_argument("ISE grid needs at least 2 points");
  const int m = grid.circle_points;
  std::vector<double> sq(m);
  parallel_for(sq.size(), [&](std::size_t i) {
    const double theta = -kPi + kTwoPi * static_cast<double>(i) / m;
    const double diff = kde(theta) - truth(point_from_angle(theta));
    sq[i] = diff * diff;
  });
  Accumulator total;
  for (double v : sq) total.add(v);
  return total.value() * kTwoPi / m;
}

double integrated_squared_error(const KdeS2& kde, const std::function<double(const SpherePoint&)>& truth,
                                const IseGrid& grid) {
  if (grid.u_nodes < 1 || grid.phi_nodes < 1) throw std::invalid_argument("ISE grid is empty");
  const QuadratureRule u_rule = gauss_legendre(grid.u_nodes, -1.0, 1.0);
  const QuadratureRule phi_rule = periodic_trapezoid(grid.phi_nodes, -kPi, kTwoPi);
  std::vector<double> rows(u_rule.nodes.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    const double theta = std::acos(u_rule.nodes[i]);
    Accumulator row;
    for (std::size_t k = 0; k < phi_rule.nodes.size(); ++k) {
      const SpherePoint x = sphere_from_angles(theta, phi_rule.nodes[k]);
      const double diff = kde(x) - truth(x);
      row.add(phi_rule.weights[k] * diff * diff);
    }
    rows[i] = u_rule.weights[i] * row.value();
  });
  Accumulator total;
  for (double v : rows) total.add(v);
  return total.value();
}

MiseReport estimate_mise(const LawS1& law, double s, long n, int reps, std::uint64_t seed,
                         std::optional<int> r) {
  return mise_impl<KdeS1>(law, 1, s, n, reps, seed, r);
}

MiseReport estimate_mise(const LawS2& law, double s, long n, int reps, std::uint64_t seed,
                         std::optional<int> r) {
  return mise_impl<KdeS2>(law, 2, s, n, reps, seed, r);
}

// ---------------------------------------------------------------------------
// Tables

double region_frequency(const SampleS1& sample, const ArcRegion& region) {
  if (sample.size() == 0) throw std::invalid_argument("sample is empty");
  const auto count = std::count_if(sample.points.begin(), sample.points.end(),
                                   [&](const CirclePoint& p) { return region.contains(p); });
  return static_cast<double>(count) / static_cast<double>(sample.size());
}

double region_frequency(const SampleS2& sample, const RectRegion& region) {
  if (sample.size() == 0) throw std::invalid_argument("sample is empty");
  const auto count = std::count_if(sample.points.begin(), sample.points.end(),
                                   [&](const SpherePoint& p) { return region.contains(p); });
  return static_cast<double>(count) / static_cast<double>(sample.size());
}

ProbabilityTable run_probability_table(const LawS1& law, const std::vector<double>& s_values, long n,
                                       const std::vector<NamedArcRegion>& regions, std::uint64_t seed,
                                       std::optional<int> r) {
  if (s_values.empty()) throw std::invalid_argument("need at least one s value");
  ProbabilityTable table;
  table.d = 1;
  table.n = n;
  table.seed = seed;
  table.s_values = s_values;
  SeededRng rng(seed, 0);
  const SampleS1 sample = law.sample(static_cast<std::size_t>(n), rng);
  std::vector<KdeS1> estimators;
  for (double s : s_values) {
    estimators.emplace_back(sample, KdeConfig::make(1, s, n, r));
    table.cutoffs.push_back(estimators.back().config().cutoff);
  }
  for (const NamedArcRegion& named : regions) {
    ProbabilityRow row;
    row.label = named.label;
    for (const KdeS1& kde : estimators) row.kde.push_back(prob_arc_s1(kde, named.region).value);
    row.frequency = region_frequency(sample, named.region);
    row.truth = law.probability(named.region);
    table.rows.push_back(std::move(row));
  }
  return table;
}

ProbabilityTable run_probability_table(const LawS2& law, const std::vector<double>& s_values, long n,
                                       const std::vector<NamedRectRegion>& regions,
                                       std::uint64_t seed, std::optional<int> r) {
  if (s_values.empty()) throw std::invalid_argument("need at least one s value");
  ProbabilityTable table;
  table.d = 2;
  table.n = n;
  table.seed = seed;
  table.s_values = s_values;
  SeededRng rng(seed, 0);
  const SampleS2 sample = law.sample(static_cast<std::size_t>(n), rng);
  std::vector<KdeS2> estimators;
  for (double s : s_values) {
    estimators.emplace_back(sample, KdeConfig::make(2, s, n, r));
    table.cutoffs.push_back(estimators.back().config().cutoff);
  }
  for (const NamedRectRegion& named : regions) {
    ProbabilityRow row;
    row.label = named.label;
    for (const KdeS2& kde : estimators) row.kde.push_back(prob_rect_s2(kde, named.region).value);
    row.frequency = region_frequency(sample, named.region);
    row.truth = law.probability(named.region);
    table.rows.push_back(std::move(row));
  }
  return table;
}

// ---------------------------------------------------------------------------
// Benchmark

RectRegion bench_region() { return RectRegion({{kPi / 4.0, 3.0 * kPi / 4.0, -kPi / 2.0, kPi / 2.0}}); }

BenchReport bench_integration(double s, const std::vector<long>& sizes, const RectRegion& region,
                              std::uint64_t seed, int r, int repetitions,
                              const QuadratureOptions& quadrature) {
  if (sizes.empty()) throw std::invalid_argument("benchmark needs at least one sample size");
  if (repetitions < 1) throw std::invalid_argument("benchmark needs at least one repetition");
  BenchReport report;
  report.s = s;
  report.r = r;
  report.region = region;
  report.seed = seed;
  report.repetitions = repetitions;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const long n = sizes[i];
    SeededRng rng(seed, i);
    const SampleS2 sample = sample_uniform_s2(static_cast<std::size_t>(n), rng);
    const KdeS2 kde(sample, KdeConfig::make(2, s, n, r));
    BenchRow row;
    row.n = n;
    row.cutoff = kde.config().cutoff;
    row.closed_form_value = prob_rect_s2(kde, region).value;  // warm-up
    row.quadrature_value = quadrature_prob(kde, region, quadrature).value;
    std::vector<double> closed;
    std::vector<double> numeric;
    for (int k = 0; k < repetitions; ++k) {
      closed.push_back(prob_rect_s2(kde, region).elapsed);
      numeric.push_back(quadrature_prob(kde, region, quadrature).elapsed);
    }
    row.closed_form_seconds = median(closed);
    row.quadrature_seconds = median(numeric);
    report.rows.push_back(row);
  }
  return report;
}

double chi_square_p_value(const std::vector<std::size_t>& counts, const std::vector<double>& probs) {
  if (counts.size() != probs.size() || counts.size() < 2) {
    throw std::invalid_argument("chi-square test needs matching count and probability cells");
  }
  double total = 0.0;
  for (std::size_t c : counts) total += static_cast<double>(c);
  if (total == 0.0) throw std::invalid_argument("chi-square test needs observations");
  double stat = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (!(probs[i] > 0.0)) throw std::invalid_argument("chi-square cells need positive probability");
    const double expected = total * probs[i];
    const double diff = static_cast<double>(counts[i]) - expected;
    stat += diff * diff / expected;
  }
  const boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace spherekde
