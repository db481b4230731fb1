#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spherekde/geometry.hpp"
#include "spherekde/kde.hpp"
#include "spherekde/probability.hpp"
#include "spherekde/sampling.hpp"

namespace spherekde {

/// A known distribution: its density, a sampler and region probabilities.
struct LawS1 {
  std::string name;
  std::function<double(const CirclePoint&)> density;
  std::function<SampleS1(std::size_t, SeededRng&)> sample;
  std::function<double(const ArcRegion&)> probability;
};

struct LawS2 {
  std::string name;
  std::function<double(const SpherePoint&)> density;
  std::function<SampleS2(std::size_t, SeededRng&)> sample;
  std::function<double(const RectRegion&)> probability;
};

LawS1 uniform_law_s1();
LawS1 vmf_law_s1(const VmfSpec& spec);
LawS1 mixture_law_s1(const VmfMixtureSpec& spec);
LawS2 uniform_law_s2();
/// Caps and bands about a north-pole mean use the analytic cap formula;
/// everything else is integrated numerically.
LawS2 vmf_law_s2(const VmfSpec& spec);
LawS2 mixture_law_s2(const VmfMixtureSpec& spec);

struct IseGrid {
  int circle_points = 1024;  // equispaced trapezoid on S1
  int u_nodes = 64;          // Gauss-Legendre in cos(theta) on S2
  int phi_nodes = 128;       // trapezoid in phi on S2
};

/// Integral of (estimate - truth)^2 over the whole domain.
double integrated_squared_error(const KdeS1& kde, const std::function<double(const CirclePoint&)>& truth,
                                const IseGrid& grid = {});
double integrated_squared_error(const KdeS2& kde, const std::function<double(const SpherePoint&)>& truth,
                                const IseGrid& grid = {});

struct MiseReport {
  int d = 1;
  double s = 1.0;
  int r = 0;
  int cutoff = 0;
  long n = 0;
  int reps = 0;
  std::uint64_t seed = 0;
  std::vector<double> values;  // per replication, stream id = index
  double mean = 0.0;
  std::optional<double> std_error;  // absent for a single replication
};

/// Replication i draws from SeededRng(seed, i); replications run in
/// parallel and are reduced in index order.
MiseReport estimate_mise(const LawS1& law, double s, long n, int reps, std::uint64_t seed,
                         std::optional<int> r = std::nullopt);
MiseReport estimate_mise(const LawS2& law, double s, long n, int reps, std::uint64_t seed,
                         std::optional<int> r = std::nullopt);

struct NamedArcRegion {
  std::string label;
  ArcRegion region;
};

struct NamedRectRegion {
  std::string label;
  RectRegion region;
};

struct ProbabilityRow {
  std::string label;
  std::vector<double> kde;  // one entry per s value
  double frequency = 0.0;
  double truth = 0.0;
};

struct ProbabilityTable {
  int d = 1;
  long n = 0;
  std::uint64_t seed = 0;
  std::vector<double> s_values;
  std::vector<int> cutoffs;
  std::vector<ProbabilityRow> rows;
};

/// One sample from SeededRng(seed, 0) shared by every s value.
ProbabilityTable run_probability_table(const LawS1& law, const std::vector<double>& s_values, long n,
                                       const std::vector<NamedArcRegion>& regions, std::uint64_t seed,
                                       std::optional<int> r = std::nullopt);
ProbabilityTable run_probability_table(const LawS2& law, const std::vector<double>& s_values, long n,
                                       const std::vector<NamedRectRegion>& regions,
                                       std::uint64_t seed, std::optional<int> r = std::nullopt);

/// Fraction of points in the region (half-open membership).
double region_frequency(const SampleS1& sample, const ArcRegion& region);
double region_frequency(const SampleS2& sample, const RectRegion& region);

struct BenchRow {
  long n = 0;
  int cutoff = 0;
  double closed_form_seconds = 0.0;  // median
  double quadrature_seconds = 0.0;   // median
  double closed_form_value = 0.0;
  double quadrature_value = 0.0;
};

struct BenchReport {
  double s = 1.0;
  int r = 6;
  RectRegion region;
  std::uint64_t seed = 0;
  int repetitions = 5;
  std::vector<BenchRow> rows;
};

/// [pi/4, 3pi/4] x [-pi/2, pi/2].
RectRegion bench_region();

/// Uniform samples on S2 (stream = index in `sizes`). For each size one
/// untimed warm-up, then the median of `repetitions` timed runs of each
/// method.
BenchReport bench_integration(double s, const std::vector<long>& sizes, const RectRegion& region,
                              std::uint64_t seed, int r = 6, int repetitions = 5,
                              const QuadratureOptions& quadrature = {});

/// Upper-tail p-value of Pearson's statistic for observed counts against
/// cell probabilities (df = cells - 1).
double chi_square_p_value(const std::vector<std::size_t>& counts, const std::vector<double>& probs);

}  // namespace spherekde
