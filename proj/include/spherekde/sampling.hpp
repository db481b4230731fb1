#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "spherekde/geometry.hpp"
#include "spherekde/kde.hpp"

namespace spherekde {

/// 64-bit Mersenne Twister keyed by (seed, stream). The engine and
/// std::seed_seq are fully specified by the standard and every variate is
/// derived here from raw engine output, so the raw streams agree across
/// platforms; transformed draws also depend on the math library.
class SeededRng {
 public:
  SeededRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_positive() { return 1.0 - uniform(); }
  /// Standard normal (Marsaglia polar method).
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct VmfSpec {
  int d = 2;
  /// Mean direction; for d = 1 only the first two entries are used.
  std::array<double, 3> mu{0.0, 0.0, 1.0};
  double kappa = 1.0;

  static VmfSpec circle(double mean_angle, double kappa);
  static VmfSpec sphere(const std::array<double, 3>& mu, double kappa);

  /// Throws std::invalid_argument unless kappa > 0 and |mu| = 1 (1e-9).
  void validate() const;
};

struct VmfMixtureSpec {
  std::vector<double> weights;
  std::vector<VmfSpec> components;

  int d() const;
  /// Weights positive and summing to one within 1e-12, components valid and
  /// of one dimension.
  void validate() const;
};

struct RejectionStats {
  std::uint64_t draws = 0;
  std::uint64_t trials = 0;
  double mean_trials() const { return draws == 0 ? 0.0 : static_cast<double>(trials) / draws; }
};

SampleS1 sample_uniform_s1(std::size_t n, SeededRng& rng);
SampleS2 sample_uniform_s2(std::size_t n, SeededRng& rng);

SampleS1 sample_vmf_s1(const VmfSpec& spec, std::size_t n, SeededRng& rng,
                       RejectionStats* stats = nullptr);
SampleS2 sample_vmf_s2(const VmfSpec& spec, std::size_t n, SeededRng& rng);

/// Component labels are stored in the sample metadata.
SampleS1 sample_vmf_mixture_s1(const VmfMixtureSpec& spec, std::size_t n, SeededRng& rng);
SampleS2 sample_vmf_mixture_s2(const VmfMixtureSpec& spec, std::size_t n, SeededRng& rng);

/// The 3x3 matrix R with (0,0,1) R = mu; rows of a sample centred at the
/// north pole are multiplied by it on the right.
std::array<std::array<double, 3>, 3> vmf_rotation(const std::array<double, 3>& mu);

double vmf_density(const VmfSpec& spec, const CirclePoint& x);
double vmf_density(const VmfSpec& spec, const SpherePoint& x);
double mixture_density(const VmfMixtureSpec& spec, const CirclePoint& x);
double mixture_density(const VmfMixtureSpec& spec, const SpherePoint& x);

}  // namespace spherekde
