#include "spherekde/kde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "spherekde/parallel.hpp"

namespace spherekde {

namespace {

void check_d(int d) {
  if (d != 1 && d != 2) throw std::invalid_argument("dimension d must be 1 or 2");
}

void check_s(double s) {
  if (!(std::isfinite(s) && s > 0.0)) throw std::invalid_argument("smoothness s must be positive");
}

void check_n(long n) {
  if (n < 1) throw std::invalid_argument("sample size n must be at least 1");
}

// Neumaier summation.
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

// Sum_{l=0}^{N} c_l P_l(x) by the Clenshaw recurrence.
double legendre_series(const std::vector<double>& c, double x) {
  double b1 = 0.0;
  double b2 = 0.0;
  for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) {
    const double alpha = (2.0 * k + 1.0) * x / (k + 1.0);
    const double beta = -(k + 1.0) / (k + 2.0);
    const double b0 = c[k] + alpha * b1 + beta * b2;
    b2 = b1;
    b1 = b0;
  }
  return b1;
}

}  // namespace

int strict_ceil(double s) {
  check_s(s);
  const double f = std::floor(s);
  if (f >= static_cast<double>(std::numeric_limits<int>::max())) {
    throw std::invalid_argument("smoothness s is too large");
  }
  return static_cast<int>(f) + 1;
}

int default_r(int d, double s) {
  check_d(d);
  return 2 * d + strict_ceil(s) + 1;
}

double bandwidth(long n, double s, int d) {
  check_n(n);
  check_s(s);
  check_d(d);
  return std::pow(static_cast<double>(n), -1.0 / (2.0 * s + d));
}

int truncation_index(long n, double s, int d, int r) {
  check_n(n);
  check_s(s);
  check_d(d);
  if (r <= d) throw std::invalid_argument("decay exponent r must exceed the dimension d");
  const double base = std::pow(static_cast<double>(n), (s + r) / (2.0 * s + d)) /
                      (d * kPi * (r - d));
  const double value = std::floor(std::pow(base, 1.0 / (r - d))) + 1.0;
  if (!(value < 1e6)) throw std::invalid_argument("cutoff N_s is unreasonably large");
  return static_cast<int>(value);
}

double symbol_g_r(int r, double lambda) {
  if (r < 1) throw std::invalid_argument("symbol exponent r must be at least 1");
  return 1.0 / (1.0 + std::pow(std::abs(lambda), r));
}

KdeConfig KdeConfig::make(int d, double s, long n, std::optional<int> r) {
  KdeConfig cfg;
  cfg.d = d;
  cfg.s = s;
  cfg.n = n;
  cfg.r_defaulted = !r.has_value();
  cfg.r = r.value_or(default_r(d, s));
  cfg.h = bandwidth(n, s, d);
  cfg.cutoff = truncation_index(n, s, d, cfg.r);
  return cfg;
}

KdeConfig KdeConfig::with_cutoff(int cutoff) const {
  if (cutoff < 0) throw std::invalid_argument("cutoff must be nonnegative");
  KdeConfig out = *this;
  out.cutoff = cutoff;
  return out;
}

// ---------------------------------------------------------------------------

KdeS1::KdeS1(const SampleS1& sample, const KdeConfig& cfg) : cfg_(cfg) {
  if (cfg.d != 1) throw std::invalid_argument("circle estimator needs d = 1");
  if (sample.size() == 0) throw std::invalid_argument("sample is empty");
  if (static_cast<long>(sample.size()) != cfg.n) {
    throw std::invalid_argument("config n = " + std::to_string(cfg.n) + " but the sample has " +
                                std::to_string(sample.size()) + " points");
  }
  const int N = cfg.cutoff;
  g_.resize(N + 1);
  for (int l = 0; l <= N; ++l) g_[l] = symbol_g_r(cfg.r, cfg.h * l);
  a_.assign(N + 1, 0.0);
  b_.assign(N + 1, 0.0);
  for (int l = 0; l <= N; ++l) {
    Accumulator ca;
    Accumulator sa;
    for (const CirclePoint& p : sample.points) {
      ca.add(std::cos(l * p.theta()));
      sa.add(std::sin(l * p.theta()));
    }
    a_[l] = ca.value();
    b_[l] = sa.value();
  }
}

double KdeS1::operator()(double theta) const {
  if (!std::isfinite(theta)) throw std::invalid_argument("angle must be finite");
  Accumulator acc;
  acc.add(static_cast<double>(cfg_.n));
  for (int l = 1; l <= cfg_.cutoff; ++l) {
    acc.add(2.0 * g_[l] * (a_[l] * std::cos(l * theta) + b_[l] * std::sin(l * theta)));
  }
  return acc.value() / (kTwoPi * cfg_.n);
}

KdeS2::KdeS2(const SampleS2& sample, const KdeConfig& cfg) : cfg_(cfg), points_(sample.points) {
  if (cfg.d != 2) throw std::invalid_argument("sphere estimator needs d = 2");
  if (sample.size() == 0) throw std::invalid_argument("sample is empty");
  if (static_cast<long>(sample.size()) != cfg.n) {
    throw std::invalid_argument("config n = " + std::to_string(cfg.n) + " but the sample has " +
                                std::to_string(sample.size()) + " points");
  }
  const int N = cfg.cutoff;
  g_.resize(N + 1);
  c_.resize(N + 1);
  for (int l = 0; l <= N; ++l) {
    g_[l] = symbol_g_r(cfg.r, cfg.h * std::sqrt(static_cast<double>(l) * (l + 1)));
    c_[l] = (2.0 * l + 1.0) / (4.0 * kPi) * g_[l];
  }
}

double KdeS2::operator()(const SpherePoint& x) const {
  Accumulator acc;
  for (const SpherePoint& p : points_) {
    const double t = std::clamp(dot(x, p), -1.0, 1.0);
    acc.add(legendre_series(c_, t));
  }
  return acc.value() / static_cast<double>(points_.size());
}

double kde_eval_s1(const SampleS1& sample, const KdeConfig& cfg, double theta) {
  return KdeS1(sample, cfg)(theta);
}

double kde_eval_s2(const SampleS2& sample, const KdeConfig& cfg, const SpherePoint& x) {
  return KdeS2(sample, cfg)(x);
}

std::vector<GridValue> kde_grid_eval(const KdeS1& kde, const GridSpec& grid) {
  if (grid.theta_count < 2) throw std::invalid_argument("grid needs at least 2 points");
  std::vector<GridValue> out(grid.theta_count);
  parallel_for(out.size(), [&](std::size_t i) {
    const double theta = -kPi + kTwoPi * static_cast<double>(i) / (grid.theta_count - 1);
    out[i] = {theta, 0.0, kde(theta)};
  });
  return out;
}

std::vector<GridValue> kde_grid_eval(const KdeS2& kde, const GridSpec& grid) {
  if (grid.theta_count < 2 || grid.phi_count < 2) {
    throw std::invalid_argument("grid needs at least 2 points along each axis");
  }
  const std::size_t rows = grid.theta_count;
  const std::size_t cols = grid.phi_count;
  std::vector<GridValue> out(rows * cols);
  parallel_for(out.size(), [&](std::size_t idx) {
    const std::size_t i = idx / cols;
    const std::size_t k = idx % cols;
    const double theta = kPi * static_cast<double>(i) / (rows - 1);
    const double phi = -kPi + kTwoPi * static_cast<double>(k) / (cols - 1);
    out[idx] = {theta, phi, kde(sphere_from_angles(theta, phi))};
  });
  return out;
}

}  // namespace spherekde
