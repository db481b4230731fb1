#include "cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spherekde/errors.hpp"
#include "spherekde/evaluation.hpp"
#include "spherekde/io.hpp"
#include "spherekde/kde.hpp"
#include "spherekde/parallel.hpp"
#include "spherekde/probability.hpp"
#include "spherekde/sampling.hpp"
#include "spherekde/studies.hpp"

namespace spherekde::cli {

namespace {

using nlohmann::json;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Flag values

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(strip(cur));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

// Numbers with an optional pi, sqrt(..), '*' and '/', e.g. "-3*pi/4" or
// "sqrt(3)/2". No addition, so a leading minus is never ambiguous.
class ScalarParser {
 public:
  ScalarParser(const std::string& text, const std::string& field) : s_(text), field_(field) {}

  double parse() {
    const double v = product();
    skip_space();
    if (i_ != s_.size()) fail();
    if (!std::isfinite(v)) fail();
    return v;
  }

 private:
  double product() {
    double v = unary();
    for (;;) {
      skip_space();
      if (eat('*')) {
        v *= unary();
      } else if (eat('/')) {
        v /= unary();
      } else {
        return v;
      }
    }
  }

  double unary() {
    skip_space();
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return primary();
  }

  double primary() {
    skip_space();
    if (eat('(')) {
      const double v = product();
      if (!eat(')')) fail();
      return v;
    }
    if (s_.compare(i_, 2, "pi") == 0) {
      i_ += 2;
      return kPi;
    }
    if (s_.compare(i_, 5, "sqrt(") == 0) {
      i_ += 5;
      const double v = product();
      if (!eat(')') || v < 0.0) fail();
      return std::sqrt(v);
    }
    double v = 0.0;
    const char* begin = s_.data() + i_;
    const auto [ptr, ec] = std::from_chars(begin, s_.data() + s_.size(), v);
    if (ec != std::errc() || ptr == begin) fail();
    i_ += static_cast<std::size_t>(ptr - begin);
    return v;
  }

  bool eat(char c) {
    skip_space();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }

  void skip_space() {
    while (i_ < s_.size() && s_[i_] == ' ') ++i_;
  }

  [[noreturn]] void fail() const {
    throw UsageError(field_ + ": cannot read '" + s_ + "' as a number");
  }

  const std::string& s_;
  const std::string& field_;
  std::size_t i_ = 0;
};

double parse_scalar(const std::string& text, const std::string& field) {
  return ScalarParser(strip(text), field).parse();
}

std::vector<double> parse_list(const std::string& text, const std::string& field,
                               std::size_t expected = 0) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_scalar(part, field));
  if (out.empty()) throw UsageError(field + ": empty list");
  if (expected != 0 && out.size() != expected) {
    throw UsageError(field + ": expected " + std::to_string(expected) + " values, got " +
                     std::to_string(out.size()));
  }
  return out;
}

// Unit vectors typed as decimals are accepted up to a 1e-6 norm error and
// then normalized.
std::array<double, 3> parse_direction(const std::string& text, int d, const std::string& field) {
  const auto v = parse_list(text, field, static_cast<std::size_t>(d + 1));
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (std::abs(norm - 1.0) > 1e-6) throw UsageError(field + ": not a unit vector: '" + text + "'");
  std::array<double, 3> mu{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < v.size(); ++i) mu[i] = v[i] / norm;
  return mu;
}

std::vector<long> parse_sizes(const std::string& text, const std::string& field) {
  std::vector<long> out;
  const auto parts = split(text, ':');
  if (parts.size() == 3) {
    const auto lo = static_cast<long>(parse_scalar(parts[0], field));
    const auto hi = static_cast<long>(parse_scalar(parts[1], field));
    const auto step = static_cast<long>(parse_scalar(parts[2], field));
    if (lo < 1 || hi < lo || step < 1) throw UsageError(field + ": bad range '" + text + "'");
    for (long n = lo; n <= hi; n += step) out.push_back(n);
    return out;
  }
  for (double v : parse_list(text, field)) {
    if (v < 1 || v != std::floor(v)) throw UsageError(field + ": sizes must be positive integers");
    out.push_back(static_cast<long>(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Distributions

struct DistOptions {
  std::string dist;
  int d = 2;
  std::string mu;
  std::optional<double> kappa;
  std::string weights;
  std::string kappas;
  std::string means;
};

void add_dist_options(CLI::App* cmd, DistOptions& o, const std::string& flag) {
  cmd->add_option(flag, o.dist, "uniform, vmf or vmf-mixture")
      ->required()
      ->check(CLI::IsMember({"uniform", "vmf", "vmf-mixture"}));
  cmd->add_option("--d", o.d, "1 (circle) or 2 (sphere)")->check(CLI::IsMember({1, 2}));
  cmd->add_option("--mu", o.mu, "vMF mean direction, e.g. 0,0,1");
  cmd->add_option("--kappa", o.kappa, "vMF concentration");
  cmd->add_option("--W", o.weights, "mixture weights, e.g. 1/2,1/2");
  cmd->add_option("--K", o.kappas, "mixture concentrations, e.g. 12,10");
  cmd->add_option("--M", o.means, "mixture means separated by ';', e.g. '0,0,1;0,-1,0'");
}

VmfSpec vmf_from(const std::array<double, 3>& mu, double kappa, int d) {
  if (d == 1) return VmfSpec::circle(std::atan2(mu[1], mu[0]), kappa);
  return VmfSpec::sphere(mu, kappa);
}

VmfSpec vmf_spec(const DistOptions& o, const std::string& cmd) {
  if (o.mu.empty()) throw UsageError(cmd + ": vmf requires --mu");
  if (!o.kappa) throw UsageError(cmd + ": vmf requires --kappa");
  if (!(*o.kappa > 0.0)) throw UsageError(cmd + ": --kappa must be positive");
  return vmf_from(parse_direction(o.mu, o.d, "--mu"), *o.kappa, o.d);
}

VmfMixtureSpec mixture_spec(const DistOptions& o, const std::string& cmd) {
  for (const auto& [value, name] : {std::pair{o.weights, "--W"}, {o.kappas, "--K"}, {o.means, "--M"}}) {
    if (value.empty()) throw UsageError(cmd + ": vmf-mixture requires " + std::string(name));
  }
  const auto w = parse_list(o.weights, "--W");
  const auto k = parse_list(o.kappas, "--K", w.size());
  const auto m = split(o.means, ';');
  if (m.size() != w.size()) {
    throw UsageError("--M: expected " + std::to_string(w.size()) + " directions, got " +
                     std::to_string(m.size()));
  }
  VmfMixtureSpec spec;
  spec.weights = w;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (!(k[j] > 0.0)) throw UsageError("--K: concentrations must be positive");
    spec.components.push_back(vmf_from(parse_direction(m[j], o.d, "--M"), k[j], o.d));
  }
  // Weights typed as decimals may miss one by rounding.
  double total = 0.0;
  for (double x : spec.weights) total += x;
  if (std::abs(total - 1.0) > 1e-6) throw UsageError("--W: weights must sum to 1");
  for (double& x : spec.weights) x /= total;
  spec.validate();
  return spec;
}

LawS1 law_s1(const DistOptions& o, const std::string& cmd) {
  if (o.dist == "uniform") return uniform_law_s1();
  if (o.dist == "vmf") return vmf_law_s1(vmf_spec(o, cmd));
  return mixture_law_s1(mixture_spec(o, cmd));
}

LawS2 law_s2(const DistOptions& o, const std::string& cmd) {
  if (o.dist == "uniform") return uniform_law_s2();
  if (o.dist == "vmf") return vmf_law_s2(vmf_spec(o, cmd));
  return mixture_law_s2(mixture_spec(o, cmd));
}

json dist_json(const DistOptions& o) {
  json j{{"dist", o.dist}, {"d", o.d}};
  if (!o.mu.empty()) j["mu"] = o.mu;
  if (o.kappa) j["kappa"] = *o.kappa;
  if (!o.weights.empty()) j["W"] = o.weights;
  if (!o.kappas.empty()) j["K"] = o.kappas;
  if (!o.means.empty()) j["M"] = o.means;
  return j;
}

// ---------------------------------------------------------------------------
// Output

void emit_json(json report, RunManifest& manifest, const std::string& out_path, std::ostream& out) {
  manifest.finish();
  report["manifest"] = manifest.to_json();
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
  } else {
    write_file_atomic(out_path, text);
  }
}

void emit_csv(const std::string& csv, RunManifest& manifest, const std::string& out_path) {
  write_file_atomic(out_path, csv);
  manifest.finish();
  write_file_atomic(out_path + ".manifest.json", manifest.to_json().dump(2) + "\n");
}

std::vector<std::string> config_comments(const KdeConfig& cfg) {
  return {"d=" + std::to_string(cfg.d), "n=" + std::to_string(cfg.n), "s=" + format_double(cfg.s),
          "r=" + std::to_string(cfg.r), "h=" + format_double(cfg.h),
          "N_s=" + std::to_string(cfg.cutoff)};
}

json config_json(const KdeConfig& cfg) {
  return {{"d", cfg.d}, {"n", cfg.n}, {"s", cfg.s}, {"r", cfg.r}, {"h", cfg.h}, {"cutoff", cfg.cutoff}};
}

// ---------------------------------------------------------------------------
// Commands

struct SampleArgs {
  DistOptions dist;
  long n = 0;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  std::string out;
};

int cmd_sample(const SampleArgs& a) {
  RunManifest manifest("sample");
  manifest.set_parameter("distribution", dist_json(a.dist));
  manifest.set_parameter("n", a.n);
  manifest.set_parameter("stream", a.stream);
  manifest.add_seed(a.seed);
  SeededRng rng(a.seed, a.stream);
  std::vector<std::string> comments = {"dist=" + a.dist.dist, "d=" + std::to_string(a.dist.d),
                                       "n=" + std::to_string(a.n), "seed=" + std::to_string(a.seed),
                                       "stream=" + std::to_string(a.stream)};
  const auto n = static_cast<std::size_t>(a.n);
  std::string csv;
  if (a.dist.d == 1) {
    csv = sample_to_csv(law_s1(a.dist, "sample").sample(n, rng), comments);
  } else {
    csv = sample_to_csv(law_s2(a.dist, "sample").sample(n, rng), comments);
  }
  emit_csv(csv, manifest, a.out);
  return kOk;
}

struct EstimatorArgs {
  std::string data;
  int d = 2;
  double s = 1.0;
  std::optional<int> r;
};

void add_estimator_options(CLI::App* cmd, EstimatorArgs& a) {
  cmd->add_option("--data", a.data, "sample CSV")->required();
  cmd->add_option("--d", a.d, "1 (circle) or 2 (sphere)")->check(CLI::IsMember({1, 2}));
  cmd->add_option("--s", a.s, "smoothness s > 0")->check(CLI::PositiveNumber);
  cmd->add_option("--r", a.r, "symbol exponent r > d (default 2d + floor(s) + 2)");
}

void record_estimator(RunManifest& manifest, const EstimatorArgs& a, const KdeConfig& cfg) {
  manifest.add_input(a.data);
  manifest.set_parameter("d", a.d);
  manifest.set_parameter("s", a.s);
  manifest.set_parameter("r", cfg.r);
  manifest.set_parameter("h", cfg.h);
  manifest.set_parameter("cutoff", cfg.cutoff);
}

struct EvalArgs {
  EstimatorArgs est;
  int theta_points = 0;
  int phi_points = 0;
  std::string out;
};

int cmd_eval(const EvalArgs& a) {
  RunManifest manifest("eval");
  std::string csv;
  auto write_grid = [&](const std::vector<GridValue>& grid, const KdeConfig& cfg) {
    std::vector<std::string> comments = {"source=" + a.est.data};
    for (auto& c : config_comments(cfg)) comments.push_back(c);
    for (const auto& c : comments) csv += "# " + c + "\n";
    if (a.est.d == 1) {
      csv += "theta_rad,density\n";
      for (const auto& g : grid) csv += format_double(g.theta) + "," + format_double(g.value) + "\n";
    } else {
      csv += "theta_rad,phi_rad,density\n";
      for (const auto& g : grid) {
        csv += format_double(g.theta) + "," + format_double(g.phi) + "," + format_double(g.value) + "\n";
      }
    }
    record_estimator(manifest, a.est, cfg);
  };
  if (a.est.d == 1) {
    const SampleS1 sample = read_sample_s1(a.est.data);
    const auto cfg = KdeConfig::make(1, a.est.s, static_cast<long>(sample.size()), a.est.r);
    const GridSpec grid{a.theta_points > 0 ? a.theta_points : 65, 0};
    manifest.set_parameter("grid", {grid.theta_count});
    write_grid(kde_grid_eval(KdeS1(sample, cfg), grid), cfg);
  } else {
    const SampleS2 sample = read_sample_s2(a.est.data);
    const auto cfg = KdeConfig::make(2, a.est.s, static_cast<long>(sample.size()), a.est.r);
    const GridSpec grid{a.theta_points > 0 ? a.theta_points : 33, a.phi_points > 0 ? a.phi_points : 65};
    manifest.set_parameter("grid", {grid.theta_count, grid.phi_count});
    write_grid(kde_grid_eval(KdeS2(sample, cfg), grid), cfg);
  }
  emit_csv(csv, manifest, a.out);
  return kOk;
}

struct ProbArgs {
  EstimatorArgs est;
  std::vector<std::string> arcs;
  std::vector<std::string> rects;
  std::vector<std::string> latlon_boxes;
  std::vector<std::string> date_arcs;
  bool full = false;
  bool degrees = false;
  std::string method = "closed";
  std::string precision = "auto";
  std::string out;
};

// Zero-based day of a 365-day year.
int day_of_common_year(const std::string& text, const std::string& field) {
  const auto parts = split(text, '-');
  if (parts.size() != 2) throw UsageError(field + ": expected MM-DD, got '" + text + "'");
  unsigned m = 0;
  unsigned d = 0;
  auto read = [&](const std::string& s, unsigned& v) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw UsageError(field + ": expected MM-DD, got '" + text + "'");
    }
  };
  read(parts[0], m);
  read(parts[1], d);
  using namespace std::chrono;
  const year_month_day ymd{year{2001}, month{m}, day{d}};
  if (!ymd.ok()) throw UsageError(field + ": no such day in a 365-day year: '" + text + "'");
  return static_cast<int>((sys_days{ymd} - sys_days{year{2001} / January / 1}).count());
}

// Whole days first..last inclusive, mapped like ingested dates.
ArcRegion date_arc(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw UsageError("--date-arc: expected MM-DD,MM-DD");
  const int first = day_of_common_year(parts[0], "--date-arc");
  const int last = day_of_common_year(parts[1], "--date-arc");
  if ((last + 1) % 365 == first) return ArcRegion::full_circle();
  const double lo = kTwoPi * first / 365.0 - kPi;
  const double hi = kTwoPi * (last + 1) / 365.0 - kPi;
  return ArcRegion::span(lo, hi);
}

template <class Region>
void unite(std::optional<Region>& acc, const Region& piece) {
  acc = acc ? acc->united(piece) : piece;
}

ArcRegion arc_region(const ProbArgs& a) {
  if (!a.rects.empty() || !a.latlon_boxes.empty()) {
    throw UsageError("prob: --rect and --latlon-box need --d 2");
  }
  const double unit = a.degrees ? kPi / 180.0 : 1.0;
  std::optional<ArcRegion> region;
  if (a.full) unite(region, ArcRegion::full_circle());
  for (const auto& s : a.arcs) {
    const auto v = parse_list(s, "--arc", 2);
    unite(region, ArcRegion::span(v[0] * unit, v[1] * unit));
  }
  for (const auto& s : a.date_arcs) unite(region, date_arc(s));
  if (!region) throw UsageError("prob: no region given (use --arc, --date-arc or --full)");
  return *region;
}

RectRegion rect_region(const ProbArgs& a) {
  if (!a.arcs.empty() || !a.date_arcs.empty()) throw UsageError("prob: --arc and --date-arc need --d 1");
  const double unit = a.degrees ? kPi / 180.0 : 1.0;
  std::optional<RectRegion> region;
  if (a.full) unite(region, RectRegion::full_sphere());
  for (const auto& s : a.rects) {
    const auto v = parse_list(s, "--rect", 4);
    unite(region, RectRegion::box(v[0] * unit, v[1] * unit, v[2] * unit, v[3] * unit));
  }
  for (const auto& s : a.latlon_boxes) {
    const auto v = parse_list(s, "--latlon-box", 4);
    unite(region, RectRegion::latlon_box(v[0], v[1], v[2], v[3]));
  }
  if (!region) throw UsageError("prob: no region given (use --rect, --latlon-box or --full)");
  return *region;
}

json region_json(const ArcRegion& r) {
  json j = json::array();
  for (const Arc& a : r.arcs()) j.push_back({a.lo, a.hi});
  return j;
}

json region_json(const RectRegion& r) {
  json j = json::array();
  for (const Rect& x : r.rects()) j.push_back({x.theta_lo, x.theta_hi, x.phi_lo, x.phi_hi});
  return j;
}

int cmd_prob(const ProbArgs& a, std::ostream& out) {
  RunManifest manifest("prob");
  manifest.set_parameter("method", a.method);
  manifest.set_parameter("precision", a.precision);
  const PrecisionMode mode = PrecisionMode::parse(a.precision);
  std::vector<ProbEstimate> results;
  json report;
  if (a.est.d == 1) {
    const ArcRegion region = arc_region(a);
    const SampleS1 sample = read_sample_s1(a.est.data);
    const auto cfg = KdeConfig::make(1, a.est.s, static_cast<long>(sample.size()), a.est.r);
    record_estimator(manifest, a.est, cfg);
    manifest.set_parameter("region", region_json(region));
    const KdeS1 kde(sample, cfg);
    if (a.method != "quadrature") results.push_back(prob_arc_s1(kde, region));
    if (a.method != "closed") results.push_back(quadrature_prob(kde, region));
    report = config_json(cfg);
    report["region"] = region_json(region);
    report["frequency"] = region_frequency(sample, region);
  } else {
    const RectRegion region = rect_region(a);
    const SampleS2 sample = read_sample_s2(a.est.data);
    const auto cfg = KdeConfig::make(2, a.est.s, static_cast<long>(sample.size()), a.est.r);
    record_estimator(manifest, a.est, cfg);
    manifest.set_parameter("region", region_json(region));
    const KdeS2 kde(sample, cfg);
    if (a.method != "quadrature") results.push_back(prob_rect_s2(kde, region, mode));
    if (a.method != "closed") results.push_back(quadrature_prob(kde, region));
    report = config_json(cfg);
    report["region"] = region_json(region);
    report["frequency"] = region_frequency(sample, region);
  }
  const ProbEstimate& first = results.front();
  report["probability"] = first.value;
  report["method"] = to_string(first.method);
  report["precision"] = first.precision.to_string();
  report["elapsed_seconds"] = first.elapsed;
  if (results.size() == 2) {
    report["quadrature_probability"] = results[1].value;
    report["quadrature_elapsed_seconds"] = results[1].elapsed;
    report["abs_difference"] = std::abs(results[0].value - results[1].value);
  }
  emit_json(report, manifest, a.out, out);
  return kOk;
}

struct IngestArgs {
  std::string kind;
  std::string in;
  std::string out;
  std::string on_error = "fail";
  std::vector<std::string> where;
  int skip_lines = 0;
  std::string column = "angle";
  std::string lat_column = "latitude";
  std::string lon_column = "longitude";
  std::string date_column = "date";
  std::string value_column;
  double min_value = 0.0;
  std::string day_position = "midpoint";
};

// Fractional day within a date at which an event is placed.
double day_offset(const std::string& position) {
  if (position == "start") return 1.0 / 86400.0;  // one second past midnight
  if (position == "end") return 1.0;
  return 0.5;
}

// Angle of a calendar date with a 365- or 366-day period for its year.
double date_angle(const std::string& text, double offset) {
  const std::string date = text.substr(0, 10);
  if (text.size() > 10 && text[10] != 'T' && text[10] != ' ') throw DataError("bad date '" + text + "'");
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  const char* p = date.data();
  const char* end = date.data() + date.size();
  auto r1 = std::from_chars(p, end, y);
  bool ok = r1.ec == std::errc() && r1.ptr != end && *r1.ptr == '-';
  if (ok) {
    auto r2 = std::from_chars(r1.ptr + 1, end, m);
    ok = r2.ec == std::errc() && r2.ptr != end && *r2.ptr == '-';
    if (ok) {
      auto r3 = std::from_chars(r2.ptr + 1, end, d);
      ok = r3.ec == std::errc() && r3.ptr == end;
    }
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ok || !ymd.ok()) throw DataError("bad date '" + text + "' (expected YYYY-MM-DD)");
  const double doy = static_cast<double>((sys_days{ymd} - sys_days{year{y} / January / 1}).count());
  const double period = ymd.year().is_leap() ? 366.0 : 365.0;
  return periodic_to_angle(doy + offset, 0.0, period).theta();
}

int cmd_ingest(const IngestArgs& a, std::ostream& err) {
  RunManifest manifest("ingest");
  manifest.add_input(a.in);
  manifest.set_parameter("kind", a.kind);
  manifest.set_parameter("on_error", a.on_error);
  manifest.set_parameter("where", a.where);
  manifest.set_parameter("skip_lines", a.skip_lines);

  std::ifstream file(a.in, std::ios::binary);
  if (!file) throw DataError("cannot open '" + a.in + "'");
  std::string text;
  std::string line;
  for (int i = 0; i < a.skip_lines && std::getline(file, line); ++i) {
  }
  std::ostringstream rest;
  rest << file.rdbuf();
  text = rest.str();
  CsvTable table = parse_csv(text, a.in);
  for (auto& ln : table.line_numbers) ln += static_cast<std::size_t>(a.skip_lines);

  auto col = [&](const std::string& name) {
    const int c = table.column(name);
    if (c < 0) throw DataError(a.in + ": missing column '" + name + "'");
    return static_cast<std::size_t>(c);
  };
  std::vector<std::pair<std::size_t, std::string>> filters;
  for (const auto& w : a.where) {
    const auto eq = w.find('=');
    if (eq == std::string::npos) throw UsageError("--where: expected column=value, got '" + w + "'");
    filters.emplace_back(col(strip(w.substr(0, eq))), strip(w.substr(eq + 1)));
  }

  SampleS1 circle;
  SampleS2 sphere;
  std::size_t filtered = 0;
  std::vector<std::string> problems;
  const double offset = day_offset(a.day_position);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::size_t ln = table.line_numbers[i];
    bool keep = true;
    for (const auto& [c, v] : filters) keep = keep && row[c] == v;
    if (!keep) {
      ++filtered;
      continue;
    }
    try {
      if (a.kind == "degrees-to-angle") {
        const double deg = parse_field(row[col(a.column)], a.in, ln);
        circle.points.push_back(point_from_angle(deg * kPi / 180.0));
      } else if (a.kind == "latlon-to-sphere") {
        const double lat = parse_field(row[col(a.lat_column)], a.in, ln);
        const double lon = parse_field(row[col(a.lon_column)], a.in, ln);
        sphere.points.push_back(latlon_to_cartesian(lat, lon));
      } else {
        if (!a.value_column.empty()) {
          if (parse_field(row[col(a.value_column)], a.in, ln) <= a.min_value) {
            ++filtered;
            continue;
          }
        }
        circle.points.push_back(point_from_angle(date_angle(row[col(a.date_column)], offset)));
      }
    } catch (const DataError& e) {
      const std::string what = e.what();
      if (what.find("missing column") != std::string::npos) throw;
      const std::string where = a.in + ":" + std::to_string(ln) + ": ";
      problems.push_back(what.rfind(where, 0) == 0 ? what : where + what);
    } catch (const std::invalid_argument& e) {
      problems.push_back(a.in + ":" + std::to_string(ln) + ": " + e.what());
    }
  }

  const std::size_t kept = a.kind == "latlon-to-sphere" ? sphere.size() : circle.size();
  err << "ingest: " << table.rows.size() << " rows, " << kept << " kept, " << filtered << " filtered, "
      << problems.size() << " malformed\n";
  for (std::size_t i = 0; i < problems.size() && i < 5; ++i) err << "  " << problems[i] << "\n";
  if (!problems.empty() && a.on_error == "fail") {
    throw DataError(std::to_string(problems.size()) + " malformed rows; first: " + problems.front());
  }
  if (kept == 0) throw DataError(a.in + ": no observations left after ingestion");

  manifest.set_parameter("rows", table.rows.size());
  manifest.set_parameter("kept", kept);
  manifest.set_parameter("filtered", filtered);
  manifest.set_parameter("malformed", problems.size());
  std::vector<std::string> comments = {"ingest " + a.kind, "source=" + a.in,
                                       "kept=" + std::to_string(kept),
                                       "malformed=" + std::to_string(problems.size())};
  if (a.kind == "dates-to-angle") comments.push_back("day_position=" + a.day_position);
  const std::string csv =
      a.kind == "latlon-to-sphere" ? sample_to_csv(sphere, comments) : sample_to_csv(circle, comments);
  emit_csv(csv, manifest, a.out);
  return kOk;
}

struct MiseArgs {
  DistOptions dist;
  std::string s_values = "0.5,1,2";
  long n = 1000;
  int reps = 30;
  std::uint64_t seed = 1;
  std::optional<int> r;
  std::string out;
};

int cmd_mise(const MiseArgs& a, std::ostream& out) {
  RunManifest manifest("mise");
  manifest.set_parameter("distribution", dist_json(a.dist));
  manifest.set_parameter("s", a.s_values);
  manifest.set_parameter("n", a.n);
  manifest.set_parameter("reps", a.reps);
  if (a.r) manifest.set_parameter("r", *a.r);
  manifest.add_seed(a.seed);
  const auto s_values = parse_list(a.s_values, "--s");
  for (double s : s_values) {
    if (!(s > 0.0)) throw UsageError("--s: values must be positive");
  }
  json results = json::array();
  for (double s : s_values) {
    const MiseReport rep = a.dist.d == 1 ? estimate_mise(law_s1(a.dist, "mise"), s, a.n, a.reps, a.seed, a.r)
                                         : estimate_mise(law_s2(a.dist, "mise"), s, a.n, a.reps, a.seed, a.r);
    json j{{"s", rep.s},       {"r", rep.r},        {"cutoff", rep.cutoff},
           {"mean", rep.mean}, {"values", rep.values}};
    if (rep.std_error) j["std_error"] = *rep.std_error;
    results.push_back(j);
  }
  json report{{"d", a.dist.d}, {"n", a.n}, {"reps", a.reps}, {"seed", a.seed}, {"results", results}};
  emit_json(report, manifest, a.out, out);
  return kOk;
}

struct BenchArgs {
  std::string sizes = "1000:10000:1000";
  double s = 1.0;
  int r = 6;
  int reps = 5;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  RunManifest manifest("bench");
  manifest.set_parameter("n", a.sizes);
  manifest.set_parameter("s", a.s);
  manifest.set_parameter("r", a.r);
  manifest.set_parameter("reps", a.reps);
  manifest.add_seed(a.seed);
  const auto sizes = parse_sizes(a.sizes, "--n");
  const BenchReport rep = bench_integration(a.s, sizes, bench_region(), a.seed, a.r, a.reps);
  json rows = json::array();
  for (const auto& row : rep.rows) {
    rows.push_back({{"n", row.n},
                    {"cutoff", row.cutoff},
                    {"closed_form_seconds", row.closed_form_seconds},
                    {"quadrature_seconds", row.quadrature_seconds},
                    {"speedup", row.quadrature_seconds / row.closed_form_seconds},
                    {"closed_form_value", row.closed_form_value},
                    {"quadrature_value", row.quadrature_value}});
  }
  json report{{"s", rep.s},       {"r", rep.r},   {"seed", rep.seed}, {"repetitions", rep.repetitions},
              {"region", region_json(rep.region)}, {"rows", rows}};
  emit_json(report, manifest, a.out, out);
  return kOk;
}

struct TableArgs {
  std::string preset;
  std::string s_values = "0.5,1,2";
  long n = 1000;
  std::uint64_t seed = 1;
  std::optional<int> r;
  std::string out;
};

int cmd_table(const TableArgs& a, std::ostream& out) {
  RunManifest manifest("table");
  manifest.set_parameter("preset", a.preset);
  manifest.set_parameter("s", a.s_values);
  manifest.set_parameter("n", a.n);
  if (a.r) manifest.set_parameter("r", *a.r);
  manifest.add_seed(a.seed);
  const auto s_values = parse_list(a.s_values, "--s");
  const StudyPreset p = study_preset(a.preset);
  const ProbabilityTable t = p.d == 1 ? run_probability_table(p.law_s1, s_values, a.n, p.arcs, a.seed, a.r)
                                      : run_probability_table(p.law_s2, s_values, a.n, p.rects, a.seed, a.r);
  json rows = json::array();
  for (const auto& row : t.rows) {
    rows.push_back({{"region", row.label}, {"kde", row.kde}, {"frequency", row.frequency}, {"truth", row.truth}});
  }
  json report{{"preset", a.preset}, {"d", t.d},        {"n", t.n},          {"seed", t.seed},
              {"s", t.s_values},    {"cutoffs", t.cutoffs}, {"rows", rows}};
  emit_json(report, manifest, a.out, out);
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral density estimation and region probabilities on the circle and the sphere"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0: all logical processors)")
      ->check(CLI::NonNegativeNumber);

  SampleArgs sample;
  auto* c_sample = app.add_subcommand("sample", "draw a random sample");
  add_dist_options(c_sample, sample.dist, "--dist");
  c_sample->add_option("--n", sample.n, "sample size")->required()->check(CLI::PositiveNumber);
  c_sample->add_option("--seed", sample.seed, "random seed");
  c_sample->add_option("--stream", sample.stream, "random stream");
  c_sample->add_option("--out", sample.out, "output CSV")->required();

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "evaluate the estimator on a grid");
  add_estimator_options(c_eval, eval.est);
  c_eval->add_option("--theta-points", eval.theta_points, "grid points in theta (S1: 65, S2: 33)")
      ->check(CLI::Range(2, 1 << 20));
  c_eval->add_option("--phi-points", eval.phi_points, "grid points in phi (S2: 65)")
      ->check(CLI::Range(2, 1 << 20));
  c_eval->add_option("--out", eval.out, "output CSV")->required();

  ProbArgs prob;
  auto* c_prob = app.add_subcommand("prob", "estimate the probability of a region");
  add_estimator_options(c_prob, prob.est);
  c_prob->add_option("--arc", prob.arcs, "lo,hi (repeatable)")->allow_extra_args(false);
  c_prob->add_option("--rect", prob.rects, "theta_lo,theta_hi,phi_lo,phi_hi (repeatable)")
      ->allow_extra_args(false);
  c_prob->add_option("--latlon-box", prob.latlon_boxes, "lat_min,lat_max,lon_min,lon_max in degrees")
      ->allow_extra_args(false);
  c_prob->add_option("--date-arc", prob.date_arcs, "MM-DD,MM-DD whole days, 365-day year")
      ->allow_extra_args(false);
  c_prob->add_flag("--full", prob.full, "the whole domain");
  c_prob->add_flag("--degrees", prob.degrees, "--arc and --rect values are in degrees");
  c_prob->add_option("--method", prob.method, "closed, quadrature or both")
      ->check(CLI::IsMember({"closed", "quadrature", "both"}));
  c_prob->add_option("--precision", prob.precision, "auto, double, extended or extended:<bits>");
  c_prob->add_option("--out", prob.out, "output JSON (default: stdout)");

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "convert raw observations to a sample CSV");
  c_ingest->add_option("kind", ingest.kind, "degrees-to-angle, latlon-to-sphere or dates-to-angle")
      ->required()
      ->check(CLI::IsMember({"degrees-to-angle", "latlon-to-sphere", "dates-to-angle"}));
  c_ingest->add_option("--in", ingest.in, "input CSV")->required();
  c_ingest->add_option("--out", ingest.out, "output CSV")->required();
  c_ingest->add_option("--on-error", ingest.on_error, "skip or fail on malformed rows")
      ->check(CLI::IsMember({"skip", "fail"}));
  c_ingest->add_option("--where", ingest.where, "keep rows with column=value (repeatable)")
      ->allow_extra_args(false);
  c_ingest->add_option("--skip-lines", ingest.skip_lines, "raw lines to drop before the header")
      ->check(CLI::NonNegativeNumber);
  c_ingest->add_option("--column", ingest.column, "degrees column");
  c_ingest->add_option("--lat-column", ingest.lat_column, "latitude column");
  c_ingest->add_option("--lon-column", ingest.lon_column, "longitude column");
  c_ingest->add_option("--date-column", ingest.date_column, "date column (YYYY-MM-DD)");
  c_ingest->add_option("--value-column", ingest.value_column, "keep dates whose value exceeds --min-value");
  c_ingest->add_option("--min-value", ingest.min_value, "threshold for --value-column");
  c_ingest->add_option("--day-position", ingest.day_position, "midpoint, start or end of the day")
      ->check(CLI::IsMember({"midpoint", "start", "end"}));

  MiseArgs mise;
  auto* c_mise = app.add_subcommand("mise", "Monte Carlo mean integrated squared error");
  add_dist_options(c_mise, mise.dist, "--true");
  c_mise->add_option("--s", mise.s_values, "smoothness values, e.g. 0.5,1,2");
  c_mise->add_option("--n", mise.n, "sample size")->check(CLI::PositiveNumber);
  c_mise->add_option("--reps", mise.reps, "replications")->check(CLI::PositiveNumber);
  c_mise->add_option("--seed", mise.seed, "random seed");
  c_mise->add_option("--r", mise.r, "symbol exponent");
  c_mise->add_option("--out", mise.out, "output JSON (default: stdout)");

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "closed form versus quadrature timings");
  c_bench->add_option("--n", bench.sizes, "sizes as lo:hi:step or a list");
  c_bench->add_option("--s", bench.s, "smoothness")->check(CLI::PositiveNumber);
  c_bench->add_option("--r", bench.r, "symbol exponent");
  c_bench->add_option("--reps", bench.reps, "timed runs per size")->check(CLI::PositiveNumber);
  c_bench->add_option("--seed", bench.seed, "random seed");
  c_bench->add_option("--out", bench.out, "output JSON (default: stdout)");

  TableArgs table;
  auto* c_table = app.add_subcommand("table", "probability table for a simulation preset");
  c_table->add_option("--preset", table.preset, "study design")
      ->required()
      ->check(CLI::IsMember(study_preset_names()));
  c_table->add_option("--s", table.s_values, "smoothness values");
  c_table->add_option("--n", table.n, "sample size")->check(CLI::PositiveNumber);
  c_table->add_option("--seed", table.seed, "random seed");
  c_table->add_option("--r", table.r, "symbol exponent");
  c_table->add_option("--out", table.out, "output JSON (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    set_thread_count(static_cast<unsigned>(threads));
    if (c_sample->parsed()) return cmd_sample(sample);
    if (c_eval->parsed()) return cmd_eval(eval);
    if (c_prob->parsed()) return cmd_prob(prob, out);
    if (c_ingest->parsed()) return cmd_ingest(ingest, err);
    if (c_mise->parsed()) return cmd_mise(mise, out);
    if (c_bench->parsed()) return cmd_bench(bench, out);
    if (c_table->parsed()) return cmd_table(table, out);
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUnexpected;
  }
  return kUsage;
}

}  // namespace spherekde::cli
