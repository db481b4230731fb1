#include "spherekde/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

#include "spherekde/errors.hpp"

namespace spherekde {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line, const std::string& source,
                                      std::size_t line_no) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) throw DataError(source + ":" + std::to_string(line_no) + ": unterminated quote");
  out.push_back(trim(field));
  return out;
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

CsvTable parse_csv(const std::string& text, const std::string& source) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);  // UTF-8 BOM
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      if (!have_header) table.comments.push_back(trim(t.substr(1)));
      continue;
    }
    auto fields = split_fields(line, source, line_no);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw DataError(source + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(table.header.size()) + " fields, found " +
                      std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(line_no);
  }
  if (!have_header) throw DataError(source + ": no header row");
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path);
}

double parse_field(const std::string& field, const std::string& source, std::size_t line) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw DataError(source + ":" + std::to_string(line) + ": not a finite number: '" + field + "'");
  }
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw DataError("failed writing '" + tmp.string() + "'");
    }
  }
  std::filesystem::rename(tmp, target);
}

std::string sample_to_csv(const SampleS1& sample, const std::vector<std::string>& comments) {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  out += "theta_rad\n";
  for (const CirclePoint& p : sample.points) out += format_double(p.theta()) + "\n";
  return out;
}

std::string sample_to_csv(const SampleS2& sample, const std::vector<std::string>& comments) {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  out += "x1,x2,x3,theta_rad,phi_rad\n";
  for (const SpherePoint& p : sample.points) {
    out += format_double(p.x1()) + "," + format_double(p.x2()) + "," + format_double(p.x3()) + "," +
           format_double(p.theta()) + "," + format_double(p.phi()) + "\n";
  }
  return out;
}

SampleS1 read_sample_s1(const std::string& path) {
  const CsvTable t = read_csv(path);
  const int col = t.column("theta_rad");
  if (col < 0) throw DataError(path + ": missing column 'theta_rad'");
  SampleS1 sample;
  sample.meta.source = path;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double theta = parse_field(t.rows[i][col], path, t.line_numbers[i]);
    sample.points.push_back(point_from_angle(theta));
  }
  if (sample.points.empty()) throw DataError(path + ": no observations");
  return sample;
}

SampleS2 read_sample_s2(const std::string& path) {
  const CsvTable t = read_csv(path);
  const int c1 = t.column("x1");
  const int c2 = t.column("x2");
  const int c3 = t.column("x3");
  if (c1 < 0 || c2 < 0 || c3 < 0) throw DataError(path + ": missing columns x1,x2,x3");
  SampleS2 sample;
  sample.meta.source = path;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::size_t line = t.line_numbers[i];
    const double x1 = parse_field(t.rows[i][c1], path, line);
    const double x2 = parse_field(t.rows[i][c2], path, line);
    const double x3 = parse_field(t.rows[i][c3], path, line);
    try {
      sample.points.push_back(SpherePoint::from_cartesian(x1, x2, x3));
    } catch (const std::invalid_argument& e) {
      throw DataError(path + ":" + std::to_string(line) + ": " + e.what());
    }
  }
  if (sample.points.empty()) throw DataError(path + ": no observations");
  return sample;
}

// ---------------------------------------------------------------------------

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) {
    out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return out.str();
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest::RunManifest(std::string command) : command_(std::move(command)), started_(utc_timestamp()) {}

void RunManifest::set_parameter(const std::string& key, nlohmann::json value) {
  parameters_[key] = std::move(value);
}

void RunManifest::add_seed(std::uint64_t seed) { seeds_.push_back(seed); }

void RunManifest::add_input(const std::string& path) {
  inputs_.push_back({{"path", path}, {"sha256", sha256_file(path)}});
}

void RunManifest::finish() { finished_ = utc_timestamp(); }

nlohmann::json RunManifest::to_json() const {
  return {{"command", command_},
          {"parameters", parameters_},
          {"seeds", seeds_},
          {"inputs", inputs_},
          {"version", SPHEREKDE_VERSION},
          {"started_at", started_},
          {"finished_at", finished_}};
}

}  // namespace spherekde
