#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "spherekde/kde.hpp"

namespace spherekde {

/// A parsed CSV file: leading '#' lines, one header row and data rows.
struct CsvTable {
  std::vector<std::string> comments;  // without the leading '#'
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row

  /// Index of a header column, or -1.
  int column(const std::string& name) const;
};

/// Throws DataError naming the file and line on malformed input.
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text, const std::string& source = "<memory>");

/// Parses a full field as a finite double; throws DataError with the line.
double parse_field(const std::string& field, const std::string& source, std::size_t line);

/// Shortest form that round-trips: 17 significant digits.
std::string format_double(double v);

/// Writes via a temporary file and a rename, so a failed run leaves no
/// partial output behind.
void write_file_atomic(const std::string& path, const std::string& contents);

/// Sample files. S1: column theta_rad. S2: columns x1,x2,x3 (theta_rad and
/// phi_rad are written for convenience and ignored on read).
std::string sample_to_csv(const SampleS1& sample, const std::vector<std::string>& comments = {});
std::string sample_to_csv(const SampleS2& sample, const std::vector<std::string>& comments = {});
SampleS1 read_sample_s1(const std::string& path);
SampleS2 read_sample_s2(const std::string& path);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

/// Provenance record written next to every output.
class RunManifest {
 public:
  explicit RunManifest(std::string command);

  void set_parameter(const std::string& key, nlohmann::json value);
  void add_seed(std::uint64_t seed);
  void add_input(const std::string& path);
  void finish();

  nlohmann::json to_json() const;

 private:
  std::string command_;
  nlohmann::json parameters_ = nlohmann::json::object();
  std::vector<std::uint64_t> seeds_;
  nlohmann::json inputs_ = nlohmann::json::array();
  std::string started_;
  std::string finished_;
};

/// UTC timestamp in ISO 8601 form.
std::string utc_timestamp(std::chrono::system_clock::time_point t = std::chrono::system_clock::now());

}  // namespace spherekde
