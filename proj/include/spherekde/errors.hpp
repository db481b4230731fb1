#pragma once

#include <stdexcept>
#include <string>

namespace spherekde {

// Invalid arguments are reported with std::invalid_argument. The two types
// below cover the remaining failure classes surfaced by the command line.

/// Malformed or unusable input data (unparsable rows, empty samples).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical routine could not deliver a finite result.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spherekde
