#pragma once

#include <stdexcept>
#include <string>

namespace adoptpath {

/// Raised when input data is malformed or degenerate (bad CSV, ragged
/// panels, negative values, ...).  The command line tool maps this to
/// exit code 1.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when a configuration value is out of range or a required
/// intermediate file is missing.  The command line tool maps this to
/// exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace adoptpath
