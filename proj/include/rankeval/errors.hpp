#pragma once

#include <stdexcept>
#include <string>

namespace rankeval {

// Bad configuration or malformed/inconsistent input records.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem / stream failures.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// A statistic cannot be computed from the given data (zero variance,
// empty group, flat histogram, ...).
class DegenerateStatistics : public std::runtime_error {
 public:
  explicit DegenerateStatistics(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace rankeval
