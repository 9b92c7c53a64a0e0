#pragma once

#include <stdexcept>
#include <string>

namespace specwalk {

/// Bad arguments or an unusable configuration. CLI exit code 1.
class usage_error : public std::runtime_error {
 public:
  explicit usage_error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent input data / artifacts. CLI exit code 2.
class data_error : public std::runtime_error {
 public:
  explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure (divergence, non-convergence). CLI exit code 3.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace specwalk
