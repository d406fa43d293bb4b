#pragma once

#include <stdexcept>
#include <string>

namespace sfcapm {

// Invalid parameter or mathematical domain failure (nonpositive consumption,
// divergent price series, non-PSD covariance). Surfaces as CLI exit code 3.
class domain_error : public std::runtime_error {
 public:
  explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input data (missing columns, unparsable fields, ragged rows).
// Surfaces as CLI exit code 2.
class data_error : public std::runtime_error {
 public:
  explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

// Iterative computation that failed to converge. Surfaces as CLI exit code 3.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sfcapm
