#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace spikewave {

/// Invalid parameters or violated preconditions. Messages name the
/// offending field.
class validation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure: under-resolved grids, degenerate kernels,
/// non-admissible wavelets.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File-system failure; the message carries the path.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& message) {
  if (!ok) throw validation_error(message);
}

inline void require_finite(double value, const std::string& field) {
  if (!std::isfinite(value)) throw validation_error(field + " must be finite");
}

inline void require_positive(double value, const std::string& field) {
  if (!(value > 0.0)) throw validation_error(field + " must be positive");
}

}  // namespace detail
}  // namespace spikewave
