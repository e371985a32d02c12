#pragma once

#include <stdexcept>
#include <string>

namespace regimeshift {

/// Malformed or inconsistent input data (files, series, configuration).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure cannot produce a meaningful answer
/// (rank-deficient design, zero residual variance, non-PD covariance).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace regimeshift
