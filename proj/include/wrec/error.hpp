#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace wrec {

/// Base for every error raised by the library. The CLI maps these to exit code 1.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter or data value lies outside the domain of the operation.
class domain_error : public error {
 public:
  using error::error;
};

/// Fewer than two records (n < 1) were available.
class insufficient_records : public error {
 public:
  using error::error;
};

/// The naive record simulator ran out of its draw budget.
class budget_exceeded : public error {
 public:
  using error::error;
};

/// Overflow or a non-finite intermediate despite log-space evaluation.
class numeric_error : public error {
 public:
  using error::error;
};

/// A root could not be bracketed within the allowed search range.
class bracketing_error : public error {
 public:
  using error::error;
};

/// Too few Monte Carlo draws to resolve the requested tail percentile.
class resolution_error : public error {
 public:
  using error::error;
};

/// Adaptive quadrature did not converge within its evaluation cap.
class integration_error : public error {
 public:
  using error::error;
};

/// Invalid simulation or CLI configuration (detected before any work starts).
class config_error : public error {
 public:
  using error::error;
};

namespace detail {

inline void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw domain_error(std::string(what) + " must be positive and finite, got " + std::to_string(v));
  }
}

inline void require_probability(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) {
    throw domain_error(std::string(what) + " must lie in (0, 1), got " + std::to_string(p));
  }
}

}  // namespace detail
}  // namespace wrec
