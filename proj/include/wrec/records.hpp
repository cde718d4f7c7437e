#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "wrec/distributions.hpp"
#include "wrec/error.hpp"
#include "wrec/rng.hpp"

namespace wrec {

/**
 * The first n+1 upper record values r_0 < r_1 < ... < r_n of a positive
 * sequence. Construction enforces n >= 1, finiteness, positivity and strict
 * increase; instances are immutable afterwards.
 */
class RecordSample {
 public:
  explicit RecordSample(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_) {
      if (!std::isfinite(v)) throw domain_error("record values must be finite");
      if (!(v > 0.0)) throw domain_error("record values must be positive for Weibull inference");
    }
    for (std::size_t i = 1; i < values_.size(); ++i) {
      if (!(values_[i] > values_[i - 1])) {
        throw domain_error("record values must be strictly increasing (position " + std::to_string(i) + ")");
      }
    }
    if (values_.size() < 2) throw insufficient_records("at least two records (n >= 1) are required");
  }

  std::span<const double> values() const noexcept { return values_; }
  /// Index of the last record; the sample holds n() + 1 values.
  int n() const noexcept { return static_cast<int>(values_.size()) - 1; }
  double last() const noexcept { return values_.back(); }
  double operator[](std::size_t i) const { return values_.at(i); }

  RecordSample scaled(double c) const {
    detail::require_positive(c, "scale factor");
    std::vector<double> out(values_);
    for (double& v : out) v *= c;
    return RecordSample(std::move(out));
  }

  friend bool operator==(const RecordSample&, const RecordSample&) = default;

 private:
  std::vector<double> values_;
};

struct SufficientStats {
  double last = 0.0;           ///< r_n
  double log_ratio_sum = 0.0;  ///< S = sum_i log(r_n / r_i)
  double log_sum = 0.0;        ///< sum_i log(r_i)
};

inline SufficientStats sufficient_stats(const RecordSample& s) {
  SufficientStats st;
  st.last = s.last();
  for (double r : s.values()) {
    st.log_ratio_sum += std::log(st.last / r);
    st.log_sum += std::log(r);
  }
  return st;
}

/// S = sum_i log(r_n / r_i); also the C_r constant of the generalized pivotal.
inline double log_ratio_sum(const RecordSample& s) { return sufficient_stats(s).log_ratio_sum; }

/// 64-bit FNV-1a over the IEEE-754 bit patterns of the record values.
inline std::uint64_t sample_digest(const RecordSample& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : s.values()) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    for (int k = 0; k < 8; ++k) {
      h ^= (bits >> (8 * k)) & 0xFFu;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

/// Running strict maxima of `raw`, starting at raw[0]. Ties are not records.
inline RecordSample extract_records(std::span<const double> raw) {
  if (raw.empty()) throw insufficient_records("empty input sequence");
  std::vector<double> records;
  for (double x : raw) {
    if (!std::isfinite(x)) throw domain_error("input contains a non-finite value");
    if (!(x > 0.0)) throw domain_error("input contains a nonpositive value; Weibull records must be positive");
    if (records.empty() || x > records.back()) records.push_back(x);
  }
  if (records.size() < 2) throw insufficient_records("fewer than two records in the input sequence");
  return RecordSample(std::move(records));
}

struct MleEstimate {
  double beta_hat = 0.0;
  double alpha_hat = 0.0;
};

inline MleEstimate mle(const RecordSample& s) {
  const double S = log_ratio_sum(s);
  if (!(S > 0.0)) throw numeric_error("log-ratio sum is not positive");
  const double k = s.n() + 1.0;
  const double beta_hat = k / S;
  return {beta_hat, s.last() * std::pow(k, -1.0 / beta_hat)};
}

/// Log of the Weibull record likelihood:
/// (n+1) log b - b (n+1) log a - (r_n/a)^b + (b-1) sum log r_i.
inline double log_joint_density(const RecordSample& s, double alpha, double beta) {
  detail::require_positive(alpha, "alpha");
  detail::require_positive(beta, "beta");
  const auto st = sufficient_stats(s);
  const double k = s.n() + 1.0;
  return k * std::log(beta) - beta * k * std::log(alpha) - std::pow(st.last / alpha, beta) + (beta - 1.0) * st.log_sum;
}

/**
 * Record likelihood for an arbitrary continuous parent:
 * log f(r_n) + sum_{i<n} [log f(r_i) - log(1 - F(r_i))].
 *
 * `log_pdf` and `log_survival` are callables of one double.
 */
template <class LogPdf, class LogSurvival>
double log_record_density(const RecordSample& s, LogPdf&& log_pdf, LogSurvival&& log_survival) {
  const auto v = s.values();
  double total = log_pdf(v.back());
  for (std::size_t i = 0; i + 1 < v.size(); ++i) total += log_pdf(v[i]) - log_survival(v[i]);
  return total;
}

/// U = 2 beta S, chi-square with 2n degrees of freedom at the true beta.
inline double pivotal_u(const RecordSample& s, double beta) {
  detail::require_positive(beta, "beta");
  return 2.0 * beta * log_ratio_sum(s);
}

/// V = 2 (r_n / alpha)^beta, chi-square with 2n+2 degrees of freedom at the true parameters.
inline double pivotal_v(const RecordSample& s, double alpha, double beta) {
  detail::require_positive(alpha, "alpha");
  detail::require_positive(beta, "beta");
  return 2.0 * std::pow(s.last() / alpha, beta);
}

/// Records via R_i = alpha * T_i^(1/beta), T_i cumulative sums of unit exponentials.
/// Consumes exactly n+1 exponential draws.
inline RecordSample simulate_records_direct(double alpha, double beta, int n, RngStream& rng) {
  detail::require_positive(alpha, "alpha");
  detail::require_positive(beta, "beta");
  if (n < 1) throw insufficient_records("n must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  double t = 0.0;
  for (double& r : out) {
    t += rng.exponential();
    r = alpha * std::pow(t, 1.0 / beta);
  }
  return RecordSample(std::move(out));
}

inline constexpr std::uint64_t kDefaultNaiveMaxDraws = 1'000'000;

/**
 * Brute-force record simulator: stream iid Weibull draws and keep running
 * strict maxima until n+1 records exist.
 *
 * The waiting time for the n-th record grows roughly like e^n, so n beyond
 * about 12 routinely exhausts the default budget; that raises budget_exceeded.
 */
inline RecordSample simulate_records_naive(double alpha, double beta, int n, RngStream& rng,
                                           std::uint64_t max_draws = kDefaultNaiveMaxDraws) {
  if (n < 1) throw insufficient_records("n must be >= 1");
  if (max_draws == 0) throw domain_error("max_draws must be positive");
  const Weibull parent(alpha, beta);
  std::vector<double> records;
  records.reserve(static_cast<std::size_t>(n) + 1);
  for (std::uint64_t i = 0; i < max_draws; ++i) {
    const double x = sample(parent, rng);
    if (records.empty() || x > records.back()) {
      records.push_back(x);
      if (records.size() == static_cast<std::size_t>(n) + 1) return RecordSample(std::move(records));
    }
  }
  throw budget_exceeded("naive record simulation used " + std::to_string(max_draws) + " draws and found only " +
                        std::to_string(records.size()) + " records");
}

}  // namespace wrec
