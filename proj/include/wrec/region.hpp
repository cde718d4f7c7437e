#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "wrec/distributions.hpp"
#include "wrec/error.hpp"
#include "wrec/numeric.hpp"
#include "wrec/records.hpp"

namespace wrec {

struct RegionMethod {
  enum class Kind { Aj, B };
  Kind kind = Kind::B;
  int j = 0;  ///< meaningful for Aj only

  static RegionMethod b() { return {Kind::B, 0}; }
  static RegionMethod aj(int j) { return {Kind::Aj, j}; }
  std::string label() const { return kind == Kind::B ? "B" : "A" + std::to_string(j); }
  friend bool operator==(const RegionMethod&, const RegionMethod&) = default;
};

/**
 * Joint region for (alpha, beta) of the form
 *   beta_lower < beta < beta_upper,
 *   r_n m_lo^(1/beta) < alpha < r_n m_hi^(1/beta).
 * Both region families share this shape; only the beta interval differs.
 */
class JointRegion {
 public:
  JointRegion(double beta_lower, double beta_upper, double m_lo, double m_hi, double last, double level,
              RegionMethod method)
      : beta_lower_(beta_lower), beta_upper_(beta_upper), m_lo_(m_lo), m_hi_(m_hi), last_(last), level_(level),
        method_(method) {
    if (!(beta_lower > 0.0 && beta_lower < beta_upper && std::isfinite(beta_upper))) {
      throw domain_error("joint region needs 0 < beta_lower < beta_upper < inf");
    }
    if (!(m_lo > 0.0 && m_lo <= m_hi && std::isfinite(m_hi))) throw domain_error("joint region needs 0 < m_lo <= m_hi");
    detail::require_positive(last, "r_n");
  }

  double beta_lower() const noexcept { return beta_lower_; }
  double beta_upper() const noexcept { return beta_upper_; }
  double m_lo() const noexcept { return m_lo_; }
  double m_hi() const noexcept { return m_hi_; }
  double last() const noexcept { return last_; }
  double level() const noexcept { return level_; }
  RegionMethod method() const noexcept { return method_; }

  double alpha_lower_at(double beta) const { return last_ * std::pow(m_lo_, 1.0 / beta); }
  double alpha_upper_at(double beta) const { return last_ * std::pow(m_hi_, 1.0 / beta); }

  /// Open-region membership; boundary points are excluded.
  bool contains(double alpha, double beta) const {
    if (!(beta_lower_ < beta && beta < beta_upper_)) return false;
    return alpha_lower_at(beta) < alpha && alpha < alpha_upper_at(beta);
  }

 private:
  double beta_lower_;
  double beta_upper_;
  double m_lo_;
  double m_hi_;
  double last_;
  double level_;
  RegionMethod method_;
};

inline bool contains(const JointRegion& region, double alpha, double beta) { return region.contains(alpha, beta); }

namespace detail {

// Each marginal constraint carries probability sqrt(level), split evenly in the tails.
inline std::pair<double, double> split_tail_levels(double level) {
  const double root = std::sqrt(level);
  return {0.5 * (1.0 - root), 0.5 * (1.0 + root)};
}

// Alpha-band multipliers 2 / chi2_(2n+2) at the upper and lower split levels.
inline std::pair<double, double> alpha_band_multipliers(int n, double level) {
  const auto [lo, hi] = split_tail_levels(level);
  const ChiSquare v(2 * n + 2);
  return {2.0 / quantile(v, hi), 2.0 / quantile(v, lo)};
}

}  // namespace detail

/// Exact region built from the independent pivotals U ~ chi2(2n) and V ~ chi2(2n+2).
inline JointRegion region_b(const RecordSample& s, double level) {
  detail::require_probability(level, "confidence level");
  const auto [lo, hi] = detail::split_tail_levels(level);
  const ChiSquare u(2 * s.n());
  const double two_s = 2.0 * log_ratio_sum(s);
  const auto [m_lo, m_hi] = detail::alpha_band_multipliers(s.n(), level);
  return JointRegion(quantile(u, lo) / two_s, quantile(u, hi) / two_s, m_lo, m_hi, s.last(), level,
                     RegionMethod::b());
}

/// Region A_j, 1 <= j <= n: beta bounds from F_(2n-2j+2, 2j) quantiles and
/// the single ratio r_n / r_(j-1).
inline JointRegion region_aj(const RecordSample& s, int j, double level) {
  detail::require_probability(level, "confidence level");
  const int n = s.n();
  if (j < 1 || j > n) throw domain_error("A_j needs 1 <= j <= n (n=" + std::to_string(n) + ", j=" + std::to_string(j) + ")");
  const auto [lo, hi] = detail::split_tail_levels(level);
  const FisherF f(2 * n - 2 * j + 2, 2 * j);
  const double k1 = quantile(f, lo);
  const double k2 = quantile(f, hi);
  const double ratio = static_cast<double>(n - j + 1) / j;
  const double log_span = std::log(s.last() / s[static_cast<std::size_t>(j - 1)]);
  const auto [m_lo, m_hi] = detail::alpha_band_multipliers(n, level);
  return JointRegion(std::log1p(ratio * k1) / log_span, std::log1p(ratio * k2) / log_span, m_lo, m_hi, s.last(),
                     level, RegionMethod::aj(j));
}

/// The two j values floor((n+1)/5) and floor((n+1)/5)+1, clamped to [1, n] and deduplicated.
inline std::vector<int> default_aj_indices(int n) {
  if (n < 1) throw insufficient_records("n must be >= 1");
  const int base = (n + 1) / 5;
  std::vector<int> out;
  for (int j : {base, base + 1}) {
    const int c = std::clamp(j, 1, n);
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  }
  return out;
}

inline JointRegion make_region(const RecordSample& s, RegionMethod method, double level) {
  return method.kind == RegionMethod::Kind::B ? region_b(s, level) : region_aj(s, method.j, level);
}

struct RegionArea {
  double value = 0.0;
  double abs_tolerance = 0.0;
  long evaluations = 0;
};

inline constexpr double kDefaultAreaTolerance = 1e-4;

/// Area = integral over the beta interval of r_n (m_hi^(1/b) - m_lo^(1/b)) db.
inline RegionArea area(const JointRegion& region, double abs_tolerance = kDefaultAreaTolerance) {
  detail::require_positive(abs_tolerance, "area tolerance");
  const double last = region.last();
  const double log_lo = std::log(region.m_lo());
  const double log_hi = std::log(region.m_hi());
  auto width = [&](double b) { return last * (std::exp(log_hi / b) - std::exp(log_lo / b)); };
  const auto q = integrate_adaptive_simpson(width, region.beta_lower(), region.beta_upper(), abs_tolerance);
  return {std::max(0.0, q.value), abs_tolerance, q.evaluations};
}

struct BoundaryPoint {
  double beta = 0.0;
  double alpha_lower = 0.0;
  double alpha_upper = 0.0;
};

/// Geometric beta grid across the region's beta interval, endpoints included exactly.
inline std::vector<BoundaryPoint> boundary_polyline(const JointRegion& region, int points) {
  if (points < 2) throw domain_error("a boundary polyline needs at least 2 points");
  std::vector<BoundaryPoint> out(static_cast<std::size_t>(points));
  const double log_lo = std::log(region.beta_lower());
  const double log_hi = std::log(region.beta_upper());
  for (int i = 0; i < points; ++i) {
    double b = std::exp(log_lo + (log_hi - log_lo) * i / (points - 1));
    if (i == 0) b = region.beta_lower();
    if (i == points - 1) b = region.beta_upper();
    out[static_cast<std::size_t>(i)] = {b, region.alpha_lower_at(b), region.alpha_upper_at(b)};
  }
  return out;
}

inline void write_boundary_csv(std::ostream& out, const std::vector<BoundaryPoint>& poly) {
  out << "beta,alpha_lower,alpha_upper\n" << std::setprecision(17);
  for (const auto& p : poly) out << p.beta << ',' << p.alpha_lower << ',' << p.alpha_upper << '\n';
}

}  // namespace wrec
