#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <tuple>
#include <vector>

#include "wrec/error.hpp"
#include "wrec/numeric.hpp"
#include "wrec/records.hpp"
#include "wrec/report.hpp"
#include "wrec/rng.hpp"
#include "wrec/shape.hpp"

namespace wrec {

inline constexpr std::size_t kMinPivotalDraws = 1000;
inline constexpr std::size_t kDefaultPivotalDraws = 10'000;

/**
 * Monte Carlo realizations T_1..T_M of the generalized pivotal for alpha.
 *
 * Draws are kept in generation order (draw l at index l) for export; a sorted
 * copy backs the percentile queries.
 */
class PivotalDrawSet {
 public:
  PivotalDrawSet(std::vector<double> draws, std::uint64_t seed, std::uint64_t stream, std::uint64_t sample_digest)
      : draws_(std::move(draws)), sorted_(draws_), seed_(seed), stream_(stream), digest_(sample_digest) {
    if (draws_.size() < kMinPivotalDraws) throw domain_error("a pivotal draw set needs at least 1000 draws");
    for (double t : draws_) {
      if (!(t > 0.0) || !std::isfinite(t)) throw numeric_error("pivotal draw is not positive and finite");
    }
    std::sort(sorted_.begin(), sorted_.end());
  }

  std::span<const double> draws() const noexcept { return draws_; }
  std::span<const double> sorted() const noexcept { return sorted_; }
  std::size_t size() const noexcept { return draws_.size(); }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }
  std::uint64_t sample_digest() const noexcept { return digest_; }

 private:
  std::vector<double> draws_;
  std::vector<double> sorted_;
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t digest_;
};

/// One realization r_n (2/V)^(2 C_r / U), evaluated in log space and
/// saturated to the positive finite doubles (extreme only when U is near 0).
inline double pivotal_t_value(double last, double c_r, double u, double v) {
  const double exponent = (2.0 * c_r / u) * std::log(2.0 / v);
  const double log_last = std::log(last);
  constexpr double kLogMax = 709.0;
  constexpr double kLogMin = -708.0;
  return last * std::exp(std::clamp(exponent, kLogMin - log_last, kLogMax - log_last));
}

/**
 * Algorithm: for l = 1..M draw U ~ chi2(2n), V ~ chi2(2n+2) independently and
 * set T_l = r_n (2/V)^(2 C_r / U) with C_r = sum log(r_n / r_i).
 *
 * Draw l consumes the child stream rng.split(l), so the result is identical
 * for any `parallelism` and depends on the sample only through (r_n, C_r, n).
 */
inline PivotalDrawSet draw_pivotal_t(const RecordSample& s, std::size_t M, const RngStream& rng, int parallelism = 1) {
  if (M < kMinPivotalDraws) throw domain_error("M must be at least 1000");
  const double last = s.last();
  const double c_r = log_ratio_sum(s);
  const double df_u = 2.0 * s.n();
  const double df_v = 2.0 * s.n() + 2.0;
  std::vector<double> draws(M);
  parallel_for(M, parallelism, [&](std::size_t l) {
    RngStream child = rng.split(l);
    const double u = child.chi_square(df_u);
    const double v = child.chi_square(df_v);
    draws[l] = pivotal_t_value(last, c_r, u, v);
  });
  return PivotalDrawSet(std::move(draws), rng.master_seed(), rng.stream_index(), sample_digest(s));
}

/// [T_(gamma/2), T_(1-gamma/2)] from the empirical percentiles of the draws.
inline ConfidenceInterval generalized_ci_scale(const PivotalDrawSet& draws, double level) {
  detail::require_probability(level, "confidence level");
  const double half_gamma = 0.5 * (1.0 - level);
  if (static_cast<double>(draws.size()) * half_gamma < 1.0) {
    throw resolution_error("M * gamma/2 < 1: too few draws for the requested tail");
  }
  return {percentile_sorted(draws.sorted(), half_gamma), percentile_sorted(draws.sorted(), 1.0 - half_gamma), level,
          IntervalMethod::GeneralizedPivotal};
}

struct GpvResult {
  double p_value = 0.0;
  double alpha0 = 0.0;
  Alternative hypotheses = Alternative::OneSidedUpper;
  std::size_t M = 0;
  double mc_se = 0.0;
};

/// Generalized p-value. One-sided (H1: alpha > alpha0): p = P(T < alpha0).
/// Two-sided: p = 2 min(P(T > alpha0), P(T < alpha0)), clipped to 1.
inline GpvResult gpv_scale(const PivotalDrawSet& draws, double alpha0, Alternative kind) {
  detail::require_positive(alpha0, "alpha0");
  const auto sorted = draws.sorted();
  const auto below = std::lower_bound(sorted.begin(), sorted.end(), alpha0) - sorted.begin();
  const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), alpha0);
  const double m = static_cast<double>(sorted.size());
  const double p_below = static_cast<double>(below) / m;
  const double p_above = static_cast<double>(above) / m;
  GpvResult out;
  out.alpha0 = alpha0;
  out.hypotheses = kind;
  out.M = sorted.size();
  out.p_value = kind == Alternative::OneSidedUpper ? p_below : std::min(1.0, 2.0 * std::min(p_below, p_above));
  out.mc_se = std::sqrt(out.p_value * (1.0 - out.p_value) / m);
  return out;
}

/// Draw sets keyed by (sample digest, M, seed, stream); several alpha0 values or
/// levels can then share one set of draws.
class DrawSetCache {
 public:
  std::shared_ptr<const PivotalDrawSet> get(const RecordSample& s, std::size_t M, const RngStream& rng,
                                            int parallelism = 1) {
    const Key key{sample_digest(s), M, rng.master_seed(), rng.stream_index()};
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    auto made = std::make_shared<const PivotalDrawSet>(draw_pivotal_t(s, M, rng, parallelism));
    std::lock_guard lock(mutex_);
    return cache_.try_emplace(key, std::move(made)).first->second;
  }
  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
  }

 private:
  using Key = std::tuple<std::uint64_t, std::size_t, std::uint64_t, std::uint64_t>;
  mutable std::mutex mutex_;
  std::map<Key, std::shared_ptr<const PivotalDrawSet>> cache_;
};

/// CSV with a `draw` header and one draw per line, in generation order.
inline void write_draws_csv(std::ostream& out, const PivotalDrawSet& draws) {
  out << "draw\n";
  out << std::setprecision(17);
  for (double t : draws.draws()) out << t << '\n';
}

inline constexpr double kDefaultDrawBudget = 4e9;

struct GpvSizeConfig {
  double alpha = 1.0;
  double beta = 1.0;
  int n = 7;
  double alpha0 = 1.0;
  double level = 0.95;
  Alternative kind = Alternative::OneSidedUpper;
  std::uint64_t reps = 2000;
  std::size_t M = kDefaultPivotalDraws;
  std::uint64_t seed = 1;
  int parallelism = 1;
  double budget = kDefaultDrawBudget;  ///< ceiling on reps * M
};

/**
 * Empirical rejection rate of the generalized test at nominal 1 - level.
 * With alpha == alpha0 this is the size; otherwise a power point.
 * Replication r uses stream (derive_seed(seed, 0x475056), r).
 */
inline SimulationReport gpv_test_properties(const GpvSizeConfig& cfg) {
  if (cfg.reps == 0) throw config_error("reps must be positive");
  if (cfg.M < kMinPivotalDraws) throw config_error("M must be at least 1000");
  if (static_cast<double>(cfg.reps) * static_cast<double>(cfg.M) > cfg.budget) {
    throw config_error("reps * M exceeds the configured draw budget");
  }
  detail::require_probability(cfg.level, "level");
  const std::uint64_t cell_seed = derive_seed(cfg.seed, 0x475056);
  std::vector<char> rejected(cfg.reps);
  parallel_for(cfg.reps, cfg.parallelism, [&](std::size_t r) {
    RngStream rng(cell_seed, r);
    const auto sample = simulate_records_direct(cfg.alpha, cfg.beta, cfg.n, rng);
    const auto draws = draw_pivotal_t(sample, cfg.M, rng);
    rejected[r] = gpv_scale(draws, cfg.alpha0, cfg.kind).p_value < 1.0 - cfg.level;
  });
  MeanAccumulator rate;
  for (char x : rejected) rate.add(x ? 1.0 : 0.0);
  SimulationCell cell{cfg.alpha, cfg.beta, cfg.n, "GPV-rejection", rate.mean(), rate.standard_error(), 0.0, 0.0,
                      cfg.reps};
  return {"gpv-size", cfg.seed, {cell}};
}

}  // namespace wrec
