#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wrec/distributions.hpp"
#include "wrec/error.hpp"
#include "wrec/numeric.hpp"
#include "wrec/records.hpp"
#include "wrec/rng.hpp"

namespace wrec {

enum class IntervalMethod { ExactChiSquare, WuTseng, GeneralizedPivotal };

inline const char* to_string(IntervalMethod m) {
  switch (m) {
    case IntervalMethod::ExactChiSquare: return "exact-chi-square";
    case IntervalMethod::WuTseng: return "wu-tseng";
    case IntervalMethod::GeneralizedPivotal: return "generalized-pivotal";
  }
  return "?";
}

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.0;
  IntervalMethod method = IntervalMethod::ExactChiSquare;

  double length() const noexcept { return upper - lower; }
  /// Open interval membership.
  bool contains(double x) const noexcept { return lower < x && x < upper; }
};

enum class Alternative { OneSidedUpper, TwoSided };

inline const char* to_string(Alternative a) { return a == Alternative::OneSidedUpper ? "one-sided" : "two-sided"; }

struct TestResult {
  double statistic = 0.0;
  std::optional<double> p_value;
  bool reject = false;
  double level = 0.0;
  Alternative hypotheses = Alternative::TwoSided;
};

// ---------------------------------------------------------------------------
// Exact chi-square method

inline ConfidenceInterval exact_ci_shape(const RecordSample& s, double level) {
  detail::require_probability(level, "confidence level");
  const double gamma = 1.0 - level;
  const double two_s = 2.0 * log_ratio_sum(s);
  const int df = 2 * s.n();
  return {chi2_quantile(df, 0.5 * gamma) / two_s, chi2_quantile(df, 1.0 - 0.5 * gamma) / two_s, level,
          IntervalMethod::ExactChiSquare};
}

/**
 * Test on the shape parameter with statistic U0 = 2 beta0 S.
 *
 * U0 = (beta0 / beta) U with U ~ chi2(2n), so evidence for H1: beta > beta0
 * is a small U0. One-sided: reject when U0 < chi2_(2n),gamma and
 * p = P(chi2 <= U0). Two-sided: reject outside
 * [chi2_gamma/2, chi2_1-gamma/2], p = 2 min(cdf, 1 - cdf).
 */
inline TestResult exact_test_shape(const RecordSample& s, double beta0, double level, Alternative kind) {
  detail::require_positive(beta0, "beta0");
  detail::require_probability(level, "level");
  const double gamma = 1.0 - level;
  const ChiSquare ref(2 * s.n());
  const double u0 = 2.0 * beta0 * log_ratio_sum(s);
  const double lower_tail = cdf(ref, u0);
  const double upper_tail = survival(ref, u0);
  TestResult out;
  out.statistic = u0;
  out.level = level;
  out.hypotheses = kind;
  if (kind == Alternative::OneSidedUpper) {
    out.p_value = lower_tail;
    out.reject = u0 < quantile(ref, gamma);
  } else {
    out.p_value = std::min(1.0, 2.0 * std::min(lower_tail, upper_tail));
    out.reject = u0 < quantile(ref, 0.5 * gamma) || u0 > quantile(ref, 1.0 - 0.5 * gamma);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Wu-Tseng pivotal W(beta)

namespace detail {

/// log W for centered logs d_i = log r_i - mean(log r): log-mean-exp(beta d_i).
inline double log_w_centered(std::span<const double> centered, double beta) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double d : centered) peak = std::max(peak, beta * d);
  double acc = 0.0;
  for (double d : centered) acc += std::exp(beta * d - peak);
  return std::max(0.0, peak + std::log(acc / static_cast<double>(centered.size())));
}

inline std::vector<double> centered_logs(std::span<const double> values) {
  std::vector<double> logs(values.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) mean += (logs[i] = std::log(values[i]));
  mean /= static_cast<double>(values.size());
  for (double& l : logs) l -= mean;
  return logs;
}

}  // namespace detail

/// W(beta) = sum r_i^beta / ((n+1) (prod r_i)^(beta/(n+1))), evaluated in log space.
/// Always >= 1 and strictly increasing in beta.
inline double w_statistic(const RecordSample& s, double beta) {
  detail::require_positive(beta, "beta");
  const double lw = detail::log_w_centered(detail::centered_logs(s.values()), beta);
  if (lw > 709.0) throw numeric_error("W(beta) overflows a double");
  return std::exp(lw);
}

/// Percentiles of W* = AM / GM of the first n+1 unit-exponential records.
struct WStarTable {
  int n = 0;
  std::map<double, double> percentiles;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;

  /// Percentile at `p`, matched to a stored probability within 1e-12.
  double at(double p) const {
    auto it = percentiles.lower_bound(p - 1e-12);
    if (it == percentiles.end() || std::fabs(it->first - p) > 1e-12) {
      throw domain_error("W* table has no percentile at probability " + std::to_string(p));
    }
    return it->second;
  }
};

inline constexpr std::uint64_t kDefaultWStarReps = 100'000;

/// W* of a single set of unit-exponential records.
inline double wstar_draw(int n, RngStream& rng) {
  double t = 0.0, sum = 0.0, log_sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    t += rng.exponential();
    sum += t;
    log_sum += std::log(t);
  }
  const double k = n + 1.0;
  return std::max(1.0, (sum / k) / std::exp(log_sum / k));
}

/// Monte Carlo W* percentiles. Replication r uses stream (seed, r).
inline WStarTable wstar_table(int n, const std::vector<double>& probs, std::uint64_t reps, std::uint64_t seed,
                              int parallelism = 1) {
  if (n < 1) throw insufficient_records("n must be >= 1");
  if (reps < 2) throw config_error("W* table needs at least two replications");
  std::vector<double> draws(reps);
  parallel_for(reps, parallelism, [&](std::size_t r) {
    RngStream rng(seed, r);
    draws[r] = wstar_draw(n, rng);
  });
  std::sort(draws.begin(), draws.end());
  WStarTable table{n, {}, reps, seed};
  for (double p : probs) table.percentiles[p] = percentile_sorted(draws, p);
  return table;
}

/// Probabilities a table needs for two-sided intervals at `level`.
inline std::vector<double> wstar_probs_for(double level) {
  const double g = 1.0 - level;
  return {0.5 * g, 1.0 - 0.5 * g};
}

inline ConfidenceInterval wu_ci_shape(const RecordSample& s, double level, const WStarTable& table) {
  detail::require_probability(level, "confidence level");
  if (table.n != s.n()) {
    throw domain_error("W* table built for n=" + std::to_string(table.n) + " but sample has n=" + std::to_string(s.n()));
  }
  const double gamma = 1.0 - level;
  const auto logs = detail::centered_logs(s.values());
  const auto log_w = [&](double b) { return detail::log_w_centered(logs, b); };
  const auto solve = [&](double w_target) {
    const double target = std::log(w_target);
    constexpr double kLow = 1e-6, kCap = 1e3;
    if (log_w(kLow) >= target) throw bracketing_error("W(beta) already exceeds the target at beta = 1e-6");
    double hi = 1.0;
    while (log_w(hi) < target) {
      if (hi >= kCap) throw bracketing_error("W(beta) did not reach the target below beta = 1000");
      hi = std::min(2.0 * hi, kCap);
    }
    return bisect_log(log_w, target, kLow, hi);
  };
  return {solve(table.at(0.5 * gamma)), solve(table.at(1.0 - 0.5 * gamma)), level, IntervalMethod::WuTseng};
}

// ---------------------------------------------------------------------------
// Versioned JSON cache for W* tables

inline constexpr int kWStarSchemaVersion = 1;

inline nlohmann::json to_json(const WStarTable& t) {
  nlohmann::json j;
  j["schema"] = "wrec.wstar_table";
  j["version"] = kWStarSchemaVersion;
  j["n"] = t.n;
  j["reps"] = t.reps;
  j["seed"] = t.seed;
  auto& probs = j["probs"] = nlohmann::json::array();
  auto& values = j["values"] = nlohmann::json::array();
  for (const auto& [p, v] : t.percentiles) {
    probs.push_back(p);
    values.push_back(v);
  }
  return j;
}

inline WStarTable wstar_table_from_json(const nlohmann::json& j) {
  if (j.value("schema", std::string{}) != "wrec.wstar_table") throw domain_error("not a W* table document");
  if (j.at("version").get<int>() != kWStarSchemaVersion) throw domain_error("unsupported W* table version");
  WStarTable t;
  t.n = j.at("n").get<int>();
  t.reps = j.at("reps").get<std::uint64_t>();
  t.seed = j.at("seed").get<std::uint64_t>();
  const auto& probs = j.at("probs");
  const auto& values = j.at("values");
  if (probs.size() != values.size()) throw domain_error("W* table probs/values length mismatch");
  for (std::size_t i = 0; i < probs.size(); ++i) t.percentiles[probs[i].get<double>()] = values[i].get<double>();
  return t;
}

inline void save_wstar_table(const WStarTable& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw error("cannot write " + path);
  out << to_json(t).dump(2) << '\n';
}

inline WStarTable load_wstar_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error("cannot read " + path);
  return wstar_table_from_json(nlohmann::json::parse(in));
}

}  // namespace wrec
