// Acceptance suite: one PASS/FAIL line per criterion, with the individual
// checks listed beneath it. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "wrec/wrec.hpp"

using namespace wrec;

namespace {

const RecordSample kSulfur({26, 27, 40, 41});

class Criterion {
 public:
  Criterion(int id, std::string title) : id_(id), title_(std::move(title)) {}

  void check(bool ok, const std::string& what) {
    ok_ = ok_ && ok;
    details_.push_back(std::string(ok ? "    ok    " : "    FAIL  ") + what);
  }
  void note(const std::string& what) { details_.push_back("    note  " + what); }

  bool report(double seconds) const {
    std::printf("[%s] criterion %d: %s (%.1f s)\n", ok_ ? "PASS" : "FAIL", id_, title_.c_str(), seconds);
    for (const auto& d : details_) std::printf("%s\n", d.c_str());
    std::fflush(stdout);
    return ok_;
  }

 private:
  int id_;
  std::string title_;
  bool ok_ = true;
  std::vector<std::string> details_;
};

std::string f(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

bool within_abs(double got, double want, double tol) { return std::fabs(got - want) <= tol; }
bool within_rel(double got, double want, double tol) { return std::fabs(got - want) <= tol * std::fabs(want); }

int threads() { return std::max(1u, std::thread::hardware_concurrency()); }

double chi2_even_quantile(int df, double p) {
  return oracle::invert_bisect([df](double x) { return oracle::chi2_cdf_even(df, x); }, p, 0.0, 1000.0);
}

void criterion1(Criterion& c) {
  const auto ci = exact_ci_shape(kSulfur, 0.95);
  c.check(within_abs(ci.lower, 0.6890, 0.002), "lower " + f(ci.lower, 6) + " vs 0.6890 +-0.002");
  c.check(within_abs(ci.upper, 8.0462, 0.002), "upper " + f(ci.upper, 6) + " vs 8.0462 +-0.002");
}

void criterion2(Criterion& c) {
  const auto table = wstar_table(3, wstar_probs_for(0.95), kDefaultWStarReps, 20140101, threads());
  const auto ci = wu_ci_shape(kSulfur, 0.95, table);
  c.note("W* table: " + std::to_string(table.reps) + " reps, seed " + std::to_string(table.seed));
  c.check(within_abs(ci.lower, 0.6352, 0.05), "lower " + f(ci.lower, 6) + " vs 0.6352 +-0.05");
  c.check(within_abs(ci.upper, 7.7423, 0.05), "upper " + f(ci.upper, 6) + " vs 7.7423 +-0.05");
}

void criterion3(Criterion& c) {
  const int seeds = 20;
  const std::size_t M = 10000;
  double lower = 0.0, upper = 0.0;
  double lo_min = 1e300, lo_max = 0.0, hi_min = 1e300, hi_max = 0.0;
  int p_ok = 0;
  double p_min = 1.0, p_max = 0.0;
  for (int k = 0; k < seeds; ++k) {
    const auto draws = draw_pivotal_t(kSulfur, M, RngStream(20140101 + k, 0), threads());
    const auto ci = generalized_ci_scale(draws, 0.95);
    lower += ci.lower / seeds;
    upper += ci.upper / seeds;
    lo_min = std::min(lo_min, ci.lower);
    lo_max = std::max(lo_max, ci.lower);
    hi_min = std::min(hi_min, ci.upper);
    hi_max = std::max(hi_max, ci.upper);
    const double p = gpv_scale(draws, 5.0, Alternative::OneSidedUpper).p_value;
    p_ok += within_abs(p, 0.0227, 0.006);
    p_min = std::min(p_min, p);
    p_max = std::max(p_max, p);
  }
  c.note("M = 10000, " + std::to_string(seeds) + " seeds; per-seed lower in [" + f(lo_min) + ", " + f(lo_max) +
         "], upper in [" + f(hi_min) + ", " + f(hi_max) + "]");
  c.check(within_rel(lower, 5.4869, 0.05), "mean lower " + f(lower) + " vs 5.4869 +-5%");
  c.check(within_rel(upper, 39.9734, 0.05), "mean upper " + f(upper) + " vs 39.9734 +-5%");
  c.check(p_ok == seeds, "p-value at alpha0 = 5 within 0.0227 +-0.006 for " + std::to_string(p_ok) + "/" +
                             std::to_string(seeds) + " seeds (range " + f(p_min) + " to " + f(p_max) + ")");
}

void criterion4(Criterion& c) {
  struct Ref {
    RegionMethod method;
    double beta_lower, beta_upper, area;
  };
  const std::vector<Ref> refs{{RegionMethod::aj(1), 0.5826, 11.9955, 194.9723},
                              {RegionMethod::aj(2), 0.1646, 6.4905, 166.7113},
                              {RegionMethod::aj(3), 0.1720, 58.9824, 369.7654},
                              {RegionMethod::b(), 0.5305, 9.0277, 172.5757}};
  for (const auto& r : refs) {
    const auto region = make_region(kSulfur, r.method, 0.95);
    const auto label = r.method.label();
    c.check(within_rel(region.beta_lower(), r.beta_lower, 0.005),
            label + " beta lower " + f(region.beta_lower(), 6) + " vs " + f(r.beta_lower) + " +-0.5%");
    c.check(within_rel(region.beta_upper(), r.beta_upper, 0.005),
            label + " beta upper " + f(region.beta_upper(), 6) + " vs " + f(r.beta_upper) + " +-0.5%");
    const auto a = area(region, 1e-8);
    c.check(within_abs(a.value, r.area, 0.1),
            label + " area " + f(a.value) + " vs " + f(r.area) + " +-0.1 (difference " + f(a.value - r.area) + ")");
  }
  const auto b = region_b(kSulfur, 0.95);
  c.check(within_abs(b.m_lo(), 0.1029, 0.001), "alpha-band multiplier " + f(b.m_lo(), 6) + " vs 0.1029 +-0.001");
  c.check(within_abs(b.m_hi(), 1.1318, 0.001), "alpha-band multiplier " + f(b.m_hi(), 6) + " vs 1.1318 +-0.001");
}

void criterion5(Criterion& c) {
  auto cfg = default_config(Table::Two);
  cfg.alphas = {1.0};
  cfg.betas = {0.5, 1.0, 5.0};
  cfg.ns = {3, 7, 14};
  cfg.reps = 2000;
  cfg.parallelism = threads();
  const auto report = run_table2(cfg);
  for (int n : cfg.ns) {
    const double q_span = chi2_even_quantile(2 * n, 0.975) - chi2_even_quantile(2 * n, 0.025);
    for (double beta : cfg.betas) {
      const auto& e = *report.find(1.0, beta, n, "E");
      const auto& w = *report.find(1.0, beta, n, "W");
      const std::string cell = "(beta=" + f(beta, 1) + ", n=" + std::to_string(n) + ")";
      c.check(within_abs(e.coverage, 0.95, 0.015), cell + " E coverage " + f(e.coverage, 4));
      c.check(within_abs(w.coverage, 0.95, 0.015), cell + " W coverage " + f(w.coverage, 4));
      const double oracle = beta * q_span / (2 * n - 2);
      c.check(within_abs(e.expected_length_or_area, oracle, 3 * e.expected_length_or_area_se),
              cell + " E length " + f(e.expected_length_or_area) + " vs analytic " + f(oracle) + " +-3 SE (" +
                  f(3 * e.expected_length_or_area_se) + ")");
      c.check(e.expected_length_or_area < w.expected_length_or_area,
              cell + " E length " + f(e.expected_length_or_area) + " < W length " + f(w.expected_length_or_area));
    }
  }
}

void criterion6(Criterion& c) {
  auto cfg = default_config(Table::One);
  cfg.alphas = {1.0, 2.0};
  cfg.betas = {1.0};
  cfg.ns = {3, 7};
  cfg.reps = 2000;
  cfg.M = 10000;
  cfg.parallelism = threads();
  const auto report = run_table1(cfg);
  const std::map<std::pair<double, int>, double> ref{
      {{1.0, 3}, 3.581}, {{1.0, 7}, 3.198}, {{2.0, 3}, 7.187}, {{2.0, 7}, 6.344}};
  for (const auto& [key, length] : ref) {
    const auto& cell = *report.find(key.first, 1.0, key.second, "GP");
    const std::string name = "(alpha=" + f(key.first, 0) + ", n=" + std::to_string(key.second) + ")";
    c.check(within_abs(cell.coverage, 0.95, 0.015), name + " coverage " + f(cell.coverage));
    c.check(within_rel(cell.expected_length_or_area, length, 0.05),
            name + " length " + f(cell.expected_length_or_area) + " (SE " + f(cell.expected_length_or_area_se) +
                ") vs " + f(length, 3) + " +-5%");
  }
}

void criterion7(Criterion& c) {
  auto cfg = default_config(Table::Three);
  cfg.alphas = {1.0};
  cfg.betas = {0.5, 1.0, 5.0};
  cfg.ns = {4, 14};
  cfg.reps = 2000;
  cfg.parallelism = threads();
  const auto report = run_table3(cfg);
  const std::map<std::pair<int, std::string>, std::vector<double>> ref{
      {{4, "A1"}, {27.787, 8.548, 5.203}},  {{4, "A2"}, {30.020, 8.976, 5.504}},
      {{4, "B"}, {22.985, 7.371, 4.713}},   {{14, "A3"}, {9.436, 2.702, 1.661}},
      {{14, "A4"}, {9.388, 2.686, 1.668}},  {{14, "B"}, {5.784, 1.999, 1.385}}};
  for (int n : cfg.ns) {
    const auto js = default_aj_indices(n);
    for (std::size_t k = 0; k < cfg.betas.size(); ++k) {
      const double beta = cfg.betas[k];
      const std::string cellname = "(beta=" + f(beta, 1) + ", n=" + std::to_string(n) + ")";
      const auto& b = *report.find(1.0, beta, n, "B");
      for (const std::string& m : {"A" + std::to_string(js[0]), "A" + std::to_string(js[1]), std::string("B")}) {
        const auto& cell = *report.find(1.0, beta, n, m);
        const double want = ref.at({n, m})[k];
        c.check(within_abs(cell.coverage, 0.95, 0.015), cellname + " " + m + " coverage " + f(cell.coverage));
        c.check(within_rel(cell.expected_length_or_area, want, 0.05),
                cellname + " " + m + " area " + f(cell.expected_length_or_area, 3) + " (SE " +
                    f(cell.expected_length_or_area_se, 3) + ") vs " + f(want, 3) + " +-5%");
        if (m != "B") {
          c.check(b.expected_length_or_area < cell.expected_length_or_area,
                  cellname + " B area " + f(b.expected_length_or_area, 3) + " < " + m + " area " +
                      f(cell.expected_length_or_area, 3));
        }
      }
    }
  }
}

void criterion8(Criterion& c) {
  const int reps = 10000;
  const double crit = oracle::ks_critical_1pct(reps);

  {
    const int n = 5;
    std::vector<double> us, vs;
    for (int r = 0; r < reps; ++r) {
      RngStream rng(88, static_cast<std::uint64_t>(r));
      const auto s = simulate_records_direct(2.0, 1.7, n, rng);
      us.push_back(pivotal_u(s, 1.7));
      vs.push_back(pivotal_v(s, 2.0, 1.7));
    }
    const double du = oracle::ks_statistic(us, [&](double x) { return oracle::chi2_cdf_even(2 * n, x); });
    const double dv = oracle::ks_statistic(vs, [&](double x) { return oracle::chi2_cdf_even(2 * n + 2, x); });
    const double rho = oracle::pearson(us, vs);
    c.check(du < crit, "U ~ chi2(10): KS D = " + f(du) + " < " + f(crit));
    c.check(dv < crit, "V ~ chi2(12): KS D = " + f(dv) + " < " + f(crit));
    c.check(std::fabs(rho) < 0.03, "|corr(U, V)| = " + f(std::fabs(rho)) + " < 0.03");
  }
  {
    std::vector<double> naive, direct;
    for (int r = 0; r < reps; ++r) {
      RngStream a(89, static_cast<std::uint64_t>(r)), b(90, static_cast<std::uint64_t>(r));
      naive.push_back(simulate_records_naive(1.5, 0.8, 2, a, 100'000'000).last());
      direct.push_back(simulate_records_direct(1.5, 0.8, 2, b).last());
    }
    const double d = oracle::ks_two_sample(naive, direct);
    const double crit2 = oracle::ks_critical_1pct(oracle::two_sample_n_eff(reps, reps));
    c.check(d < crit2, "naive vs direct R_n two-sample KS D = " + f(d) + " < " + f(crit2));
  }
  {
    const std::vector<DistSpec> zoo{ChiSquare(1),  ChiSquare(6),   ChiSquare(60),  FisherF(6, 2),
                                    FisherF(2, 8), FisherF(20, 30), Exponential(2), Weibull(41, 5),
                                    Gamma(0.3, 1)};
    double worst = 0.0;
    for (const auto& d : zoo) {
      for (int i = 1; i < 1000; ++i) {
        const double p = i / 1000.0;
        worst = std::max(worst, std::fabs(cdf(d, quantile(d, p)) - p));
      }
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", worst);
    c.check(worst < 1e-9, std::string("quantile round trip worst error ") + buf + " < 1e-9");
  }
  {
    bool exact = true;
    for (std::uint64_t r = 0; r < 200 && exact; ++r) {
      RngStream a(91, r), b(91, r);
      const auto s = simulate_records_direct(1.0, 1.3, 6, a);
      const auto t = simulate_records_direct(4.0, 1.3, 6, b);
      for (int i = 0; i <= 6; ++i) exact = exact && t[i] == 4.0 * s[i];
      exact = exact && mle(t).beta_hat == mle(s).beta_hat;
      exact = exact && exact_ci_shape(t, 0.95).lower == exact_ci_shape(s, 0.95).lower;
      exact = exact && region_b(t, 0.95).beta_upper() == region_b(s, 0.95).beta_upper();
    }
    const auto ci = generalized_ci_scale(draw_pivotal_t(kSulfur, 10000, RngStream(92, 0)), 0.95);
    const auto ci4 = generalized_ci_scale(draw_pivotal_t(kSulfur.scaled(4.0), 10000, RngStream(92, 0)), 0.95);
    exact = exact && ci4.lower == 4.0 * ci.lower && ci4.upper == 4.0 * ci.upper;
    c.check(exact, "scale equivariance exact for records, MLE shape, shape intervals, region bounds, alpha interval");
  }
  {
    int violations = 0;
    for (std::uint64_t r = 0; r < 500; ++r) {
      RngStream rng(93, r);
      const auto s = simulate_records_direct(1.0, 2.0, 1 + static_cast<int>(r % 14), rng);
      const auto ci = exact_ci_shape(s, 0.95);
      for (double t : {0.2, 0.999, 1.001, 1.5, 5.0}) {
        const double b0 = ci.lower * t;
        const bool inside = ci.lower < b0 && b0 < ci.upper;
        violations += inside == exact_test_shape(s, b0, 0.95, Alternative::TwoSided).reject;
      }
    }
    c.check(violations == 0, "exact CI / two-sided test duality violations: " + std::to_string(violations));
  }
  {
    const auto a = draw_pivotal_t(kSulfur, 20000, RngStream(94, 1), 1);
    const auto b = draw_pivotal_t(kSulfur, 20000, RngStream(94, 1), 4);
    bool same = std::equal(a.draws().begin(), a.draws().end(), b.draws().begin());
    same = same && wstar_table(5, {0.025, 0.975}, 20000, 95, 1).percentiles ==
                       wstar_table(5, {0.025, 0.975}, 20000, 95, 4).percentiles;
    auto cfg = default_config(Table::Three);
    cfg.betas = {1.0};
    cfg.ns = {4};
    cfg.reps = 300;
    auto par = cfg;
    par.parallelism = 4;
    same = same && run_table3(cfg) == run_table3(par);
    c.check(same, "bitwise identical results with 1 and 4 threads (pivotal draws, W* table, simulation)");
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Criterion&)>>> criteria{
      {"exact CI for beta on the sulfur dioxide records", criterion1},
      {"Wu-Tseng CI for beta on the sulfur dioxide records", criterion2},
      {"generalized CI and p-value for alpha on the sulfur dioxide records", criterion3},
      {"joint regions A1, A2, A3, B on the sulfur dioxide records", criterion4},
      {"shape interval simulation (E and W)", criterion5},
      {"generalized scale interval simulation", criterion6},
      {"joint region simulation", criterion7},
      {"property suite", criterion8},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Criterion c(static_cast<int>(i + 1), criteria[i].first);
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !c.report(secs);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
