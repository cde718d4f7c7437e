// Distribution layer: cdf/quantile/sample against closed forms and quadrature oracles.

#include <cmath>
#include <vector>

#include "catch_amalgamated.hpp"
#include "oracles.hpp"
#include "wrec/distributions.hpp"

using namespace wrec;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<DistSpec> spec_zoo() {
  return {ChiSquare(1),   ChiSquare(2),    ChiSquare(6),      ChiSquare(8),   ChiSquare(60),
          FisherF(6, 2),  FisherF(2, 6),   FisherF(6, 6),     FisherF(20, 8), FisherF(1, 1),
          Exponential(1), Exponential(3.5), Weibull(1.0, 1.0), Weibull(2.0, 0.5), Weibull(41.0, 5.0),
          Gamma(0.5, 3.0), Gamma(3.0, 2.0), Gamma(40.0, 0.1)};
}

}  // namespace

TEST_CASE("cdf examples", "[dist]") {
  const double one_minus_inv_e = 1.0 - std::exp(-1.0);
  CHECK_THAT(cdf(Weibull(1.0, 1.0), 1.0), WithinAbs(one_minus_inv_e, 1e-15));
  CHECK_THAT(cdf(ChiSquare(2), 2.0), WithinAbs(one_minus_inv_e, 1e-14));
  // Oracle: Simpson integration of the chi2(6) density gives 0.97500008.
  const double oracle = oracle::chi2_cdf_quadrature(6, 14.4494);
  CHECK_THAT(oracle, WithinAbs(0.975, 1e-6));
  CHECK_THAT(cdf(ChiSquare(6), 14.4494), WithinAbs(oracle, 1e-10));
}

TEST_CASE("cdf is zero on the nonpositive axis", "[dist]") {
  for (const auto& d : spec_zoo()) {
    CHECK(cdf(d, 0.0) == 0.0);
    CHECK(cdf(d, -3.0) == 0.0);
  }
}

TEST_CASE("quantile examples", "[dist]") {
  CHECK_THAT(quantile(ChiSquare(2), 1.0 - std::exp(-1.0)), WithinAbs(2.0, 1e-10));
  CHECK_THAT(quantile(ChiSquare(2), 0.632121), WithinAbs(-2.0 * std::log(1.0 - 0.632121), 1e-9));
  const double oracle = oracle::invert_bisect([](double x) { return oracle::chi2_cdf_even(6, x); }, 0.975, 0.0, 100.0);
  CHECK_THAT(oracle, WithinAbs(14.4494, 1e-3));
  CHECK_THAT(quantile(ChiSquare(6), 0.975), WithinAbs(oracle, 1e-9));
  CHECK_THAT(quantile(FisherF(6, 6), 0.5), WithinAbs(1.0, 1e-12));
}

TEST_CASE("even chi-square cdf matches the closed form", "[dist][oracle]") {
  for (int df : {2, 4, 6, 8, 20, 60}) {
    for (double x = 0.05; x < 150.0; x *= 1.3) {
      CHECK_THAT(cdf(ChiSquare(df), x), WithinAbs(oracle::chi2_cdf_even(df, x), 1e-13));
    }
  }
}

TEST_CASE("F cdf matches closed form and quadrature", "[dist][oracle]") {
  for (int b : {2, 4, 6, 8}) {
    for (double x = 0.01; x < 500.0; x *= 1.5) CHECK_THAT(cdf(FisherF(2, b), x), WithinAbs(oracle::f2_cdf(b, x), 1e-13));
  }
  for (auto [d1, d2] : {std::pair{6, 2}, {4, 4}, {8, 6}}) {
    for (double x : {0.1, 0.5, 1.0, 3.0}) {
      const double q = oracle::simpson([=](double t) { return oracle::f_density(d1, d2, t); }, 0.0, x);
      CHECK_THAT(cdf(FisherF(d1, d2), x), WithinAbs(q, 1e-8));
    }
  }
}

TEST_CASE("survival complements cdf", "[dist]") {
  for (const auto& d : spec_zoo()) {
    for (double p : {0.001, 0.3, 0.9, 0.999}) {
      const double x = quantile(d, p);
      CHECK_THAT(cdf(d, x) + survival(d, x), WithinAbs(1.0, 1e-12));
    }
  }
}

TEST_CASE("quantile round trip", "[dist][property]") {
  for (const auto& d : spec_zoo()) {
    for (double p : {0.01, 0.025, 0.0126603, 0.5, 0.975, 0.9873397, 0.99}) {
      INFO("index " << d.index() << " p " << p);
      CHECK(std::fabs(cdf(d, quantile(d, p)) - p) < 1e-9);
    }
  }
}

TEST_CASE("quantile strictly increasing on a fine grid", "[dist][property]") {
  for (const auto& d : spec_zoo()) {
    double prev = quantile(d, 0.0005);
    for (int i = 2; i <= 1000; ++i) {
      const double q = quantile(d, (i - 0.5) / 1000.0);
      REQUIRE(q > prev);
      prev = q;
    }
  }
}

TEST_CASE("parameter-domain errors", "[dist][errors]") {
  CHECK_THROWS_AS(ChiSquare(0), wrec::domain_error);
  CHECK_THROWS_AS(FisherF(3, 0), wrec::domain_error);
  CHECK_THROWS_AS(Exponential(-1.0), wrec::domain_error);
  CHECK_THROWS_AS(Weibull(1.0, 0.0), wrec::domain_error);
  CHECK_THROWS_AS(Gamma(std::nan(""), 1.0), wrec::domain_error);
  CHECK_THROWS_AS(quantile(ChiSquare(3), 0.0), wrec::domain_error);
  CHECK_THROWS_AS(quantile(ChiSquare(3), 1.0), wrec::domain_error);
  CHECK_THROWS_AS(quantile(Weibull(1.0, 2.0), 1.5), wrec::domain_error);
}

TEST_CASE("sample means", "[dist][sampling]") {
  auto mean_of = [](const DistSpec& d, std::uint64_t seed) {
    RngStream rng(seed, 0);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) sum += sample(d, rng);
    return sum / 100000.0;
  };
  CHECK_THAT(mean_of(Exponential(1.0), 11), WithinAbs(1.0, 0.01));
  CHECK_THAT(mean_of(ChiSquare(6), 12), WithinAbs(6.0, 0.05));
  CHECK_THAT(mean_of(Weibull(2.0, 1.0), 13), WithinAbs(2.0, 0.02));
}

TEST_CASE("sampling passes KS in at least 95% of runs", "[dist][sampling][property]") {
  const std::vector<DistSpec> dists{ChiSquare(6), ChiSquare(1), FisherF(6, 2), Exponential(2.0), Weibull(2.0, 0.5),
                                    Gamma(0.3, 1.0)};
  const double crit = oracle::ks_critical_1pct(1e4);
  for (std::size_t k = 0; k < dists.size(); ++k) {
    const auto& d = dists[k];
    int passes = 0;
    const int runs = 40;
    for (int run = 0; run < runs; ++run) {
      RngStream rng(1000 + k, run);
      std::vector<double> xs(10000);
      for (double& x : xs) x = sample(d, rng);
      passes += oracle::ks_statistic(xs, [&](double x) { return cdf(d, x); }) < crit;
    }
    INFO("distribution index " << d.index());
    CHECK(passes >= 38);
  }
}

TEST_CASE("sampling is reproducible", "[dist][sampling]") {
  RngStream a(42, 7), b(42, 7), c(42, 8);
  std::vector<double> xa, xb, xc;
  for (int i = 0; i < 1000; ++i) {
    xa.push_back(sample(ChiSquare(6), a));
    xb.push_back(sample(ChiSquare(6), b));
    xc.push_back(sample(ChiSquare(6), c));
  }
  CHECK(xa == xb);
  CHECK(xa != xc);
}
