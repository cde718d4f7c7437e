#pragma once

#include <cmath>
#include <string>
#include <variant>

#include "wrec/error.hpp"
#include "wrec/rng.hpp"
#include "wrec/special.hpp"

namespace wrec {

class ChiSquare {
 public:
  explicit ChiSquare(int df) : df_(df) {
    if (df < 1) throw domain_error("chi-square degrees of freedom must be >= 1, got " + std::to_string(df));
  }
  int df() const noexcept { return df_; }

 private:
  int df_;
};

class FisherF {
 public:
  FisherF(int df1, int df2) : df1_(df1), df2_(df2) {
    if (df1 < 1 || df2 < 1) throw domain_error("F degrees of freedom must be >= 1");
  }
  int df1() const noexcept { return df1_; }
  int df2() const noexcept { return df2_; }

 private:
  int df1_;
  int df2_;
};

class Exponential {
 public:
  explicit Exponential(double rate) : rate_(rate) { detail::require_positive(rate, "exponential rate"); }
  double rate() const noexcept { return rate_; }

 private:
  double rate_;
};

/// Weibull with cdf 1 - exp(-(x/scale)^shape).
class Weibull {
 public:
  Weibull(double scale, double shape) : scale_(scale), shape_(shape) {
    detail::require_positive(scale, "Weibull scale");
    detail::require_positive(shape, "Weibull shape");
  }
  double scale() const noexcept { return scale_; }
  double shape() const noexcept { return shape_; }

 private:
  double scale_;
  double shape_;
};

class Gamma {
 public:
  Gamma(double shape, double scale) : shape_(shape), scale_(scale) {
    detail::require_positive(shape, "gamma shape");
    detail::require_positive(scale, "gamma scale");
  }
  double shape() const noexcept { return shape_; }
  double scale() const noexcept { return scale_; }

 private:
  double shape_;
  double scale_;
};

using DistSpec = std::variant<ChiSquare, FisherF, Exponential, Weibull, Gamma>;

// ---- Gamma (and chi-square as Gamma(df/2, 2)) ----

inline double cdf(const Gamma& d, double x) { return special::gamma_p(d.shape(), x / d.scale()); }
inline double survival(const Gamma& d, double x) { return special::gamma_q(d.shape(), x / d.scale()); }
inline double pdf(const Gamma& d, double x) {
  if (x <= 0.0) return (x == 0.0 && d.shape() == 1.0) ? 1.0 / d.scale() : 0.0;
  const double z = x / d.scale();
  return std::exp((d.shape() - 1.0) * std::log(z) - z - std::lgamma(d.shape())) / d.scale();
}
inline double quantile(const Gamma& d, double p) {
  detail::require_probability(p, "probability");
  const double mean = d.shape() * d.scale();
  return special::invert_cdf([&](double x) { return cdf(d, x); }, [&](double x) { return pdf(d, x); }, p, mean);
}
inline double sample(const Gamma& d, RngStream& rng) { return d.scale() * rng.gamma(d.shape()); }

inline Gamma as_gamma(const ChiSquare& d) { return Gamma(0.5 * d.df(), 2.0); }
inline double cdf(const ChiSquare& d, double x) { return cdf(as_gamma(d), x); }
inline double survival(const ChiSquare& d, double x) { return survival(as_gamma(d), x); }
inline double pdf(const ChiSquare& d, double x) { return pdf(as_gamma(d), x); }
inline double quantile(const ChiSquare& d, double p) { return quantile(as_gamma(d), p); }
inline double sample(const ChiSquare& d, RngStream& rng) { return rng.chi_square(d.df()); }

// ---- F ----

inline double cdf(const FisherF& d, double x) {
  if (x <= 0.0) return 0.0;
  const double a = 0.5 * d.df1(), b = 0.5 * d.df2();
  const double num = d.df1() * x;
  return special::beta_inc(a, b, num / (num + d.df2()));
}
inline double survival(const FisherF& d, double x) {
  if (x <= 0.0) return 1.0;
  const double a = 0.5 * d.df1(), b = 0.5 * d.df2();
  return special::beta_inc(b, a, d.df2() / (d.df1() * x + d.df2()));
}
inline double pdf(const FisherF& d, double x) {
  if (x <= 0.0) return 0.0;
  const double a = 0.5 * d.df1(), b = 0.5 * d.df2();
  const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double log_ratio = std::log(static_cast<double>(d.df1()) / d.df2());
  return std::exp(a * log_ratio + (a - 1.0) * std::log(x) - (a + b) * std::log1p(d.df1() * x / d.df2()) - lbeta);
}
inline double quantile(const FisherF& d, double p) {
  detail::require_probability(p, "probability");
  return special::invert_cdf([&](double x) { return cdf(d, x); }, [&](double x) { return pdf(d, x); }, p, 1.0);
}
inline double sample(const FisherF& d, RngStream& rng) {
  const double num = rng.chi_square(d.df1()) / d.df1();
  return num / (rng.chi_square(d.df2()) / d.df2());
}

// ---- Exponential ----

inline double cdf(const Exponential& d, double x) { return x <= 0.0 ? 0.0 : -std::expm1(-d.rate() * x); }
inline double survival(const Exponential& d, double x) { return x <= 0.0 ? 1.0 : std::exp(-d.rate() * x); }
inline double pdf(const Exponential& d, double x) { return x < 0.0 ? 0.0 : d.rate() * std::exp(-d.rate() * x); }
inline double quantile(const Exponential& d, double p) {
  detail::require_probability(p, "probability");
  return -std::log1p(-p) / d.rate();
}
inline double sample(const Exponential& d, RngStream& rng) { return rng.exponential() / d.rate(); }

// ---- Weibull ----

inline double cdf(const Weibull& d, double x) {
  return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x / d.scale(), d.shape()));
}
inline double survival(const Weibull& d, double x) {
  return x <= 0.0 ? 1.0 : std::exp(-std::pow(x / d.scale(), d.shape()));
}
inline double log_pdf(const Weibull& d, double x) {
  const double z = x / d.scale();
  return std::log(d.shape() / d.scale()) + (d.shape() - 1.0) * std::log(z) - std::pow(z, d.shape());
}
inline double pdf(const Weibull& d, double x) { return x <= 0.0 ? 0.0 : std::exp(log_pdf(d, x)); }
inline double quantile(const Weibull& d, double p) {
  detail::require_probability(p, "probability");
  return d.scale() * std::pow(-std::log1p(-p), 1.0 / d.shape());
}
/// Inverse-cdf sampling: one uniform per draw.
inline double sample(const Weibull& d, RngStream& rng) {
  return d.scale() * std::pow(rng.exponential(), 1.0 / d.shape());
}

// ---- variant dispatch ----

inline double cdf(const DistSpec& d, double x) {
  return std::visit([x](const auto& dist) { return cdf(dist, x); }, d);
}
inline double survival(const DistSpec& d, double x) {
  return std::visit([x](const auto& dist) { return survival(dist, x); }, d);
}
inline double pdf(const DistSpec& d, double x) {
  return std::visit([x](const auto& dist) { return pdf(dist, x); }, d);
}
inline double quantile(const DistSpec& d, double p) {
  return std::visit([p](const auto& dist) { return quantile(dist, p); }, d);
}
inline double sample(const DistSpec& d, RngStream& rng) {
  return std::visit([&rng](const auto& dist) { return sample(dist, rng); }, d);
}

/// Shorthand for the chi-square percentile used throughout the inference code.
inline double chi2_quantile(int df, double p) { return quantile(ChiSquare(df), p); }

}  // namespace wrec
