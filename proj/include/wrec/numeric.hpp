#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "wrec/error.hpp"

namespace wrec {

/**
 * Percentile of an ascending-sorted sample by linear interpolation between
 * adjacent order statistics (h = (N - 1) p, the "type 7" rule).
 *
 * This single convention is shared by W* tables and generalized pivotal
 * draw sets.
 */
inline double percentile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw domain_error("percentile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw domain_error("percentile probability must lie in [0, 1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto k = static_cast<std::size_t>(std::floor(h));
  if (k + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(k);
  return sorted[k] + frac * (sorted[k + 1] - sorted[k]);
}

/// Bisection on log(x) for an increasing function; returns x with f(x) ~= target.
/// The bracket [lo, hi] must satisfy f(lo) <= target <= f(hi).
template <class F>
double bisect_log(F&& f, double target, double lo, double hi, double log_tol = 1e-13, int max_iter = 400) {
  double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < max_iter && b - a > log_tol; ++i) {
    const double mid = 0.5 * (a + b);
    if (f(std::exp(mid)) < target) a = mid; else b = mid;
  }
  return std::exp(0.5 * (a + b));
}

struct QuadratureResult {
  double value = 0.0;
  long evaluations = 0;
};

namespace detail {

template <class F>
struct SimpsonState {
  F& f;
  long evaluations = 0;
  long max_evaluations;
  bool exhausted = false;

  double eval(double x) {
    ++evaluations;
    return f(x);
  }

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = eval(lm), frm = eval(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (evaluations >= max_evaluations || depth <= 0) {
      exhausted = exhausted || std::fabs(delta) > 15.0 * tol;
      return left + right + delta / 15.0;
    }
    if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
  }
};

}  // namespace detail

/// Adaptive Simpson quadrature with Richardson correction.
/// Throws integration_error if the evaluation cap is hit before convergence.
template <class F>
QuadratureResult integrate_adaptive_simpson(F&& f, double a, double b, double abs_tol, long max_evaluations = 2'000'000) {
  if (!(abs_tol > 0.0)) throw domain_error("quadrature tolerance must be positive");
  if (a == b) return {0.0, 0};
  detail::SimpsonState<F> st{f, 0, max_evaluations};
  const double fa = st.eval(a), fb = st.eval(b), fm = st.eval(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double value = st.recurse(a, b, fa, fm, fb, whole, abs_tol, 60);
  if (st.exhausted) throw integration_error("adaptive Simpson did not converge within the evaluation cap");
  return {value, st.evaluations};
}

/**
 * Run body(i) for i in [0, count) on `threads` workers.
 *
 * Work is handed out in index order but results must be written by index;
 * callers that do this get output independent of the thread count. The first
 * exception thrown by any body is rethrown on the calling thread.
 */
template <class Body>
void parallel_for(std::size_t count, int threads, Body&& body) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  const auto workers = static_cast<std::size_t>(std::min<std::size_t>(threads, count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= count) return;
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(count);
            return;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace wrec
