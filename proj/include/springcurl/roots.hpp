#pragma once

#include <cmath>
#include <optional>
#include <utility>

#include "springcurl/error.hpp"

namespace springcurl::roots {

struct BisectOptions {
  double tolerance = 1e-9;
  int max_iterations = 200;
};

/// Bisection on [lo, hi] where f(lo) and f(hi) have opposite signs (or one is zero).
/// Stops once the bracket is narrower than the tolerance.
template <class F>
double bisect(F&& f, double lo, double hi, BisectOptions opts = {}) {
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  require(std::signbit(f_lo) != std::signbit(f_hi), ErrorCode::NoSolution,
          "bisection bracket does not straddle a root");
  for (int i = 0; i < opts.max_iterations && (hi - lo) > opts.tolerance; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if (std::signbit(f_mid) == std::signbit(f_lo)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Grows [lo, lo + step] to the right (doubling the step) until f changes sign.
template <class F>
std::optional<std::pair<double, double>> expand_right(F&& f, double lo, double step,
                                                      int max_doublings = 60) {
  const bool sign_lo = std::signbit(f(lo));
  double hi = lo + step;
  for (int i = 0; i < max_doublings; ++i) {
    const double f_hi = f(hi);
    if (f_hi == 0.0 || std::signbit(f_hi) != sign_lo) return std::make_pair(lo, hi);
    lo = hi;
    step *= 2.0;
    hi = lo + step;
  }
  return std::nullopt;
}

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
template <class F>
double golden_maximize(F&& f, double lo, double hi, double tolerance, int max_iterations = 400) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iterations && (b - a) > tolerance; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

}  // namespace springcurl::roots
