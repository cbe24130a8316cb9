#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace flashmmi {

/// Upper tail of the standard normal, Q(x) = P(Z > x), via erfc so tails
/// keep full relative precision.
inline double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

/// Standard normal cdf.
inline double phi_cdf(double x) { return q_function(-x); }

inline double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

/// Density of N(mean, sigma^2) at v.
inline double normal_pdf(double v, double mean, double sigma) {
  return std_normal_pdf((v - mean) / sigma) / sigma;
}

/// P(a < V < b) for V ~ N(mean, sigma^2). Picks the tail that avoids
/// subtracting two numbers close to one.
inline double normal_interval(double a, double b, double mean, double sigma) {
  if (!(a < b)) return 0.0;
  const double za = (a - mean) / sigma;
  const double zb = (b - mean) / sigma;
  if (za >= 0.0) return q_function(za) - q_function(zb);
  if (zb <= 0.0) return q_function(-zb) - q_function(-za);
  return 1.0 - q_function(-za) - q_function(zb);
}

/// Inverse of q_function on (0, 1).
inline double q_inverse(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("q_inverse: p must be in (0,1)");
  if (p > 0.5) return -q_inverse(1.0 - p);
  double lo = 0.0;
  double hi = 40.0;
  double x = std::sqrt(-2.0 * std::log(p));
  for (int it = 0; it < 200; ++it) {
    const double f = q_function(x) - p;
    if (f > 0.0) lo = x; else hi = x;
    const double step = f / std_normal_pdf(x);
    double next = x + step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * std::max(1.0, x)) return next;
    x = next;
  }
  return x;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace flashmmi
