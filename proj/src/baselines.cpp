#include "flashmmi/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace flashmmi {

double bch_fer_analytic(int n, int t, double p) {
  if (n < 1 || t < 0) throw std::invalid_argument("bch_fer_analytic: need n >= 1, t >= 0");
  if (!(p >= 0.0 && p <= 0.5)) throw std::invalid_argument("bch_fer_analytic: p must be in [0, 1/2]");
  if (t >= n || p == 0.0) return 0.0;
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  const double lgn = std::lgamma(n + 1.0);
  std::vector<double> terms;
  terms.reserve(n - t);
  double peak = -std::numeric_limits<double>::infinity();
  for (int j = t + 1; j <= n; ++j) {
    const double lt = lgn - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) + j * lp + (n - j) * lq;
    terms.push_back(lt);
    peak = std::max(peak, lt);
  }
  double sum = 0.0;
  for (double lt : terms) sum += std::exp(lt - peak);
  return std::min(1.0, std::exp(peak + std::log(sum)));
}

FerEstimate bch_fer_mc(int n, int t, double p, std::uint64_t trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("bch_fer_mc: trials must be >= 1");
  if (n < 1 || t < 0 || !(p >= 0.0 && p <= 0.5))
    throw std::invalid_argument("bch_fer_mc: bad parameters");
  FerEstimate est;
  est.trials = trials;
  for (std::uint64_t i = 0; i < trials; ++i) {
    auto rng = stream_rng(seed, i);
    std::binomial_distribution<int> errors(n, p);
    if (errors(rng) > t) ++est.failures;
  }
  est.fer = static_cast<double>(est.failures) / trials;
  est.ci = wilson_interval(est.failures, trials);
  return est;
}

}  // namespace flashmmi
