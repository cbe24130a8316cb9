#include "flashmmi/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace flashmmi {

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  if (successes > trials) throw std::invalid_argument("wilson_interval: successes > trials");
  const double n = static_cast<double>(trials);
  const double p = successes / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
  // Clamp the rounding at the ends so the interval always contains p.
  return {successes == 0 ? 0.0 : std::min(p, centre - half),
          successes == trials ? 1.0 : std::max(p, centre + half)};
}

}  // namespace flashmmi
