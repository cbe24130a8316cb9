#pragma once

#include <cstdint>

#include "flashmmi/stats.hpp"

namespace flashmmi {

/// Frame length of the rate-0.9021 BCH baseline with k = 8256.
inline constexpr int kBchLength = 9152;
inline constexpr int kBchCorrectable = 64;

/// P(Binomial(n, p) > t): a bounded-distance decoder fails when more than t
/// of the n bits are in error.
double bch_fer_analytic(int n, int t, double p);

struct FerEstimate {
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  double fer = 0.0;
  Interval ci;
};

/// Monte Carlo estimate of the same tail by drawing error counts per frame.
FerEstimate bch_fer_mc(int n, int t, double p, std::uint64_t trials, std::uint64_t seed);

}  // namespace flashmmi
