#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "flashmmi/channel.hpp"

namespace flashmmi {

enum class Strategy { Hard, SymmetricQ, SingleQ, ConstantRatio, Unconstrained, Uniform };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

struct QuantizationScheme {
  std::vector<double> thresholds;
  Strategy strategy = Strategy::Hard;
  double achieved_mi = 0.0;
  /// Erasure half-width for SymmetricQ / SingleQ.
  double q = std::numeric_limits<double>::quiet_NaN();
  /// Ratio for ConstantRatio.
  double ratio = std::numeric_limits<double>::quiet_NaN();
  /// Coarse-grid spacing for Unconstrained; no global optimality is claimed
  /// beyond this resolution.
  double grid_step = std::numeric_limits<double>::quiet_NaN();
};

inline constexpr double kGoldenTolerance = 1e-10;

/// Maximizer of a quasi-concave f on [lo, hi].
double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                          double tol = kGoldenTolerance);

/// MI of the channel quantized at the given thresholds. Thresholds are sorted
/// and exact duplicates merged (a zero-width region carries no mass).
double quantized_mi(const ChannelModel& model, std::span<const double> thresholds);

QuantizationScheme hard_scheme(const ChannelModel& model);

/// Symmetric SLC, 2 reads {-q,q} or 3 reads {-q,0,q}: bisection on dI/dq.
QuantizationScheme optimize_symmetric_q(const ChannelModel& model, int reads);

/// hard_thresholds +- q, merged when q = 0.
std::vector<double> single_q_thresholds(const ChannelModel& model, double q);

/// Golden-section search of q over [0, min inter-mean gap / 2].
QuantizationScheme optimize_single_q_mlc(const ChannelModel& model);

/// Flanking thresholds where the two dominant prior-weighted densities have
/// ratio R around each hard threshold. R = 1 gives the hard thresholds.
std::vector<double> thresholds_from_ratio(const ChannelModel& model, double ratio);

/// Grid scan over R, then golden-section refinement around the best grid point.
QuantizationScheme optimize_constant_ratio(const ChannelModel& model,
                                           std::span<const double> r_grid);

/// Default R grid 1..31 step 0.5.
std::vector<double> default_ratio_grid();

/// Coarse brute-force grid followed by coordinate-wise golden-section
/// refinement. grid_step <= 0 selects 21 points across the inter-mean span.
QuantizationScheme optimize_unconstrained(const ChannelModel& model, int num_thresholds,
                                          double grid_step = 0.0);

/// Evenly spaced thresholds over the mean span widened by 4 spreads each side;
/// with many thresholds this stands in for full-precision reads.
std::vector<double> uniform_thresholds(const ChannelModel& model, int num_thresholds);

/// MI of the unquantized channel by quadrature.
double continuous_mi(const ChannelModel& model);

}  // namespace flashmmi
