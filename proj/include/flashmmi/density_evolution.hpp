#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "flashmmi/degree_distribution.hpp"
#include "flashmmi/mi.hpp"

namespace flashmmi {

struct DeConfig {
  double llr_range = 30.0;
  int num_bins = 4096;
  int max_de_iters = 2000;
  double target_error = 1e-10;
};

/// A point mass of the channel LLR density (all-zero codeword convention).
struct LlrMass {
  double llr = 0.0;
  double prob = 0.0;
};

struct DeRun {
  bool converged = false;
  int iterations = 0;
  double final_error = 1.0;
  /// Iterations where the message error probability went up.
  int monotonicity_violations = 0;
};

/// Discretized density evolution for one degree distribution.
///
/// Messages live on a uniform LLR grid of num_bins + 1 points over
/// [-llr_range, llr_range]. The variable-node update is an exact FFT
/// convolution followed by saturation at the grid ends. The check-node update
/// combines densities pairwise with a quantized box-plus table, working on
/// (|L|, sign) through the sum/difference densities A = p+ + p- and
/// B = p+ - p-, which transform multiplicatively under box-plus.
///
/// DE assumes a symmetric channel and the all-zero codeword. MLC bit channels
/// are symmetrized by averaging each bit's LLR density over both bit values
/// with the sign flipped for ones (the coset/channel-adapter argument).
class DensityEvolver {
 public:
  DensityEvolver(const DegreeDistribution& dd, const DeConfig& cfg = {});
  ~DensityEvolver();
  DensityEvolver(const DensityEvolver&) = delete;
  DensityEvolver& operator=(const DensityEvolver&) = delete;

  int half_bins() const { return half_; }
  double step() const { return step_; }

  /// Binned LLR density of BPSK +1 over AWGN with the given sigma.
  std::vector<double> awgn_pmf(double sigma) const;
  /// Point masses rounded to the nearest grid point, saturated at the ends.
  std::vector<double> masses_pmf(std::span<const LlrMass> masses) const;

  DeRun run(std::span<const double> channel_pmf) const;

  /// Single updates, exposed for tests.
  std::vector<double> check_update(std::span<const double> var_to_check) const;
  std::vector<double> variable_update(std::span<const double> channel,
                                      std::span<const double> check_to_var) const;

  /// P(L < 0) + P(L = 0) / 2.
  double error_probability(std::span<const double> pmf) const;

 private:
  struct Fft;

  void boxplus(std::span<const double> x, std::span<const double> y, std::span<double> out) const;
  void boxplus_square(std::span<const double> x, std::span<double> out) const;
  std::vector<double> check_power_mix(std::span<const double> mag) const;

  DegreeDistribution dd_;
  DeConfig cfg_;
  int half_;
  double step_;
  // Jagged box-plus table: for i <= j < sat_[i], out index table_[offset_[i] + j - i];
  // for j >= sat_[i] the output index is i.
  std::vector<int> sat_;
  std::vector<std::size_t> offset_;
  std::vector<int> table_;
  std::unique_ptr<Fft> fft_;
};

struct AwgnThreshold {
  double sigma = 0.0;
  /// 10 log10(1 / sigma^2), i.e. SNR = 2Es/N0 with Es = 1.
  double snr_db = 0.0;
};

struct BscThreshold {
  double epsilon = 0.0;
  /// SNR at which a hard read of BPSK has crossover epsilon.
  double snr_db = 0.0;
};

/// Called after each bisection probe with (parameter, run).
using DeProbeCallback = std::function<void(double, const DeRun&)>;

AwgnThreshold de_threshold_awgn(const DegreeDistribution& dd, const DeConfig& cfg = {},
                                const DeProbeCallback& on_probe = {});

BscThreshold de_threshold_bsc(const DegreeDistribution& dd, const DeConfig& cfg = {},
                              const DeProbeCallback& on_probe = {});

/// A channel family indexed by a scalar; larger parameter means a worse channel
/// on [lo, hi].
struct DmcFamily {
  std::function<Dmc(double)> channel;
  BitLabeling labeling;
  double lo = 0.0;
  double hi = 1.0;
};

struct DmcThreshold {
  double parameter = 0.0;
  /// False when the bracket ends disagree with monotone degradation.
  bool monotone = true;
};

DmcThreshold de_threshold_dmc(const DegreeDistribution& dd, const DmcFamily& family,
                              const DeConfig& cfg = {}, const DeProbeCallback& on_probe = {});

/// Symmetrized per-bit LLR masses of a quantized channel, averaged over bits.
std::vector<LlrMass> dmc_llr_masses(const Dmc& dmc, const BitLabeling& labeling);

}  // namespace flashmmi
