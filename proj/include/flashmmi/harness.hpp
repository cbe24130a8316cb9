#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "flashmmi/channel.hpp"
#include "flashmmi/ldpc.hpp"
#include "flashmmi/quantopt.hpp"
#include "flashmmi/stats.hpp"

namespace flashmmi {

inline constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

/// Channel description as it appears in config files.
///   slc        Gaussian SLC at snr_db
///   mlc        Gaussian 4-level {-3,-1,1,3} at snr_db
///   surrogate  calibrated retention surrogate
///   gaussian   explicit levels (+ optional prior)
///   tabulated  density table from table_csv (columns: v, f_0, f_1, ...)
struct ChannelSpec {
  std::string type = "slc";
  double snr_db = kUnset;
  std::vector<GaussianLevel> levels;
  std::vector<double> prior;
  std::string table_csv;
};

/// Quantizer description. Explicit thresholds win; otherwise q / ratio are
/// used when set and optimized when not.
struct QuantSpec {
  Strategy strategy = Strategy::Hard;
  int reads = 1;
  double q = kUnset;
  double ratio = kUnset;
  std::vector<double> thresholds;
};

/// Either an alist file or a PEG/ACE construction.
struct CodeSpec {
  int dd = 2;
  int n = 9118;
  std::uint64_t seed = 7;
  std::string alist;
};

struct SimConfig {
  std::string label;
  ChannelSpec channel;
  QuantSpec quant;
  CodeSpec code;
  int max_iter = 50;
  std::uint64_t max_frames = 1'000'000;
  std::uint64_t target_frame_errors = 100;
  std::uint64_t seed = 1;
  int workers = 1;
  /// Wall-clock cap in seconds, 0 for none. A run stopped by the clock is
  /// still deterministic up to the frame count it reached.
  double max_seconds = 0.0;
};

struct SimResult {
  SimConfig config;
  std::vector<double> thresholds;
  double mi = 0.0;
  /// Analytic raw bit error probability of one hard read.
  double channel_ber = 0.0;
  std::uint64_t frames = 0;
  std::uint64_t frame_errors = 0;
  std::uint64_t bit_errors = 0;
  double fer = 0.0;
  double ber = 0.0;
  double mean_iterations = 0.0;
  Interval ci;
  std::string stop_reason;
  double wall_seconds = 0.0;
};

ChannelModel resolve_channel(const ChannelSpec& spec);
QuantizationScheme resolve_quantization(const ChannelModel& model, const QuantSpec& spec);
LdpcCode resolve_code(const CodeSpec& spec);

/// Monte Carlo FER of code over the quantized channel. Each frame encodes a
/// random message, writes it to cells (Gray-labelled, bit 0 first), draws
/// threshold voltages, quantizes and decodes.
SimResult run_fer(const LdpcCode& code, const ChannelModel& model,
                  const std::vector<double>& thresholds, const SimConfig& cfg);

/// Resolves channel, quantizer and code from the config, then runs.
SimResult run_fer(const SimConfig& cfg);

struct SweepOutput {
  std::string csv_path;
  /// Progress manifest; points already recorded there are not rerun.
  std::string manifest_path;
};

std::vector<SimResult> sweep(const std::vector<SimConfig>& configs, const SweepOutput& out,
                             const std::function<void(const SimResult&)>& on_result = {});

}  // namespace flashmmi
