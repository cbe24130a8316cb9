#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "flashmmi/channel.hpp"

namespace flashmmi {

/// M-input, K-output discrete memoryless channel with an input prior.
class Dmc {
 public:
  static constexpr double kRowTolerance = 1e-9;

  Dmc(std::size_t inputs, std::size_t outputs, std::vector<double> table,
      std::vector<double> prior = {});

  std::size_t num_inputs() const { return inputs_; }
  std::size_t num_outputs() const { return outputs_; }
  double operator()(std::size_t x, std::size_t y) const { return table_[x * outputs_ + y]; }
  std::span<const double> row(std::size_t x) const {
    return {table_.data() + x * outputs_, outputs_};
  }
  std::span<const double> table() const { return table_; }
  std::span<const double> prior() const { return prior_; }
  std::vector<double> output_distribution() const;

 private:
  std::size_t inputs_;
  std::size_t outputs_;
  std::vector<double> table_;
  std::vector<double> prior_;
};

/// Bit strings per input level; bit 0 is the leftmost (most significant).
class BitLabeling {
 public:
  explicit BitLabeling(std::vector<std::string> labels);

  /// SLC: level at -sqrt(Es) stores "1". MLC: Gray 00,01,11,10 in ascending
  /// voltage order.
  static BitLabeling default_for(std::size_t levels);

  std::size_t num_levels() const { return labels_.size(); }
  std::size_t width() const { return width_; }
  int bit(std::size_t level, std::size_t b) const { return labels_[level][b] == '1' ? 1 : 0; }
  const std::vector<std::string>& labels() const { return labels_; }
  /// Level index whose label equals the given bits.
  std::size_t level_of(std::span<const std::uint8_t> bits) const;

 private:
  std::vector<std::string> labels_;
  std::size_t width_;
};

/// Per-output, per-bit LLR table (row = output symbol).
struct LlrTable {
  std::size_t outputs = 0;
  std::size_t bits = 0;
  std::vector<double> values;

  double at(std::size_t y, std::size_t b) const { return values[y * bits + b]; }
};

inline constexpr double kLlrMax = 30.0;

/// Entropy in bits of a probability vector, 0 log 0 = 0.
double entropy_bits(std::span<const double> p);

/// I(X;Y) in bits.
double mutual_information(const Dmc& dmc);

/// dI/dq for the symmetric SLC channel quantized at {-q, +q}.
double mi_derivative_two_reads(const ChannelModel& model, double q);

/// dI/dq for the symmetric SLC channel quantized at {-q, 0, +q}.
double mi_derivative_three_reads(const ChannelModel& model, double q);

/// LLR(b, y) = log(P(bit b = 0, y) / P(bit b = 1, y)), clipped to +-kLlrMax.
LlrTable bit_llrs(const Dmc& dmc, const BitLabeling& labeling);

/// Channel bit error probability: per-bit error rate of a single hard read at
/// hard_thresholds, averaged over bit positions. Computed, never sampled.
double hard_bit_error_probability(const ChannelModel& model, const BitLabeling& labeling);

}  // namespace flashmmi
