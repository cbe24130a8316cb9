#include "flashmmi/mi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flashmmi/gaussian.hpp"

namespace flashmmi {

Dmc::Dmc(std::size_t inputs, std::size_t outputs, std::vector<double> table,
         std::vector<double> prior)
    : inputs_(inputs), outputs_(outputs), table_(std::move(table)), prior_(std::move(prior)) {
  if (inputs_ == 0 || outputs_ == 0) throw std::invalid_argument("dmc: empty alphabet");
  if (table_.size() != inputs_ * outputs_) throw std::invalid_argument("dmc: table size mismatch");
  if (prior_.empty()) prior_.assign(inputs_, 1.0 / static_cast<double>(inputs_));
  if (prior_.size() != inputs_) throw std::invalid_argument("dmc: prior size mismatch");
  for (std::size_t x = 0; x < inputs_; ++x) {
    double s = 0.0;
    for (std::size_t y = 0; y < outputs_; ++y) {
      const double p = table_[x * outputs_ + y];
      if (!(p >= 0.0)) throw std::invalid_argument("dmc: negative transition probability");
      s += p;
    }
    if (std::abs(s - 1.0) > kRowTolerance) throw std::invalid_argument("dmc: row does not sum to 1");
  }
  double ps = 0.0;
  for (double p : prior_) {
    if (!(p >= 0.0)) throw std::invalid_argument("dmc: negative prior");
    ps += p;
  }
  if (std::abs(ps - 1.0) > 1e-12) throw std::invalid_argument("dmc: prior does not sum to 1");
}

std::vector<double> Dmc::output_distribution() const {
  std::vector<double> py(outputs_, 0.0);
  for (std::size_t x = 0; x < inputs_; ++x)
    for (std::size_t y = 0; y < outputs_; ++y) py[y] += prior_[x] * table_[x * outputs_ + y];
  return py;
}

BitLabeling::BitLabeling(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw std::invalid_argument("labeling: no labels");
  width_ = labels_.front().size();
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].size() != width_ || width_ == 0)
      throw std::invalid_argument("labeling: labels must share a nonzero width");
    if (labels_[i].find_first_not_of("01") != std::string::npos)
      throw std::invalid_argument("labeling: labels must be bit strings");
    for (std::size_t j = 0; j < i; ++j)
      if (labels_[i] == labels_[j]) throw std::invalid_argument("labeling: labels must be distinct");
  }
}

BitLabeling BitLabeling::default_for(std::size_t levels) {
  if (levels == 2) return BitLabeling({"1", "0"});
  if (levels == 4) return BitLabeling({"00", "01", "11", "10"});
  throw std::invalid_argument("labeling: no default for this level count");
}

std::size_t BitLabeling::level_of(std::span<const std::uint8_t> bits) const {
  for (std::size_t l = 0; l < labels_.size(); ++l) {
    bool match = true;
    for (std::size_t b = 0; b < width_ && match; ++b) match = (bit(l, b) == (bits[b] & 1));
    if (match) return l;
  }
  throw std::invalid_argument("labeling: bit pattern has no level");
}

double entropy_bits(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

double mutual_information(const Dmc& dmc) {
  const auto py = dmc.output_distribution();
  double mi = 0.0;
  for (std::size_t x = 0; x < dmc.num_inputs(); ++x) {
    const double px = dmc.prior()[x];
    if (px <= 0.0) continue;
    for (std::size_t y = 0; y < dmc.num_outputs(); ++y) {
      const double p = dmc(x, y);
      if (p > 0.0) mi += px * p * std::log2(p / py[y]);
    }
  }
  const double cap = std::log2(static_cast<double>(dmc.num_inputs()));
  return std::clamp(mi, 0.0, cap);
}

namespace {

struct SymmetricSlc {
  double amplitude;
  double sigma;
};

SymmetricSlc require_symmetric_slc(const ChannelModel& model, double q) {
  if (!model.is_symmetric_slc())
    throw std::invalid_argument("analytic derivative needs the symmetric Gaussian SLC model");
  if (!(q >= 0.0)) throw std::invalid_argument("q must be nonnegative");
  const auto& g = std::get<GaussianLevel>(model.level(1));
  return {g.mean, g.sigma};
}

// x log2 x with the 0 log 0 = 0 convention.
double xlog2(double coeff, double p) { return p > 0.0 ? coeff * std::log2(p) : 0.0; }

}  // namespace

double mi_derivative_two_reads(const ChannelModel& model, double q) {
  const auto [a, s] = require_symmetric_slc(model, q);
  // Crossover probabilities for the level written at +a.
  const double p1 = normal_interval(q, INFINITY, a, s);
  const double p3 = normal_interval(-INFINITY, -q, a, s);
  const double p13 = p1 + p3;
  const double f_plus = normal_pdf(a + q, 0.0, s);
  const double f_minus = normal_pdf(a - q, 0.0, s);
  return f_plus * std::log2(p13 / (2.0 * p3)) + f_minus * std::log2(p13 / (2.0 * p1));
}

double mi_derivative_three_reads(const ChannelModel& model, double q) {
  const auto [a, s] = require_symmetric_slc(model, q);
  const double f_minus = normal_pdf(a - q, 0.0, s);
  const double f_plus = normal_pdf(a + q, 0.0, s);
  const double p1 = normal_interval(q, INFINITY, a, s);
  const double p4 = normal_interval(-INFINITY, -q, a, s);
  if (q == 0.0) {
    // Limit of the erasure terms as p2, p3 -> 0 with p2/p3 -> f-/f+.
    const double w = f_minus / (f_minus + f_plus);
    const double erasure = f_minus * std::log2(w) + f_plus * std::log2(1.0 - w);
    return -f_minus * std::log2(p1) - f_plus * std::log2(p4) + erasure;
  }
  const double p2 = normal_interval(0.0, q, a, s);
  const double p3 = normal_interval(-q, 0.0, a, s);
  const double d1 = -f_minus;
  const double d2 = f_minus;
  const double d3 = f_plus;
  const double d4 = -f_plus;
  return xlog2(d1, p1) + xlog2(d2, p2) + xlog2(d3, p3) + xlog2(d4, p4) -
         xlog2(d1 + d4, p1 + p4) - xlog2(d2 + d3, p2 + p3);
}

LlrTable bit_llrs(const Dmc& dmc, const BitLabeling& labeling) {
  if (labeling.num_levels() != dmc.num_inputs())
    throw std::invalid_argument("bit_llrs: labeling size does not match the channel");
  LlrTable out;
  out.outputs = dmc.num_outputs();
  out.bits = labeling.width();
  out.values.assign(out.outputs * out.bits, 0.0);
  for (std::size_t y = 0; y < out.outputs; ++y) {
    for (std::size_t b = 0; b < out.bits; ++b) {
      double zero = 0.0;
      double one = 0.0;
      for (std::size_t x = 0; x < dmc.num_inputs(); ++x) {
        const double w = dmc.prior()[x] * dmc(x, y);
        (labeling.bit(x, b) == 0 ? zero : one) += w;
      }
      double llr;
      if (zero <= 0.0 && one <= 0.0) llr = 0.0;
      else if (one <= 0.0) llr = kLlrMax;
      else if (zero <= 0.0) llr = -kLlrMax;
      else llr = std::clamp(std::log(zero / one), -kLlrMax, kLlrMax);
      out.values[y * out.bits + b] = llr;
    }
  }
  return out;
}

double hard_bit_error_probability(const ChannelModel& model, const BitLabeling& labeling) {
  const auto th = hard_thresholds(model);
  const Dmc dmc = crossover_probabilities(model, th);
  double err = 0.0;
  for (std::size_t x = 0; x < dmc.num_inputs(); ++x) {
    for (std::size_t y = 0; y < dmc.num_outputs(); ++y) {
      if (y == x) continue;
      int flips = 0;
      for (std::size_t b = 0; b < labeling.width(); ++b)
        flips += labeling.bit(x, b) != labeling.bit(y, b);
      err += dmc.prior()[x] * dmc(x, y) * flips;
    }
  }
  return err / static_cast<double>(labeling.width());
}

}  // namespace flashmmi
