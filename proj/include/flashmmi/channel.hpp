#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace flashmmi {

class Dmc;

struct GaussianLevel {
  double mean = 0.0;
  double sigma = 1.0;
};

/// A level density known only on a grid. Between grid points the density is
/// linear, so the cdf agrees with trapezoidal quadrature at every grid node.
class TabulatedLevel {
 public:
  static constexpr std::size_t kMinGridPoints = 512;

  TabulatedLevel(std::vector<double> grid, std::vector<double> density);

  double pdf(double v) const;
  double cdf(double v) const;
  /// Inverse cdf; u in [0, 1].
  double quantile(double u) const;
  double mean() const { return mean_; }
  double stddev() const { return stddev_; }

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& density() const { return density_; }

 private:
  std::vector<double> grid_;
  std::vector<double> density_;
  std::vector<double> cumulative_;
  double mean_ = 0.0;
  double stddev_ = 0.0;
};

using LevelDensity = std::variant<GaussianLevel, TabulatedLevel>;

enum class ChannelKind { GaussianSlc, GaussianMlc, Surrogate, Tabulated, Custom };

std::string to_string(ChannelKind kind);

/// Per-level conditional threshold-voltage densities plus the input prior.
/// Immutable after construction.
class ChannelModel {
 public:
  ChannelModel(std::vector<LevelDensity> levels, std::vector<double> prior = {},
               ChannelKind kind = ChannelKind::Custom);

  std::size_t num_levels() const { return levels_.size(); }
  const LevelDensity& level(std::size_t i) const { return levels_.at(i); }
  const std::vector<LevelDensity>& levels() const { return levels_; }
  std::span<const double> prior() const { return prior_; }
  ChannelKind kind() const { return kind_; }

  double pdf(std::size_t i, double v) const;
  /// log(prior_i * f_i(v)); -inf where the tabulated density vanishes.
  double log_weighted_pdf(std::size_t i, double v) const;
  /// P(a < V < b | level i); a and b may be infinite.
  double mass_between(std::size_t i, double a, double b) const;
  double mean(std::size_t i) const;
  /// Sigma for Gaussian levels, standard deviation for tabulated ones.
  double spread(std::size_t i) const;

  bool all_gaussian() const;
  /// Two Gaussian levels at -m and +m with equal sigma and uniform prior.
  bool is_symmetric_slc() const;
  /// Equal-sigma Gaussian levels with uniform prior.
  bool is_equal_variance_gaussian() const;

  /// Draw a threshold voltage for a cell written to level i.
  template <class Rng>
  double sample(std::size_t i, Rng& rng) const {
    if (const auto* g = std::get_if<GaussianLevel>(&levels_[i])) {
      std::normal_distribution<double> nd(g->mean, g->sigma);
      return nd(rng);
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return std::get<TabulatedLevel>(levels_[i]).quantile(u(rng));
  }

 private:
  std::vector<LevelDensity> levels_;
  std::vector<double> prior_;
  ChannelKind kind_;
};

struct RetentionSurrogateParams {
  std::vector<GaussianLevel> levels;
  std::string calibration_note;

  /// Four-level surrogate whose 6-read unconstrained MMI is 1.885 bits.
  static RetentionSurrogateParams calibrated();
};

/// Es = 1, means -1/+1, sigma = sqrt(N0/2) with SNR = Es/(N0/2).
ChannelModel make_slc_gaussian(double snr_db);

ChannelModel make_mlc_gaussian(std::span<const double> means, double sigma);

/// Sigma for the given means at SNR = Es/(N0/2), Es the average symbol energy.
double mlc_sigma_for_snr(std::span<const double> means, double snr_db);

/// Means {-3,-1,1,3} at the given SNR.
ChannelModel make_mlc_gaussian_snr(double snr_db);

ChannelModel make_retention_surrogate(const RetentionSurrogateParams& params);

/// Tabulate a Gaussian on n points spanning mean +- 8 sigma.
TabulatedLevel tabulate_gaussian(double mean, double sigma, std::size_t points = 2049);

/// Transition table for quantizing with the given strictly ascending thresholds.
Dmc crossover_probabilities(const ChannelModel& model, std::span<const double> thresholds);

/// Crossing points of prior-weighted adjacent level densities.
std::vector<double> hard_thresholds(const ChannelModel& model);

}  // namespace flashmmi
