#include "flashmmi/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "flashmmi/gaussian.hpp"
#include "flashmmi/mi.hpp"

namespace flashmmi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TabulatedLevel::TabulatedLevel(std::vector<double> grid, std::vector<double> density)
    : grid_(std::move(grid)), density_(std::move(density)) {
  if (grid_.size() != density_.size())
    throw std::invalid_argument("tabulated level: grid and density sizes differ");
  if (grid_.size() < kMinGridPoints)
    throw std::invalid_argument("tabulated level: need at least 512 grid points");
  for (std::size_t i = 1; i < grid_.size(); ++i)
    if (!(grid_[i] > grid_[i - 1]))
      throw std::invalid_argument("tabulated level: grid must be strictly ascending");
  for (double d : density_)
    if (!(d >= 0.0) || !std::isfinite(d))
      throw std::invalid_argument("tabulated level: density must be finite and nonnegative");

  cumulative_.assign(grid_.size(), 0.0);
  double first_moment = 0.0;
  double second_moment = 0.0;
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    const double h = grid_[i] - grid_[i - 1];
    cumulative_[i] = cumulative_[i - 1] + 0.5 * h * (density_[i] + density_[i - 1]);
    first_moment += 0.5 * h * (grid_[i] * density_[i] + grid_[i - 1] * density_[i - 1]);
    second_moment += 0.5 * h *
                     (grid_[i] * grid_[i] * density_[i] +
                      grid_[i - 1] * grid_[i - 1] * density_[i - 1]);
  }
  const double total = cumulative_.back();
  if (std::abs(total - 1.0) > 1e-6)
    throw std::invalid_argument("tabulated level: density must integrate to 1 within 1e-6");
  mean_ = first_moment / total;
  stddev_ = std::sqrt(std::max(0.0, second_moment / total - mean_ * mean_));
}

double TabulatedLevel::pdf(double v) const {
  if (v <= grid_.front() || v >= grid_.back()) {
    if (v == grid_.front()) return density_.front();
    if (v == grid_.back()) return density_.back();
    return 0.0;
  }
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), v);
  const std::size_t k = static_cast<std::size_t>(it - grid_.begin()) - 1;
  const double t = (v - grid_[k]) / (grid_[k + 1] - grid_[k]);
  return density_[k] + t * (density_[k + 1] - density_[k]);
}

double TabulatedLevel::cdf(double v) const {
  const double total = cumulative_.back();
  if (v <= grid_.front()) return 0.0;
  if (v >= grid_.back()) return 1.0;
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), v);
  const std::size_t k = static_cast<std::size_t>(it - grid_.begin()) - 1;
  const double h = grid_[k + 1] - grid_[k];
  const double t = v - grid_[k];
  const double slope = (density_[k + 1] - density_[k]) / h;
  return (cumulative_[k] + density_[k] * t + 0.5 * slope * t * t) / total;
}

double TabulatedLevel::quantile(double u) const {
  const double target = std::clamp(u, 0.0, 1.0) * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.begin()) return grid_.front();
  if (it == cumulative_.end()) return grid_.back();
  const std::size_t k = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  const double h = grid_[k + 1] - grid_[k];
  const double rem = target - cumulative_[k];
  const double a = 0.5 * (density_[k + 1] - density_[k]) / h;
  const double b = density_[k];
  double t;
  if (std::abs(a) < 1e-300) {
    t = b > 0.0 ? rem / b : 0.0;
  } else {
    // a t^2 + b t - rem = 0, stable root.
    const double disc = std::max(0.0, b * b + 4.0 * a * rem);
    t = 2.0 * rem / (b + std::sqrt(disc));
  }
  return grid_[k] + std::clamp(t, 0.0, h);
}

std::string to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::GaussianSlc: return "gaussian_slc";
    case ChannelKind::GaussianMlc: return "gaussian_mlc";
    case ChannelKind::Surrogate: return "surrogate";
    case ChannelKind::Tabulated: return "tabulated";
    case ChannelKind::Custom: return "custom";
  }
  return "custom";
}

ChannelModel::ChannelModel(std::vector<LevelDensity> levels, std::vector<double> prior,
                           ChannelKind kind)
    : levels_(std::move(levels)), prior_(std::move(prior)), kind_(kind) {
  if (levels_.size() < 2) throw std::invalid_argument("channel: need at least two levels");
  if (prior_.empty()) prior_.assign(levels_.size(), 1.0 / static_cast<double>(levels_.size()));
  if (prior_.size() != levels_.size())
    throw std::invalid_argument("channel: prior size must match level count");
  double sum = 0.0;
  for (double p : prior_) {
    if (!(p >= 0.0)) throw std::invalid_argument("channel: prior entries must be nonnegative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("channel: prior must sum to 1");
  for (const auto& lvl : levels_)
    if (const auto* g = std::get_if<GaussianLevel>(&lvl))
      if (!(g->sigma > 0.0) || !std::isfinite(g->mean))
        throw std::invalid_argument("channel: sigma must be positive");
  for (std::size_t i = 1; i < levels_.size(); ++i)
    if (!(mean(i) > mean(i - 1)))
      throw std::invalid_argument("channel: level means must be strictly increasing");
}

double ChannelModel::pdf(std::size_t i, double v) const {
  return std::visit(
      [v](const auto& lvl) -> double {
        using T = std::decay_t<decltype(lvl)>;
        if constexpr (std::is_same_v<T, GaussianLevel>)
          return normal_pdf(v, lvl.mean, lvl.sigma);
        else
          return lvl.pdf(v);
      },
      levels_[i]);
}

double ChannelModel::log_weighted_pdf(std::size_t i, double v) const {
  const double lp = std::log(prior_[i]);
  if (const auto* g = std::get_if<GaussianLevel>(&levels_[i])) {
    const double z = (v - g->mean) / g->sigma;
    return lp - 0.5 * z * z - std::log(g->sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  const double d = std::get<TabulatedLevel>(levels_[i]).pdf(v);
  return d > 0.0 ? lp + std::log(d) : -kInf;
}

double ChannelModel::mass_between(std::size_t i, double a, double b) const {
  if (!(a < b)) return 0.0;
  if (const auto* g = std::get_if<GaussianLevel>(&levels_[i]))
    return normal_interval(a, b, g->mean, g->sigma);
  const auto& t = std::get<TabulatedLevel>(levels_[i]);
  const double hi = b == kInf ? 1.0 : t.cdf(b);
  const double lo = a == -kInf ? 0.0 : t.cdf(a);
  return std::max(0.0, hi - lo);
}

double ChannelModel::mean(std::size_t i) const {
  if (const auto* g = std::get_if<GaussianLevel>(&levels_[i])) return g->mean;
  return std::get<TabulatedLevel>(levels_[i]).mean();
}

double ChannelModel::spread(std::size_t i) const {
  if (const auto* g = std::get_if<GaussianLevel>(&levels_[i])) return g->sigma;
  return std::get<TabulatedLevel>(levels_[i]).stddev();
}

bool ChannelModel::all_gaussian() const {
  return std::all_of(levels_.begin(), levels_.end(),
                     [](const auto& l) { return std::holds_alternative<GaussianLevel>(l); });
}

bool ChannelModel::is_equal_variance_gaussian() const {
  if (!all_gaussian()) return false;
  const double s0 = std::get<GaussianLevel>(levels_[0]).sigma;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (std::get<GaussianLevel>(levels_[i]).sigma != s0) return false;
    if (std::abs(prior_[i] - prior_[0]) > 1e-15) return false;
  }
  return true;
}

bool ChannelModel::is_symmetric_slc() const {
  if (levels_.size() != 2 || !is_equal_variance_gaussian()) return false;
  const double m0 = std::get<GaussianLevel>(levels_[0]).mean;
  const double m1 = std::get<GaussianLevel>(levels_[1]).mean;
  return std::abs(m0 + m1) <= 1e-12 * std::max(1.0, std::abs(m1));
}

RetentionSurrogateParams RetentionSurrogateParams::calibrated() {
  RetentionSurrogateParams p;
  // Shape: erased level widest, programmed levels progressively wider with
  // voltage. A common scale was bisected so the 6-read unconstrained MMI is
  // 1.885 bits (see tests/test_channel.cpp).
  constexpr double kScale = 0.427195;
  p.levels = {{-3.0, 1.60 * kScale}, {-1.0, 0.90 * kScale}, {1.0, 0.95 * kScale},
              {3.0, 1.05 * kScale}};
  p.calibration_note =
      "means {-3,-1,1,3}; sigma ratios {1.60,0.90,0.95,1.05}; common scale bisected so "
      "6-read unconstrained MMI = 1.885 bits";
  return p;
}

ChannelModel make_slc_gaussian(double snr_db) {
  if (!std::isfinite(snr_db)) throw std::invalid_argument("snr_db must be finite");
  const double sigma = std::sqrt(1.0 / db_to_linear(snr_db));
  return ChannelModel({GaussianLevel{-1.0, sigma}, GaussianLevel{1.0, sigma}}, {},
                      ChannelKind::GaussianSlc);
}

ChannelModel make_mlc_gaussian(std::span<const double> means, double sigma) {
  if (means.size() != 4) throw std::invalid_argument("MLC model needs four means");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  std::vector<LevelDensity> levels;
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (i > 0 && !(means[i] > means[i - 1]))
      throw std::invalid_argument("MLC means must be strictly increasing");
    levels.emplace_back(GaussianLevel{means[i], sigma});
  }
  return ChannelModel(std::move(levels), {}, ChannelKind::GaussianMlc);
}

double mlc_sigma_for_snr(std::span<const double> means, double snr_db) {
  double es = 0.0;
  for (double m : means) es += m * m;
  es /= static_cast<double>(means.size());
  return std::sqrt(es / db_to_linear(snr_db));
}

ChannelModel make_mlc_gaussian_snr(double snr_db) {
  static constexpr double kMeans[] = {-3.0, -1.0, 1.0, 3.0};
  return make_mlc_gaussian(kMeans, mlc_sigma_for_snr(kMeans, snr_db));
}

ChannelModel make_retention_surrogate(const RetentionSurrogateParams& params) {
  if (params.levels.size() != 4)
    throw std::invalid_argument("retention surrogate: need four levels");
  const double s0 = params.levels[0].sigma;
  for (std::size_t i = 1; i < params.levels.size(); ++i)
    if (!(s0 > params.levels[i].sigma))
      throw std::invalid_argument(
          "retention surrogate: lowest level must have strictly the largest sigma");
  std::vector<LevelDensity> levels(params.levels.begin(), params.levels.end());
  return ChannelModel(std::move(levels), {}, ChannelKind::Surrogate);
}

TabulatedLevel tabulate_gaussian(double mean, double sigma, std::size_t points) {
  std::vector<double> grid(points);
  std::vector<double> dens(points);
  const double lo = mean - 8.0 * sigma;
  const double step = 16.0 * sigma / static_cast<double>(points - 1);
  double total = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = lo + step * static_cast<double>(i);
    dens[i] = normal_pdf(grid[i], mean, sigma);
  }
  for (std::size_t i = 1; i < points; ++i) total += 0.5 * step * (dens[i] + dens[i - 1]);
  for (double& d : dens) d /= total;
  return TabulatedLevel(std::move(grid), std::move(dens));
}

Dmc crossover_probabilities(const ChannelModel& model, std::span<const double> thresholds) {
  for (std::size_t j = 1; j < thresholds.size(); ++j)
    if (!(thresholds[j] > thresholds[j - 1]))
      throw std::invalid_argument("thresholds must be strictly ascending");
  for (double t : thresholds)
    if (!std::isfinite(t)) throw std::invalid_argument("thresholds must be finite");
  const std::size_t m = model.num_levels();
  const std::size_t k = thresholds.size() + 1;
  std::vector<double> table(m * k);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double a = j == 0 ? -kInf : thresholds[j - 1];
      const double b = j + 1 == k ? kInf : thresholds[j];
      table[i * k + j] = model.mass_between(i, a, b);
    }
    // Renormalize away rounding so every row is a probability vector.
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += table[i * k + j];
    for (std::size_t j = 0; j < k; ++j) table[i * k + j] /= s;
  }
  return Dmc(m, k, std::move(table), {model.prior().begin(), model.prior().end()});
}

std::vector<double> hard_thresholds(const ChannelModel& model) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < model.num_levels(); ++i) {
    const double lo_mean = model.mean(i);
    const double hi_mean = model.mean(i + 1);
    const auto* g0 = std::get_if<GaussianLevel>(&model.level(i));
    const auto* g1 = std::get_if<GaussianLevel>(&model.level(i + 1));
    if (g0 && g1 && g0->sigma == g1->sigma) {
      const double s2 = g0->sigma * g0->sigma;
      const double v = 0.5 * (g0->mean + g1->mean) +
                       s2 * std::log(model.prior()[i] / model.prior()[i + 1]) /
                           (g1->mean - g0->mean);
      if (!(v > lo_mean && v < hi_mean))
        throw std::runtime_error("hard_thresholds: no crossing between adjacent means");
      out.push_back(v);
      continue;
    }
    auto diff = [&](double v) {
      return model.log_weighted_pdf(i, v) - model.log_weighted_pdf(i + 1, v);
    };
    double a = lo_mean;
    double b = hi_mean;
    double fa = diff(a);
    double fb = diff(b);
    if (!(fa > 0.0) || !(fb < 0.0))
      throw std::runtime_error("hard_thresholds: no crossing between adjacent means");
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
      const double mid = 0.5 * (a + b);
      if (diff(mid) > 0.0) a = mid; else b = mid;
    }
    out.push_back(0.5 * (a + b));
  }
  return out;
}

}  // namespace flashmmi
