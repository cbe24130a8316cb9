#include "flashmmi/quantopt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flashmmi/gaussian.hpp"
#include "flashmmi/mi.hpp"

namespace flashmmi {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Hard: return "hard";
    case Strategy::SymmetricQ: return "symmetric-q";
    case Strategy::SingleQ: return "single-q";
    case Strategy::ConstantRatio: return "cr";
    case Strategy::Unconstrained: return "unconstrained";
    case Strategy::Uniform: return "uniform";
  }
  return "hard";
}

Strategy strategy_from_string(const std::string& s) {
  if (s == "hard") return Strategy::Hard;
  if (s == "symmetric-q") return Strategy::SymmetricQ;
  if (s == "single-q") return Strategy::SingleQ;
  if (s == "cr" || s == "constant-ratio") return Strategy::ConstantRatio;
  if (s == "unconstrained") return Strategy::Unconstrained;
  if (s == "uniform") return Strategy::Uniform;
  throw std::invalid_argument("unknown strategy: " + s);
}

double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                          double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  double best = 0.5 * (a + b);
  double fbest = f(best);
  // Boundary maxima (e.g. q = 0) are legitimate for these objectives.
  for (double x : {lo, hi}) {
    const double fx = f(x);
    if (fx > fbest) {
      best = x;
      fbest = fx;
    }
  }
  return best;
}

namespace {

std::vector<double> normalized(std::span<const double> thresholds) {
  std::vector<double> t(thresholds.begin(), thresholds.end());
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

QuantizationScheme make_scheme(const ChannelModel& model, std::vector<double> thresholds,
                               Strategy strategy) {
  QuantizationScheme s;
  s.thresholds = normalized(thresholds);
  s.strategy = strategy;
  s.achieved_mi = quantized_mi(model, s.thresholds);
  return s;
}

double min_mean_gap(const ChannelModel& model) {
  double gap = INFINITY;
  for (std::size_t i = 1; i < model.num_levels(); ++i)
    gap = std::min(gap, model.mean(i) - model.mean(i - 1));
  return gap;
}

// Levels mirrored about a center with matching Gaussian shapes and priors.
bool mirror_symmetric(const ChannelModel& model, double& center) {
  if (!model.all_gaussian()) return false;
  const std::size_t m = model.num_levels();
  center = 0.5 * (model.mean(0) + model.mean(m - 1));
  const double scale = std::max(1.0, model.mean(m - 1) - model.mean(0));
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = m - 1 - i;
    if (std::abs(model.mean(i) + model.mean(j) - 2.0 * center) > 1e-12 * scale) return false;
    if (model.spread(i) != model.spread(j)) return false;
    if (std::abs(model.prior()[i] - model.prior()[j]) > 1e-15) return false;
  }
  return true;
}

std::vector<double> expand_symmetric(double center, std::span<const double> half, bool odd) {
  std::vector<double> full;
  full.reserve(2 * half.size() + 1);
  for (auto it = half.rbegin(); it != half.rend(); ++it) full.push_back(center - *it);
  if (odd) full.push_back(center);
  for (double u : half) full.push_back(center + u);
  return full;
}

// Lexicographic enumeration of strictly increasing index tuples. Returns up to
// `keep` best tuples by value, ties resolved toward the lexicographically
// smallest tuple (enumeration order plus a strict comparison).
template <class Eval>
std::vector<std::vector<std::size_t>> best_combinations(std::size_t n, std::size_t k,
                                                        std::size_t keep, Eval&& eval) {
  std::vector<std::pair<double, std::vector<std::size_t>>> top;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    const double v = eval(idx);
    if (top.size() < keep || v > top.back().first) {
      auto pos = std::find_if(top.begin(), top.end(), [v](const auto& e) { return v > e.first; });
      top.insert(pos, {v, idx});
      if (top.size() > keep) top.pop_back();
    }
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  std::vector<std::vector<std::size_t>> out;
  for (auto& e : top) out.push_back(std::move(e.second));
  return out;
}

// Coordinate-wise golden-section ascent on a sorted parameter vector with
// per-coordinate bounds given by its neighbours. Returns the final value.
double coordinate_ascent(std::vector<double>& params, double lower, double upper,
                         const std::function<double(std::span<const double>)>& objective,
                         int max_cycles) {
  double current = objective(params);
  for (int cycle = 0; cycle < max_cycles; ++cycle) {
    const double before = current;
    for (std::size_t j = 0; j < params.size(); ++j) {
      const double lo = j == 0 ? lower : params[j - 1];
      const double hi = j + 1 == params.size() ? upper : params[j + 1];
      std::vector<double> trial = params;
      auto f = [&](double x) {
        trial[j] = x;
        return objective(trial);
      };
      const double x = golden_section_max(f, lo, hi);
      trial[j] = x;
      const double v = objective(trial);
      if (v >= current) {
        params[j] = x;
        current = v;
      }
    }
    if (current - before < 1e-13) break;
  }
  return current;
}

}  // namespace

double quantized_mi(const ChannelModel& model, std::span<const double> thresholds) {
  const auto t = normalized(thresholds);
  return mutual_information(crossover_probabilities(model, t));
}

QuantizationScheme hard_scheme(const ChannelModel& model) {
  return make_scheme(model, hard_thresholds(model), Strategy::Hard);
}

QuantizationScheme optimize_symmetric_q(const ChannelModel& model, int reads) {
  if (reads != 2 && reads != 3) throw std::invalid_argument("symmetric-q supports 2 or 3 reads");
  if (!model.is_symmetric_slc())
    throw std::invalid_argument("symmetric-q needs the symmetric Gaussian SLC model");
  const double sigma = model.spread(0);
  auto deriv = [&](double q) {
    return reads == 2 ? mi_derivative_two_reads(model, q) : mi_derivative_three_reads(model, q);
  };
  double lo = 0.0;
  double hi = sigma / 16.0;
  while (!(deriv(hi) < 0.0)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 20.0 * sigma)
      throw std::runtime_error("symmetric-q: derivative never turns negative (degenerate SNR)");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double d = deriv(mid);
    if (d == 0.0) {
      lo = hi = mid;
      break;
    }
    (d > 0.0 ? lo : hi) = mid;
  }
  const double q = 0.5 * (lo + hi);
  std::vector<double> th = reads == 2 ? std::vector<double>{-q, q} : std::vector<double>{-q, 0.0, q};
  auto s = make_scheme(model, th, Strategy::SymmetricQ);
  s.q = q;
  return s;
}

std::vector<double> single_q_thresholds(const ChannelModel& model, double q) {
  const auto hard = hard_thresholds(model);
  if (q <= 0.0) return hard;
  std::vector<double> th;
  for (double h : hard) {
    th.push_back(h - q);
    th.push_back(h + q);
  }
  return normalized(th);
}

QuantizationScheme optimize_single_q_mlc(const ChannelModel& model) {
  const double qmax = 0.5 * min_mean_gap(model);
  auto f = [&](double q) { return quantized_mi(model, single_q_thresholds(model, q)); };
  const double q = golden_section_max(f, 0.0, qmax);
  auto s = make_scheme(model, single_q_thresholds(model, q), Strategy::SingleQ);
  s.q = q;
  return s;
}

std::vector<double> thresholds_from_ratio(const ChannelModel& model, double ratio) {
  if (!(ratio >= 1.0)) throw std::invalid_argument("constant ratio R must be >= 1");
  const auto hard = hard_thresholds(model);
  if (ratio == 1.0) return hard;
  const double log_r = std::log(ratio);
  std::vector<double> th;
  for (std::size_t i = 0; i < hard.size(); ++i) {
    // Log ratio of the dominant to the runner-up density on each side.
    auto left = [&](double v) { return model.log_weighted_pdf(i, v) - model.log_weighted_pdf(i + 1, v); };
    auto right = [&](double v) { return -left(v); };
    auto solve = [&](auto&& g, double near, double far) {
      if (!(g(far) >= log_r))
        throw std::runtime_error("constant ratio R unreachable before the adjacent level mean");
      double a = near;  // g(a) ~ 0 < log_r
      double b = far;   // g(b) >= log_r
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid == a || mid == b) break;
        (g(mid) < log_r ? a : b) = mid;
      }
      return 0.5 * (a + b);
    };
    th.push_back(solve(left, hard[i], model.mean(i)));
    th.push_back(solve(right, hard[i], model.mean(i + 1)));
  }
  std::sort(th.begin(), th.end());
  return th;
}

std::vector<double> default_ratio_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 60; ++i) g.push_back(1.0 + 0.5 * i);
  return g;
}

QuantizationScheme optimize_constant_ratio(const ChannelModel& model,
                                           std::span<const double> r_grid) {
  if (r_grid.empty()) throw std::invalid_argument("constant ratio: empty R grid");
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (!(r_grid[i] >= 1.0)) throw std::invalid_argument("constant ratio: R must be >= 1");
    if (i > 0 && !(r_grid[i] > r_grid[i - 1]))
      throw std::invalid_argument("constant ratio: R grid must be ascending");
  }
  auto mi_at = [&](double r) { return quantized_mi(model, thresholds_from_ratio(model, r)); };
  std::size_t best = 0;
  double best_mi = -INFINITY;
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    const double v = mi_at(r_grid[i]);
    if (v > best_mi) {
      best_mi = v;
      best = i;
    }
  }
  double r = r_grid[best];
  if (r_grid.size() > 1) {
    const double lo = r_grid[best == 0 ? 0 : best - 1];
    const double hi = r_grid[best + 1 == r_grid.size() ? best : best + 1];
    const double refined = golden_section_max(mi_at, lo, hi);
    if (mi_at(refined) >= best_mi) r = refined;
  }
  auto s = make_scheme(model, thresholds_from_ratio(model, r), Strategy::ConstantRatio);
  s.ratio = r;
  return s;
}

QuantizationScheme optimize_unconstrained(const ChannelModel& model, int num_thresholds,
                                          double grid_step) {
  if (num_thresholds < 1) throw std::invalid_argument("unconstrained: need at least one threshold");
  const std::size_t m = model.num_levels();
  const double lo_mean = model.mean(0);
  const double hi_mean = model.mean(m - 1);
  const double span = hi_mean - lo_mean;
  if (grid_step <= 0.0) grid_step = span / 20.0;
  const auto points = static_cast<std::size_t>(std::floor(span / grid_step + 1e-9)) + 1;
  if (points < 3) throw std::invalid_argument("unconstrained: grid too coarse to bracket");
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) grid[i] = lo_mean + grid_step * static_cast<double>(i);

  const double lower = lo_mean - 4.0 * model.spread(0);
  const double upper = hi_mean + 4.0 * model.spread(m - 1);
  const auto k = static_cast<std::size_t>(num_thresholds);
  auto full_mi = [&](std::span<const double> t) { return quantized_mi(model, t); };
  // Promising grid cells refined independently; MI is not quasi-concave in
  // several thresholds, so a single start can land on a poorer local maximum.
  constexpr std::size_t kStarts = 12;

  std::vector<double> thresholds;
  double center = 0.0;
  if (mirror_symmetric(model, center)) {
    const bool odd = (k % 2) == 1;
    const std::size_t half = k / 2;
    std::vector<double> positive;
    for (double g : grid)
      if (g - center > 1e-12 * std::max(1.0, span)) positive.push_back(g - center);
    if (positive.size() < half) throw std::invalid_argument("unconstrained: grid too coarse");
    std::vector<double> params;
    if (half > 0) {
      std::vector<double> tmp(half);
      const auto starts = best_combinations(positive.size(), half, kStarts, [&](const auto& ix) {
        for (std::size_t j = 0; j < half; ++j) tmp[j] = positive[ix[j]];
        return full_mi(expand_symmetric(center, tmp, odd));
      });
      auto sym_objective = [&](std::span<const double> h) {
        return full_mi(expand_symmetric(center, h, odd));
      };
      double best = -INFINITY;
      for (const auto& idx : starts) {
        std::vector<double> trial;
        for (auto i : idx) trial.push_back(positive[i]);
        const double v = coordinate_ascent(trial, 0.0, upper - center, sym_objective, 2000);
        if (v > best) {
          best = v;
          params = trial;
        }
      }
    }
    thresholds = expand_symmetric(center, params, odd);
    // One cycle without the symmetry constraint.
    coordinate_ascent(thresholds, lower, upper, full_mi, 1);
  } else {
    if (points < k) throw std::invalid_argument("unconstrained: grid too coarse");
    std::vector<double> tmp(k);
    const auto starts = best_combinations(points, k, kStarts, [&](const auto& ix) {
      for (std::size_t j = 0; j < k; ++j) tmp[j] = grid[ix[j]];
      return full_mi(tmp);
    });
    double best = -INFINITY;
    for (const auto& idx : starts) {
      std::vector<double> trial;
      for (auto i : idx) trial.push_back(grid[i]);
      const double v = coordinate_ascent(trial, lower, upper, full_mi, 2000);
      if (v > best) {
        best = v;
        thresholds = trial;
      }
    }
  }
  auto s = make_scheme(model, thresholds, Strategy::Unconstrained);
  s.grid_step = grid_step;
  return s;
}

std::vector<double> uniform_thresholds(const ChannelModel& model, int num_thresholds) {
  const std::size_t m = model.num_levels();
  const double lo = model.mean(0) - 4.0 * model.spread(0);
  const double hi = model.mean(m - 1) + 4.0 * model.spread(m - 1);
  std::vector<double> th;
  for (int i = 1; i <= num_thresholds; ++i)
    th.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(num_thresholds + 1));
  return th;
}

double continuous_mi(const ChannelModel& model) {
  const std::size_t m = model.num_levels();
  const double lo = model.mean(0) - 12.0 * model.spread(0);
  const double hi = model.mean(m - 1) + 12.0 * model.spread(m - 1);
  constexpr int kIntervals = 40000;  // even, for Simpson
  const double h = (hi - lo) / kIntervals;
  double total = 0.0;
  for (int k = 0; k <= kIntervals; ++k) {
    const double v = lo + h * k;
    double mix = 0.0;
    std::vector<double> f(m);
    for (std::size_t i = 0; i < m; ++i) {
      f[i] = model.pdf(i, v);
      mix += model.prior()[i] * f[i];
    }
    double integrand = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      if (f[i] > 0.0) integrand += model.prior()[i] * f[i] * std::log2(f[i] / mix);
    const double w = (k == 0 || k == kIntervals) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    total += w * integrand;
  }
  return total * h / 3.0;
}

}  // namespace flashmmi
