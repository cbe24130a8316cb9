#include "flashmmi/density_evolution.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>

#include "flashmmi/gaussian.hpp"

namespace flashmmi {

namespace {

// FFTW planning is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <class T>
struct FftwDeleter {
  void operator()(T* p) const { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter<T>>;

template <class T>
FftwBuffer<T> fftw_alloc(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (!p) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

// Box-plus of two nonnegative LLRs.
double boxplus_value(double a, double b) {
  if (a > b) std::swap(a, b);
  return a + std::log1p(std::exp(-(a + b))) - std::log1p(std::exp(-(b - a)));
}

}  // namespace

struct DensityEvolver::Fft {
  std::size_t size = 0;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Fft(std::size_t n) : size(n) {
    auto real = fftw_alloc<double>(n);
    auto spec = fftw_alloc<fftw_complex>(n / 2 + 1);
    std::lock_guard lock(planner_mutex());
    forward = fftw_plan_dft_r2c_1d(static_cast<int>(n), real.get(), spec.get(), FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec.get(), real.get(), FFTW_ESTIMATE);
  }
  ~Fft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
};

DensityEvolver::DensityEvolver(const DegreeDistribution& dd, const DeConfig& cfg)
    : dd_(dd.has_variable_degree(1) ? dd.without_degree_one() : dd), cfg_(cfg) {
  if (cfg_.num_bins < 4 || cfg_.num_bins % 2 != 0)
    throw std::invalid_argument("DE: num_bins must be even and >= 4");
  if (!(cfg_.llr_range > 0.0)) throw std::invalid_argument("DE: llr_range must be positive");
  half_ = cfg_.num_bins / 2;
  step_ = cfg_.llr_range / half_;

  sat_.resize(half_ + 1);
  offset_.resize(half_ + 1);
  for (int i = 0; i <= half_; ++i) {
    offset_[i] = table_.size();
    int j = i;
    for (; j <= half_; ++j) {
      const double v = boxplus_value(i * step_, j * step_);
      const int r = std::clamp(static_cast<int>(std::lround(v / step_)), 0, i);
      if (r == i) break;
      table_.push_back(r);
    }
    sat_[i] = j;
  }

  const std::size_t support =
      static_cast<std::size_t>(dd_.max_variable_degree()) * cfg_.num_bins + 1;
  std::size_t n = 1;
  while (n < support) n <<= 1;
  fft_ = std::make_unique<Fft>(n);
}

DensityEvolver::~DensityEvolver() = default;

std::vector<double> DensityEvolver::awgn_pmf(double sigma) const {
  const double mean = 2.0 / (sigma * sigma);
  const double sd = 2.0 / sigma;
  std::vector<double> pmf(2 * half_ + 1);
  for (int i = 0; i <= 2 * half_; ++i) {
    const double a = i == 0 ? -INFINITY : (i - half_ - 0.5) * step_;
    const double b = i == 2 * half_ ? INFINITY : (i - half_ + 0.5) * step_;
    pmf[i] = normal_interval(a, b, mean, sd);
  }
  return pmf;
}

std::vector<double> DensityEvolver::masses_pmf(std::span<const LlrMass> masses) const {
  std::vector<double> pmf(2 * half_ + 1, 0.0);
  double total = 0.0;
  for (const auto& m : masses) {
    const long idx = std::clamp<long>(std::lround(m.llr / step_), -half_, half_);
    pmf[idx + half_] += m.prob;
    total += m.prob;
  }
  if (!(total > 0.0)) throw std::invalid_argument("DE: channel masses carry no probability");
  for (double& p : pmf) p /= total;
  return pmf;
}

double DensityEvolver::error_probability(std::span<const double> pmf) const {
  double e = 0.5 * pmf[half_];
  for (int i = 0; i < half_; ++i) e += pmf[i];
  return e;
}

void DensityEvolver::boxplus(std::span<const double> x, std::span<const double> y,
                             std::span<double> out) const {
  const int n = half_;
  std::vector<double> sx(n + 2, 0.0);
  std::vector<double> sy(n + 2, 0.0);
  for (int k = n; k >= 0; --k) {
    sx[k] = sx[k + 1] + x[k];
    sy[k] = sy[k + 1] + y[k];
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (int i = 0; i <= n; ++i) {
    const int s = sat_[i];
    const int* row = table_.data() + offset_[i] - i;
    const double xi = x[i];
    if (xi != 0.0) {
      for (int j = i; j < s; ++j) out[row[j]] += xi * y[j];
      out[i] += xi * sy[std::max(s, i)];
    }
    const double yi = y[i];
    if (yi != 0.0) {
      for (int j = i + 1; j < s; ++j) out[row[j]] += yi * x[j];
      out[i] += yi * sx[std::max(s, i + 1)];
    }
  }
}

void DensityEvolver::boxplus_square(std::span<const double> x, std::span<double> out) const {
  const int n = half_;
  std::vector<double> sx(n + 2, 0.0);
  for (int k = n; k >= 0; --k) sx[k] = sx[k + 1] + x[k];
  std::fill(out.begin(), out.end(), 0.0);
  for (int i = 0; i <= n; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const int s = sat_[i];
    const int* row = table_.data() + offset_[i] - i;
    out[s > i ? row[i] : i] += xi * xi;
    const double twice = 2.0 * xi;
    for (int j = i + 1; j < s; ++j) out[row[j]] += twice * x[j];
    out[i] += twice * sx[std::max(s, i + 1)];
  }
}

std::vector<double> DensityEvolver::check_power_mix(std::span<const double> mag) const {
  const std::size_t len = static_cast<std::size_t>(half_) + 1;
  std::vector<double> mix(len, 0.0);
  std::vector<double> acc;   // running power for the current exponent
  int acc_exp = 0;
  std::vector<double> tmp(len);
  auto power = [&](int e) {
    std::vector<double> result;
    std::vector<double> p(mag.begin(), mag.end());
    std::vector<double> sq(len);
    bool have = false;
    while (e > 0) {
      if (e & 1) {
        if (have) {
          boxplus(result, p, tmp);
          result.swap(tmp);
        } else {
          result = p;
          have = true;
        }
      }
      e >>= 1;
      if (e > 0) {
        boxplus_square(p, sq);
        p.swap(sq);
      }
    }
    return result;
  };
  for (const auto& term : dd_.rho()) {
    const int e = term.degree - 1;
    if (e <= 0) continue;  // degree-1 check: constant all-erasure output, ignored
    if (acc.empty()) {
      acc = power(e);
    } else {
      const auto step = power(e - acc_exp);
      boxplus(acc, step, tmp);
      acc.swap(tmp);
      tmp.resize(len);
    }
    acc_exp = e;
    for (std::size_t k = 0; k < len; ++k) mix[k] += term.fraction * acc[k];
  }
  return mix;
}

std::vector<double> DensityEvolver::check_update(std::span<const double> v) const {
  const int n = half_;
  std::vector<double> a(n + 1);
  std::vector<double> b(n + 1);
  a[0] = v[n];
  b[0] = 0.0;
  for (int m = 1; m <= n; ++m) {
    a[m] = v[n + m] + v[n - m];
    b[m] = v[n + m] - v[n - m];
  }
  const auto out_a = check_power_mix(a);
  const auto out_b = check_power_mix(b);
  std::vector<double> c(2 * n + 1);
  c[n] = std::max(0.0, out_a[0]);
  for (int m = 1; m <= n; ++m) {
    c[n + m] = std::max(0.0, 0.5 * (out_a[m] + out_b[m]));
    c[n - m] = std::max(0.0, 0.5 * (out_a[m] - out_b[m]));
  }
  double total = 0.0;
  for (double p : c) total += p;
  for (double& p : c) p /= total;
  return c;
}

namespace {

void load_circular(std::span<const double> pmf, int half, double* buf, std::size_t size) {
  std::fill(buf, buf + size, 0.0);
  for (int i = 0; i <= 2 * half; ++i) {
    const long v = i - half;
    buf[v >= 0 ? v : static_cast<long>(size) + v] = pmf[i];
  }
}

}  // namespace

std::vector<double> DensityEvolver::variable_update(std::span<const double> channel,
                                                    std::span<const double> check) const {
  const std::size_t n = fft_->size;
  const std::size_t nc = n / 2 + 1;
  auto real = fftw_alloc<double>(n);
  auto ch_spec = fftw_alloc<fftw_complex>(nc);
  auto c_spec = fftw_alloc<fftw_complex>(nc);

  load_circular(channel, half_, real.get(), n);
  fftw_execute_dft_r2c(fft_->forward, real.get(), ch_spec.get());
  load_circular(check, half_, real.get(), n);
  fftw_execute_dft_r2c(fft_->forward, real.get(), c_spec.get());

  const int dmax = dd_.max_variable_degree();
  std::vector<double> weight(dmax + 1, 0.0);
  for (const auto& t : dd_.lambda()) weight[t.degree] = t.fraction;

  for (std::size_t k = 0; k < nc; ++k) {
    const std::complex<double> fc(c_spec[k][0], c_spec[k][1]);
    std::complex<double> pw(1.0, 0.0);
    std::complex<double> acc(0.0, 0.0);
    for (int d = 1; d <= dmax; ++d) {
      if (weight[d] != 0.0) acc += weight[d] * pw;
      pw *= fc;
    }
    const std::complex<double> out = acc * std::complex<double>(ch_spec[k][0], ch_spec[k][1]);
    c_spec[k][0] = out.real();
    c_spec[k][1] = out.imag();
  }
  fftw_execute_dft_c2r(fft_->backward, c_spec.get(), real.get());

  std::vector<double> v(2 * half_ + 1, 0.0);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t p = 0; p < n; ++p) {
    const double mass = real[p] * scale;
    if (!(mass > 0.0)) continue;  // drop FFT round-off below zero
    const long val = p <= n / 2 ? static_cast<long>(p) : static_cast<long>(p) - static_cast<long>(n);
    const long idx = std::clamp<long>(val, -half_, half_) + half_;
    v[idx] += mass;
  }
  double total = 0.0;
  for (double x : v) total += x;
  for (double& x : v) x /= total;
  return v;
}

DeRun DensityEvolver::run(std::span<const double> channel) const {
  DeRun r;
  std::vector<double> v(channel.begin(), channel.end());
  double prev = error_probability(v);
  r.final_error = prev;
  if (prev < cfg_.target_error) {
    r.converged = true;
    return r;
  }
  int slow = 0;
  for (int it = 1; it <= cfg_.max_de_iters; ++it) {
    const auto c = check_update(v);
    v = variable_update(channel, c);
    const double pe = error_probability(v);
    r.iterations = it;
    r.final_error = pe;
    if (pe < cfg_.target_error) {
      r.converged = true;
      return r;
    }
    if (pe > prev * (1.0 + 1e-9) + 1e-15) ++r.monotonicity_violations;
    // A fixed point: the error stops moving.
    slow = (prev - pe) < 1e-7 * prev ? slow + 1 : 0;
    if (slow >= 20) return r;
    prev = pe;
  }
  return r;
}

namespace {

template <class Probe>
double bisect_largest_good(double good, double bad, double tol, Probe&& converges) {
  while (bad - good > tol) {
    const double mid = 0.5 * (good + bad);
    (converges(mid) ? good : bad) = mid;
  }
  return good;
}

}  // namespace

AwgnThreshold de_threshold_awgn(const DegreeDistribution& dd, const DeConfig& cfg,
                                const DeProbeCallback& on_probe) {
  DensityEvolver de(dd, cfg);
  auto converges = [&](double sigma) {
    const auto r = de.run(de.awgn_pmf(sigma));
    if (on_probe) on_probe(sigma, r);
    return r.converged;
  };
  double good = 0.35;
  double bad = 0.70;
  while (!converges(good)) good *= 0.8;
  while (converges(bad)) bad *= 1.25;
  AwgnThreshold t;
  t.sigma = bisect_largest_good(good, bad, 1e-4, converges);
  t.snr_db = linear_to_db(1.0 / (t.sigma * t.sigma));
  return t;
}

BscThreshold de_threshold_bsc(const DegreeDistribution& dd, const DeConfig& cfg,
                              const DeProbeCallback& on_probe) {
  DensityEvolver de(dd, cfg);
  auto converges = [&](double eps) {
    const double l = std::log((1.0 - eps) / eps);
    const LlrMass masses[] = {{l, 1.0 - eps}, {-l, eps}};
    const auto r = de.run(de.masses_pmf(masses));
    if (on_probe) on_probe(eps, r);
    return r.converged;
  };
  double good = 2e-3;
  double bad = 4e-2;
  while (!converges(good)) good *= 0.5;
  while (converges(bad) && bad < 0.5) bad = std::min(0.49, bad * 1.5);
  BscThreshold t;
  t.epsilon = bisect_largest_good(good, bad, 1e-5, converges);
  const double x = q_inverse(t.epsilon);
  t.snr_db = linear_to_db(x * x);
  return t;
}

DmcThreshold de_threshold_dmc(const DegreeDistribution& dd, const DmcFamily& family,
                              const DeConfig& cfg, const DeProbeCallback& on_probe) {
  DensityEvolver de(dd, cfg);
  auto converges = [&](double param) {
    const auto masses = dmc_llr_masses(family.channel(param), family.labeling);
    const auto r = de.run(de.masses_pmf(masses));
    if (on_probe) on_probe(param, r);
    return r.converged;
  };
  DmcThreshold t;
  double good = family.lo;
  double bad = family.hi;
  const bool lo_ok = converges(good);
  const bool hi_ok = converges(bad);
  if (!lo_ok || hi_ok) {
    t.monotone = false;
    t.parameter = lo_ok ? bad : good;
    return t;
  }
  while (bad - good > 1e-3 * std::max(std::abs(good), std::abs(bad))) {
    const double mid = 0.5 * (good + bad);
    (converges(mid) ? good : bad) = mid;
  }
  t.parameter = good;
  return t;
}

std::vector<LlrMass> dmc_llr_masses(const Dmc& dmc, const BitLabeling& labeling) {
  const auto table = bit_llrs(dmc, labeling);
  const double w = 1.0 / static_cast<double>(labeling.width());
  std::vector<LlrMass> out;
  for (std::size_t b = 0; b < table.bits; ++b) {
    for (std::size_t y = 0; y < table.outputs; ++y) {
      const double l = table.at(y, b);
      for (std::size_t x = 0; x < dmc.num_inputs(); ++x) {
        const double p = dmc.prior()[x] * dmc(x, y) * w;
        if (p <= 0.0) continue;
        out.push_back({labeling.bit(x, b) == 0 ? l : -l, p});
      }
    }
  }
  return out;
}

}  // namespace flashmmi
