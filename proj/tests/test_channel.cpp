#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "flashmmi/channel.hpp"
#include "flashmmi/gaussian.hpp"
#include "flashmmi/mi.hpp"
#include "flashmmi/quantopt.hpp"

using namespace flashmmi;

namespace {

// Composite Simpson on [a, b].
template <class F>
double simpson(F f, double a, double b, int n = 4000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST(Gaussian, QFunctionKnownValues) {
  EXPECT_NEAR(q_function(0.0), 0.5, 1e-15);
  EXPECT_NEAR(q_function(1.0), 0.15865525393145707, 1e-15);
  EXPECT_NEAR(q_function(3.0), 1.3498980316301035e-3, 1e-17);
  // deep tail keeps relative precision
  EXPECT_NEAR(q_function(10.0) / 7.619853024160527e-24, 1.0, 1e-12);
  EXPECT_NEAR(phi_cdf(-1.0), q_function(1.0), 1e-16);
}

TEST(Gaussian, QInverseRoundTrip) {
  for (double p : {1e-12, 1e-6, 0.01, 0.2, 0.5, 0.7, 0.99}) {
    EXPECT_NEAR(q_function(q_inverse(p)) / p, 1.0, 1e-10) << p;
  }
  EXPECT_THROW(q_inverse(0.0), std::domain_error);
  EXPECT_THROW(q_inverse(1.0), std::domain_error);
}

TEST(Gaussian, IntervalMatchesQuadrature) {
  for (auto [a, b, m, s] : {std::array{-0.3, 0.4, 0.1, 0.5}, std::array{2.0, 3.0, -1.0, 0.7},
                            std::array{-5.0, -1.0, 1.0, 1.3}}) {
    const double ref = simpson([&](double v) { return normal_pdf(v, m, s); }, a, b);
    EXPECT_NEAR(normal_interval(a, b, m, s), ref, 1e-12);
  }
  EXPECT_EQ(normal_interval(1.0, 1.0, 0.0, 1.0), 0.0);
}

TEST(Channel, SlcSigmaConvention) {
  const auto m = make_slc_gaussian(6.0);
  EXPECT_TRUE(m.is_symmetric_slc());
  EXPECT_NEAR(m.spread(0), std::sqrt(1.0 / std::pow(10.0, 0.6)), 1e-14);
  EXPECT_EQ(m.mean(0), -1.0);
  EXPECT_EQ(m.mean(1), 1.0);
}

TEST(Channel, MlcSigmaConvention) {
  const auto m = make_mlc_gaussian_snr(13.76);
  EXPECT_NEAR(m.spread(0), std::sqrt(5.0 / std::pow(10.0, 1.376)), 1e-14);
  EXPECT_NEAR(m.spread(0), 0.458654, 1e-6);
  EXPECT_TRUE(m.is_equal_variance_gaussian());
  EXPECT_FALSE(m.is_symmetric_slc());
}

TEST(Channel, CrossoverRowsMatchQuadrature) {
  const auto m = make_mlc_gaussian_snr(12.0);
  const std::vector<double> th = {-2.3, -2.0, -0.1, 0.0, 0.2, 2.0, 2.4};
  const Dmc d = crossover_probabilities(m, th);
  ASSERT_EQ(d.num_inputs(), 4u);
  ASSERT_EQ(d.num_outputs(), 8u);
  for (std::size_t x = 0; x < 4; ++x) {
    double total = 0.0;
    for (std::size_t y = 0; y < 8; ++y) {
      const double a = y == 0 ? m.mean(x) - 12.0 * m.spread(x) : th[y - 1];
      const double b = y == 7 ? m.mean(x) + 12.0 * m.spread(x) : th[y];
      const double ref = simpson([&](double v) { return m.pdf(x, v); }, a, b);
      EXPECT_NEAR(d(x, y), ref, 1e-10) << x << "," << y;
      total += d(x, y);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Channel, HardThresholdsEqualVarianceAreMidpoints) {
  const auto m = make_mlc_gaussian_snr(14.0);
  const auto th = hard_thresholds(m);
  ASSERT_EQ(th.size(), 3u);
  EXPECT_NEAR(th[0], -2.0, 1e-9);
  EXPECT_NEAR(th[1], 0.0, 1e-9);
  EXPECT_NEAR(th[2], 2.0, 1e-9);
}

TEST(Channel, HardThresholdUnequalVarianceIsDensityCrossing) {
  const ChannelModel m({GaussianLevel{-1.0, 0.3}, GaussianLevel{1.0, 0.6}});
  const auto th = hard_thresholds(m);
  ASSERT_EQ(th.size(), 1u);
  EXPECT_NEAR(m.pdf(0, th[0]), m.pdf(1, th[0]), 1e-10);
  EXPECT_GT(th[0], -1.0);
  EXPECT_LT(th[0], 1.0);
}

TEST(Channel, TabulatedGaussianAgreesWithAnalytic) {
  const auto t = tabulate_gaussian(0.5, 0.8, 4097);
  EXPECT_NEAR(t.mean(), 0.5, 1e-6);
  EXPECT_NEAR(t.stddev(), 0.8, 1e-4);
  for (double v : {-1.0, 0.0, 0.5, 1.7}) EXPECT_NEAR(t.cdf(v), phi_cdf((v - 0.5) / 0.8), 1e-5);
  for (double u : {0.01, 0.3, 0.5, 0.9}) EXPECT_NEAR(t.cdf(t.quantile(u)), u, 1e-9);
}

TEST(Channel, TabulatedRejectsShortGrid) {
  std::vector<double> g(10), f(10, 1.0);
  for (int i = 0; i < 10; ++i) g[i] = i;
  EXPECT_THROW(TabulatedLevel(g, f), std::invalid_argument);
}

TEST(Channel, SamplingMatchesMoments) {
  const auto m = make_mlc_gaussian_snr(13.0);
  std::mt19937_64 rng(5);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double v = m.sample(2, rng);
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  EXPECT_NEAR(mean, 1.0, 5.0 * m.spread(2) / std::sqrt(n));
  EXPECT_NEAR(std::sqrt(s2 / n - mean * mean), m.spread(2), 0.01 * m.spread(2));
}

TEST(Channel, RetentionSurrogateCalibration) {
  const auto model = make_retention_surrogate(RetentionSurrogateParams::calibrated());
  EXPECT_EQ(model.kind(), ChannelKind::Surrogate);
  const auto s = optimize_unconstrained(model, 6);
  EXPECT_NEAR(s.achieved_mi, 1.885, 5e-4);
}

TEST(Channel, InvalidInputsThrow) {
  EXPECT_THROW(make_slc_gaussian(std::nan("")), std::invalid_argument);
  const std::vector<double> three = {-1.0, 0.0, 1.0};
  EXPECT_THROW(make_mlc_gaussian(three, 0.5), std::invalid_argument);
  const std::vector<double> four = {-3.0, -1.0, 1.0, 3.0};
  EXPECT_THROW(make_mlc_gaussian(four, 0.0), std::invalid_argument);
}
