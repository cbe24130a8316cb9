#include <gtest/gtest.h>

#include <numeric>

#include "flashmmi/degree_distribution.hpp"

using namespace flashmmi;

TEST(DegreeDistribution, RegularThreeSix) {
  const DegreeDistribution dd({{3, 1.0}}, {{6, 1.0}});
  EXPECT_DOUBLE_EQ(dd.design_rate(), 0.5);
  EXPECT_EQ(dd.max_variable_degree(), 3);
  EXPECT_EQ(dd.max_check_degree(), 6);
  EXPECT_DOUBLE_EQ(dd.variable_node_fractions()[0], 1.0);
}

TEST(DegreeDistribution, BuiltinsHaveDeclaredRate) {
  for (int id : {1, 2, 3}) {
    const auto dd = DegreeDistribution::builtin(id);
    EXPECT_NEAR(dd.design_rate(), 0.9021, DegreeDistribution::kRateTolerance);
    const auto v = dd.variable_node_fractions();
    const auto c = dd.check_node_fractions();
    EXPECT_NEAR(std::accumulate(v.begin(), v.end(), 0.0), 1.0, 1e-12);
    EXPECT_NEAR(std::accumulate(c.begin(), c.end(), 0.0), 1.0, 1e-12);
  }
  EXPECT_THROW(DegreeDistribution::builtin(4), std::invalid_argument);
  EXPECT_FALSE(DegreeDistribution::builtin(2).has_variable_degree(3));
  EXPECT_TRUE(DegreeDistribution::builtin(1).has_variable_degree(3));
}

TEST(DegreeDistribution, NodeFractionsByHand) {
  // lambda = 0.5 x + 0.5 x^2: node fractions proportional to 1/2 and 1/3
  const DegreeDistribution dd({{2, 0.5}, {3, 0.5}}, {{6, 1.0}});
  const auto v = dd.variable_node_fractions();
  EXPECT_NEAR(v[0], 0.6, 1e-15);
  EXPECT_NEAR(v[1], 0.4, 1e-15);
  EXPECT_NEAR(dd.design_rate(), 1.0 - (1.0 / 6.0) / (0.5 / 2 + 0.5 / 3), 1e-15);
}

TEST(DegreeDistribution, NormalizesAndSorts) {
  const DegreeDistribution dd({{4, 0.50004}, {2, 0.5}}, {{8, 1.0}});
  EXPECT_EQ(dd.lambda()[0].degree, 2);
  EXPECT_NEAR(dd.lambda()[0].fraction + dd.lambda()[1].fraction, 1.0, 1e-15);
}

TEST(DegreeDistribution, RejectsBadInput) {
  EXPECT_THROW(DegreeDistribution({}, {{6, 1.0}}), std::invalid_argument);
  EXPECT_THROW(DegreeDistribution({{3, 0.5}, {3, 0.5}}, {{6, 1.0}}), std::invalid_argument);
  EXPECT_THROW(DegreeDistribution({{3, 0.9}}, {{6, 1.0}}), std::invalid_argument);
  EXPECT_THROW(DegreeDistribution({{0, 1.0}}, {{6, 1.0}}), std::invalid_argument);
  EXPECT_THROW(DegreeDistribution({{3, 1.0}}, {{6, 1.0}}, 0.9), std::invalid_argument);
}

TEST(DegreeDistribution, DropsDegreeOne) {
  const auto dd = DegreeDistribution::builtin(2).without_degree_one();
  EXPECT_FALSE(dd.has_variable_degree(1));
  EXPECT_EQ(dd.lambda().front().degree, 2);
  double s = 0.0;
  for (const auto& t : dd.lambda()) s += t.fraction;
  EXPECT_NEAR(s, 1.0, 1e-15);
}
