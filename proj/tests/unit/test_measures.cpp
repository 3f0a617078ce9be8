#include <gtest/gtest.h>

#include <cmath>

#include "mixfrac/measures.hpp"
#include "support/oracles.hpp"

using namespace mixfrac;

TEST(Multinomial, UniformCellsHaveMassTwoToMinusN) {
  const auto u = MeasureComponent::multinomial(2, {0.5, 0.5});
  for (int n = 0; n <= 10; ++n)
    for (std::uint64_t i : {std::uint64_t{0}, (std::uint64_t{1} << n) - 1})
      EXPECT_DOUBLE_EQ(cell_mass(u, {2, n, i}), std::ldexp(1.0, -n));
}

TEST(Multinomial, CellMassIsProductOfDigitWeights) {
  const auto m = MeasureComponent::multinomial(2, {0.25, 0.75});
  EXPECT_DOUBLE_EQ(cell_mass(m, {2, 2, 3}), 0.5625);
  EXPECT_DOUBLE_EQ(cell_mass(m, {2, 1, 0}), 0.25);
  EXPECT_DOUBLE_EQ(cell_mass(m, {2, 0, 0}), 1.0);
  const auto t = MeasureComponent::multinomial(3, {0.2, 0.3, 0.5});
  EXPECT_NEAR(cell_mass(t, {3, 3, 2 * 9 + 0 * 3 + 1}), 0.5 * 0.2 * 0.3, 1e-15);
}

TEST(Multinomial, RejectsBadWeights) {
  try {
    MeasureComponent::multinomial(2, {0.3, 0.6});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonProbabilityWeights);
  }
  try {
    MeasureComponent::multinomial(1, {1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadBase);
  }
  EXPECT_THROW(MeasureComponent::multinomial(2, {-0.5, 1.5}), Error);
  EXPECT_NO_THROW(MeasureComponent::multinomial(2, {0.5 + 5e-10, 0.5}));
}

TEST(CellMass, AdditiveOverChildren) {
  const auto m = MeasureComponent::multinomial(3, {0.1, 0.6, 0.3});
  const auto e = MeasureComponent::empirical({{0.1, 0.2}, {0.5, 0.3}, {0.77, 0.5}});
  for (const auto* c : {&m, &e})
    for (int n = 0; n < 6; ++n)
      for (std::uint64_t i = 0; i < cell_count(3, n); ++i) {
        double sum = 0.0;
        for (int d = 0; d < 3; ++d) sum += cell_mass(*c, DyadicCell{3, n, i}.child(d));
        EXPECT_NEAR(sum, cell_mass(*c, {3, n, i}), 1e-15);
      }
}

TEST(CellMass, EmpiricalAtomsFallInHalfOpenCells) {
  const auto e = MeasureComponent::empirical({{0.1, 0.4}, {0.9, 0.6}});
  EXPECT_DOUBLE_EQ(cell_mass(e, {2, 1, 0}), 0.4);
  EXPECT_DOUBLE_EQ(cell_mass(e, {2, 1, 1}), 0.6);
  const auto edge = MeasureComponent::empirical({{0.5, 0.5}, {1.0, 0.5}});
  EXPECT_DOUBLE_EQ(cell_mass(edge, {2, 1, 0}), 0.0);
  EXPECT_DOUBLE_EQ(cell_mass(edge, {2, 1, 1}), 1.0);  // x = 1 belongs to the last cell
}

TEST(CellMass, LogMassDeepInCascade) {
  const auto m = MeasureComponent::multinomial(2, {0.25, 0.75});
  const DyadicCell deep{2, 50, (std::uint64_t{1} << 49) + 5};
  double expected = 0.0;
  for (int d : deep.digits()) expected += std::log(d ? 0.75 : 0.25);
  EXPECT_NEAR(cell_log_mass(m, deep), expected, 1e-12);
  const auto levels = log_cell_masses(m, 2, 6);
  for (std::uint64_t i = 0; i < 64; ++i) EXPECT_NEAR(levels[i], std::log(cell_mass(m, {2, 6, i})), 1e-13);
}

TEST(BallMass, ClosedBallsOnTheGrid) {
  const auto u = MeasureComponent::multinomial(2, {0.5, 0.5});
  const auto m = MeasureComponent::multinomial(2, {0.25, 0.75});
  EXPECT_NEAR(ball_mass(u, 0.5, 0.25), 0.5, 1e-15);
  EXPECT_NEAR(ball_mass(m, 1.0, 0.5), 0.75, 1e-15);
  EXPECT_NEAR(ball_mass(m, 0.5, 0.5), 1.0, 1e-15);
  for (int n = 1; n < 20; ++n) EXPECT_NEAR(ball_mass(m, 0.0, std::ldexp(1.0, -n)), std::pow(0.25, n), 1e-15);
}

TEST(BallMass, NonTerminatingExpansionsConverge) {
  const auto u = MeasureComponent::multinomial(2, {0.5, 0.5});
  EXPECT_NEAR(ball_mass(u, 1.0 / 3.0, 0.1), 0.2, 1e-14);
  const auto m = MeasureComponent::multinomial(2, {0.25, 0.75});
  // left mass of 1/3 = 0.010101...: closed form 0.25·0.75 / (1 - 0.25·0.75)·... checked by cells
  double brute = 0.0;
  for (std::uint64_t i = 0; i < (1u << 20); ++i)
    if ((i + 1) * std::ldexp(1.0, -20) <= 1.0 / 3.0) brute += cell_mass(m, {2, 20, i});
  EXPECT_NEAR(left_open_mass(m, 1.0 / 3.0), brute, 1e-6);
}

TEST(BallMass, EmpiricalIncludesBoundaryAtoms) {
  const auto e = MeasureComponent::empirical({{0.25, 0.5}, {0.75, 0.5}});
  EXPECT_DOUBLE_EQ(ball_mass(e, 0.5, 0.25), 1.0);
  EXPECT_DOUBLE_EQ(ball_mass(e, 0.5, 0.2), 0.0);
  EXPECT_DOUBLE_EQ(cdf(e, 0.25), 0.5);
  EXPECT_DOUBLE_EQ(left_open_mass(e, 0.25), 0.0);
}

TEST(JointSupport, CountsAndOrdering) {
  EXPECT_EQ(joint_support_cells(oracle::uniform1(), 2).size(), 4u);
  const VectorMeasure point({MeasureComponent::multinomial(2, {0.0, 1.0})});
  const auto cells = joint_support_cells(point, 3);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_EQ(cells[0].index, 7u);
  const VectorMeasure disjoint({MeasureComponent::multinomial(2, {1.0, 0.0}),
                                MeasureComponent::multinomial(2, {0.0, 1.0})});
  try {
    joint_support_cells(disjoint, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptySupport);
  }
  EXPECT_THROW(joint_support_cells(oracle::uniform1(), 25), Error);
}

TEST(VectorMeasureTest, BaseInferenceAndMismatch) {
  EXPECT_EQ(oracle::mixed3().base(), 2);
  EXPECT_THROW(VectorMeasure({MeasureComponent::multinomial(2, {0.5, 0.5}),
                              MeasureComponent::multinomial(3, {0.2, 0.3, 0.5})}),
               Error);
  const VectorMeasure e({MeasureComponent::empirical({{0.3, 1.0}})}, 3);
  EXPECT_EQ(e.base(), 3);
}

TEST(Doubling, UniformIsP1WithRatioTwo) {
  const auto r = estimate_doubling(oracle::uniform1(), 2.0, {4, 10}, 64);
  EXPECT_EQ(r.classification, DoublingReport::Class::P1);
  EXPECT_NEAR(r.components[0].max_ratio, 2.0, 1e-9);
}

TEST(Doubling, SingleAtomHasRatioOne) {
  const VectorMeasure atom({MeasureComponent::empirical({{0.5, 1.0}})});
  const auto r = estimate_doubling(atom, 2.0, {4, 10}, 16);
  EXPECT_EQ(r.classification, DoublingReport::Class::P1);
  EXPECT_DOUBLE_EQ(r.components[0].max_ratio, 1.0);
}

// The estimator's maxima are finite and its two deepest levels do not grow,
// so the sampled rule tags the binomial P1. Off the sample set the binomial
// is not doubling: a ball just right of 1/2 holds 0.75·0.25^(n-1) while its
// 4x enlargement reaches the heavy cell 0.25·0.75^(n-1) on the left. What is
// bounded is the dyadic ancestor ratio, by (min weight)^-ceil(log_b a).
TEST(Doubling, BinomialSampledRuleVersusExactBalls) {
  const auto vm = oracle::binomial1();
  const auto r = estimate_doubling(vm, 4.0, {4, 10}, 256);
  EXPECT_TRUE(std::isfinite(r.components[0].max_ratio));
  EXPECT_EQ(r.classification, DoublingReport::Class::P1);

  double prev = 0.0;
  for (int n = 6; n <= 14; n += 2) {
    const double rad = std::ldexp(1.0, -n) / 2;
    const double ratio = ball_mass(vm[0], 0.5 + rad, 4 * rad) / ball_mass(vm[0], 0.5 + rad, rad);
    EXPECT_GT(ratio, 2 * prev);
    prev = ratio;
  }
  EXPECT_GT(prev, 1e4);

  const int up = static_cast<int>(std::ceil(std::log(4.0) / std::log(2.0)));
  const double bound = std::pow(0.25, -up);
  double worst = 0.0;
  for (int n = up; n <= 12; ++n)
    for (std::uint64_t i = 0; i < cell_count(2, n); ++i) {
      DyadicCell anc{2, n, i};
      for (int s = 0; s < up; ++s) anc = anc.parent();
      worst = std::max(worst, cell_mass(vm[0], anc) / cell_mass(vm[0], {2, n, i}));
    }
  EXPECT_NEAR(worst, bound, 1e-9);
}

TEST(Cells, GeometryAndDigits) {
  const DyadicCell c{3, 2, 7};
  EXPECT_DOUBLE_EQ(c.lower(), 7.0 / 9.0);
  EXPECT_DOUBLE_EQ(c.diameter(), 1.0 / 9.0);
  EXPECT_EQ(c.digits(), (std::vector<int>{2, 1}));
  EXPECT_EQ(c.child(2).parent(), c);
  EXPECT_EQ(cell_index_of(1.0, 2, 4), 15u);
  EXPECT_THROW(validate_cell({2, 3, 8}), Error);
}
