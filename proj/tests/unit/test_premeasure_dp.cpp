#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mixfrac/premeasure_dp.hpp"
#include "support/oracles.hpp"

using namespace mixfrac;

namespace {

WeightedTreeSpec spec(const VectorMeasure& vm, QVector q, double t) { return {vm, std::move(q), t, 12}; }

}  // namespace

TEST(CutOracle, CountsCutsOfTheBinaryTree) {
  EXPECT_EQ(oracle::binary_cuts(1).size(), 2u);
  EXPECT_EQ(oracle::binary_cuts(2).size(), 5u);
  EXPECT_EQ(oracle::binary_cuts(3).size(), 26u);
  EXPECT_EQ(oracle::binary_cuts(4).size(), 677u);
}

TEST(DpCover, Examples) {
  EXPECT_NEAR(dp_cover_value(spec(oracle::uniform1(), {1.0}, 0.0), 3), 0.0, 1e-15);
  EXPECT_NEAR(dp_cover_value(spec(oracle::binomial1(), {2.0}, 0.0), 1), std::log(0.625), 1e-15);
  for (int n = 1; n <= 8; ++n)
    EXPECT_NEAR(dp_cover_value(spec(oracle::uniform1(), {0.0}, 1.0), n), 0.0, 1e-13);
}

TEST(DpPack, Examples) {
  EXPECT_NEAR(dp_pack_value(spec(oracle::binomial1(), {2.0}, 0.0), 1), 0.0, 1e-15);
  EXPECT_NEAR(dp_pack_value(spec(oracle::uniform1(), {1.0}, 0.0), 7), 0.0, 1e-15);
  // five cuts of the depth-2 tree: 1, 2·2, 2 + 4, 4 + 2, 4·4 -> max 16
  EXPECT_NEAR(dp_pack_value(spec(oracle::uniform1(), {0.0}, -1.0), 2), std::log(16.0), 1e-14);
}

TEST(DpOracle, MatchesExhaustiveCutsWithSupportGaps) {
  const VectorMeasure gappy({MeasureComponent::multinomial(2, {0.0, 1.0}), oracle::binom(0.3, 0.7)});
  const VectorMeasure holes({MeasureComponent::empirical({{0.05, 0.3}, {0.3, 0.3}, {0.81, 0.4}})});
  for (const auto* vm : {&gappy, &holes})
    for (double t : {-1.5, 0.0, 2.0})
      for (int min_depth : {0, 1, 2}) {
        const QVector q(vm->dimension(), 1.5);
        const auto ex = oracle::enumerate_cuts(*vm, q, t, 4, min_depth);
        EXPECT_NEAR(dp_cover_value(spec(*vm, q, t), 4, min_depth), ex.log_min, 1e-12);
        EXPECT_NEAR(dp_pack_value(spec(*vm, q, t), 4, min_depth), ex.log_max, 1e-12);
      }
}

TEST(DpOracle, EmptySupport) {
  const VectorMeasure disjoint({MeasureComponent::multinomial(2, {1.0, 0.0}),
                                MeasureComponent::multinomial(2, {0.0, 1.0})});
  EXPECT_THROW(dp_cover_value(spec(disjoint, {1.0, 1.0}, 0.0), 2), Error);
  EXPECT_THROW(dp_cover_value(spec(oracle::uniform1(), {1.0}, 0.0), 13), Error);
}

TEST(GrowthRate, LinearInTForMultinomials) {
  for (const auto& vm : oracle::fixtures()) {
    const QVector q(vm.dimension(), 0.7);
    const CascadeTree tree(vm, q, 10);
    for (double t : {-3.0, 0.0, 2.5})
      for (bool maximize : {false, true})
        EXPECT_NEAR(dp_growth_rate(tree, t, 10, maximize),
                    oracle::tau(vm, q) * std::log(2.0) - t * std::log(2.0), 1e-10);
  }
}

TEST(CriticalExponent, Examples) {
  const auto u = critical_exponent(oracle::uniform1(), {0.0}, ExponentKind::hausdorff_b);
  EXPECT_NEAR(u.value, 1.0, 1e-4);
  EXPECT_LT(u.t_low, u.value);
  EXPECT_GT(u.t_high, u.value);
  EXPECT_LE(u.t_high - u.t_low, 1e-4 + 1e-12);
  const auto b = critical_exponent(oracle::binomial1(), {2.0}, ExponentKind::packing_B);
  EXPECT_NEAR(b.value, std::log2(10.0 / 16.0), 1e-4);
  for (const auto& vm : oracle::fixtures())
    for (std::size_t i = 0; i < vm.dimension(); ++i)
      for (auto kind : {ExponentKind::hausdorff_b, ExponentKind::packing_B, ExponentKind::prepacking_Lambda})
        EXPECT_NEAR(critical_exponent(vm, QVector::unit(vm.dimension(), i), kind).value, 0.0, 1e-4);
}

TEST(CriticalExponent, NoBracketOutsideRange) {
  ExponentOptions o;
  o.t_min = 2.0;
  o.t_max = 3.0;
  try {
    critical_exponent(oracle::uniform1(), {0.0}, ExponentKind::hausdorff_b, o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoBracket);
  }
}

TEST(CriticalExponent, CsvAndThreads) {
  const auto grid = oracle::cube_grid(2, -2.0, 2.0, 5);
  const ExponentKind kinds[] = {ExponentKind::hausdorff_b, ExponentKind::packing_B};
  const auto a = critical_exponents(oracle::mixed2(), grid, kinds, {}, 1);
  const auto b = critical_exponents(oracle::mixed2(), grid, kinds, {}, 3);
  EXPECT_EQ(exponents_to_csv(a), exponents_to_csv(b));
  const auto csv = exponents_to_csv(a);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "q_1,q_2,kind,t_star,t_low,t_high,depth");
}

TEST(Besicovitch, Examples) {
  const auto u = besicovitch_check(oracle::uniform1(), {1.0}, 0.0, 6);
  EXPECT_NEAR(u.slack, std::log(2.0), 1e-14);
  EXPECT_TRUE(u.holds);
  const auto b = besicovitch_check(oracle::binomial1(), {2.0}, 0.0, 1);
  EXPECT_NEAR(b.cover, std::log(0.625), 1e-15);
  EXPECT_NEAR(b.pack, 0.0, 1e-15);
  EXPECT_TRUE(b.holds);
  EXPECT_THROW(besicovitch_check(oracle::uniform1(), {1.0}, 0.0, 3, 0.5), Error);
}

TEST(Besicovitch, SeededSweepHasNoViolations) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> qd(-3.0, 3.0), td(-2.0, 2.0);
  for (const auto& vm : oracle::fixtures())
    for (int s = 0; s < 100; ++s) {
      QVector q(vm.dimension(), 0.0);
      for (std::size_t j = 0; j < q.size(); ++j) q[j] = qd(rng);
      EXPECT_TRUE(besicovitch_check(vm, q, td(rng), 8).holds);
    }
}

TEST(Additivity, Examples) {
  const auto u = separated_additivity_check(oracle::uniform1(), {1.0}, 0.0, 1, {0, 1});
  EXPECT_TRUE(u.holds);
  EXPECT_NEAR(u.union_value, 0.0, 1e-15);
  const auto b = separated_additivity_check(oracle::binomial1(), {2.0}, 0.0, 2, {0, 1});
  EXPECT_TRUE(b.holds);
  EXPECT_NEAR(b.union_value, std::log(0.625), 1e-15);
  for (double t : {-1.0, 0.0, 1.0})
    EXPECT_TRUE(separated_additivity_check(oracle::mixed2(), {1.0, 1.0}, t, 6, {0, 1}).holds);
}

TEST(Additivity, BadSplit) {
  const VectorMeasure right({MeasureComponent::multinomial(2, {0.0, 1.0})});
  for (auto cells : {std::array<std::uint64_t, 2>{0, 1}, std::array<std::uint64_t, 2>{1, 1},
                     std::array<std::uint64_t, 2>{0, 2}}) {
    try {
      separated_additivity_check(cells[1] == 2 ? oracle::uniform1() : right, {1.0}, 0.0, 3, cells);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::BadSplit);
    }
  }
}
