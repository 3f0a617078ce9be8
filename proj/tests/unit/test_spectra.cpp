#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "mixfrac/spectra.hpp"
#include "support/oracles.hpp"

using namespace mixfrac;

namespace {

std::vector<QVector> line(double lo, double hi, double step) {
  std::vector<QVector> out;
  for (int i = 0; lo + i * step <= hi + 1e-12; ++i) out.push_back(QVector{lo + i * step});
  return out;
}

SpectrumCurve oracle_curve(const VectorMeasure& vm, std::vector<QVector> grid, CurveKind kind = CurveKind::B) {
  SpectrumCurve c;
  c.kind = kind;
  c.q_grid = std::move(grid);
  for (const auto& q : c.q_grid) c.values.push_back(oracle::tau(vm, q));
  return c;
}

// -τ'(q) for a single binomial, written from the closed form.
double alpha_of(double p0, double q) {
  const double a = std::pow(p0, q), b = std::pow(1.0 - p0, q);
  return -(a * std::log2(p0) + b * std::log2(1.0 - p0)) / (a + b);
}

}  // namespace

TEST(SlopeEstimates, Examples) {
  const std::vector<QVector> q0{{0.0}}, q2{{2.0}}, q1{{1.0}};
  const MomentKind cover[] = {MomentKind::cover};
  const auto u = slope_estimates(build_moment_table(oracle::uniform1(), q0, {4, 10}, cover), {0.0},
                                 MomentKind::cover);
  EXPECT_NEAR(u.lower, 1.0, 1e-12);
  EXPECT_NEAR(u.upper, 1.0, 1e-12);
  EXPECT_NEAR(u.lsq, 1.0, 1e-12);
  const auto b = slope_estimates(build_moment_table(oracle::binomial1(), q2, {4, 12}, cover), {2.0},
                                 MomentKind::cover);
  for (double s : {b.lower, b.upper, b.lsq}) EXPECT_NEAR(s, std::log2(10.0 / 16.0), 1e-9);
  const VectorMeasure atoms({MeasureComponent::empirical({{0.1, 0.2}, {0.45, 0.3}, {0.9, 0.5}})});
  const auto e = slope_estimates(build_moment_table(atoms, q1, {8, 14}, cover), {1.0}, MomentKind::cover);
  EXPECT_NEAR(e.lower, 0.0, 1e-12);
  EXPECT_NEAR(e.upper, 0.0, 1e-12);
}

TEST(SlopeEstimates, NeedsThreeDepths) {
  const std::vector<QVector> q{{1.0}};
  const MomentKind cover[] = {MomentKind::cover};
  try {
    slope_estimates(build_moment_table(oracle::binomial1(), q, {4, 5}, cover), {1.0}, MomentKind::cover);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientDepths);
  }
}

TEST(AnalyticTau, Examples) {
  for (double q : {-3.0, -0.5, 0.0, 1.0, 2.5}) EXPECT_NEAR(analytic_tau_multinomial(oracle::uniform1(), {q}), 1 - q, 1e-14);
  EXPECT_NEAR(analytic_tau_multinomial(oracle::mixed2(), {1.0, 1.0}), -1.0, 1e-14);
  for (const auto& vm : oracle::fixtures()) {
    for (std::size_t i = 0; i < vm.dimension(); ++i)
      EXPECT_NEAR(analytic_tau_multinomial(vm, QVector::unit(vm.dimension(), i)), 0.0, 1e-15);
    for (const auto& q : oracle::cube_grid(vm.dimension(), -3.0, 3.0, 4))
      EXPECT_NEAR(analytic_tau_multinomial(vm, q), oracle::tau(vm, q), 1e-12);
  }
}

TEST(AnalyticTau, ZeroWeights) {
  const VectorMeasure gap({MeasureComponent::multinomial(3, {0.5, 0.0, 0.5})});
  EXPECT_NEAR(analytic_tau_multinomial(gap, {0.0}), std::log(2.0) / std::log(3.0), 1e-15);
  try {
    analytic_tau_multinomial(gap, {-1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroWeightWithNegativeQ);
  }
  const VectorMeasure atoms({MeasureComponent::empirical({{0.3, 1.0}})});
  EXPECT_THROW(analytic_tau_multinomial(atoms, {1.0}), Error);
}

// The sign rule "τ >= 0 whenever every q_i < 1" is false for k >= 2:
// at q = (1/2, 1/2) the fixture gives log2(sqrt(1/6) + sqrt(1/3)) < 0.
// Grid points with all q_i <= 0 still satisfy it.
TEST(AnalyticTau, SignRuleFailsInsideTheUnitCube) {
  const double v = analytic_tau_multinomial(oracle::mixed2(), {0.5, 0.5});
  EXPECT_NEAR(v, std::log2(std::sqrt(1.0 / 6.0) + std::sqrt(1.0 / 3.0)), 1e-14);
  EXPECT_LT(v, 0.0);
  for (const auto& vm : oracle::fixtures())
    for (const auto& q : oracle::cube_grid(vm.dimension(), -3.0, 0.0, 4))
      EXPECT_GE(analytic_tau_multinomial(vm, q), 0.0);
}

TEST(Gradients, CentralDifferencesAndInteriorFlags) {
  auto c = oracle_curve(oracle::mixed2(), oracle::cube_grid(2, -1.0, 1.0, 3));
  compute_gradients(c);
  ASSERT_EQ(c.gradients.size(), 9u);
  const std::size_t mid = c.find({0.0, 0.0});
  ASSERT_NE(mid, SpectrumCurve::npos);
  EXPECT_TRUE(c.interior[mid]);
  EXPECT_FALSE(c.interior[c.find({-1.0, 0.0})]);
  const double h = 1.0;
  EXPECT_NEAR(c.gradients[mid][0], (oracle::tau(oracle::mixed2(), {h, 0.0}) - oracle::tau(oracle::mixed2(), {-h, 0.0})) / 2, 1e-14);
  const auto csv = c.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "q_1,q_2,value,grad_1,grad_2");
}

TEST(Legendre, UniformCollapsesToOnePoint) {
  const auto s = legendre_transform(oracle_curve(oracle::uniform1(), line(-3, 3, 1)));
  EXPECT_TRUE(s.degenerate);
  ASSERT_EQ(s.alpha_grid.size(), 1u);
  EXPECT_NEAR(s.alpha_grid[0][0], 1.0, 1e-12);
  EXPECT_NEAR(s.f_values[0], 1.0, 1e-12);
}

TEST(Legendre, BinomialTangencies) {
  const auto vm = oracle::binomial1();
  const double a0 = -(std::log2(0.25) + std::log2(0.75)) / 2;
  const double a1 = alpha_of(0.25, 1.0);
  EXPECT_NEAR(a0, 1.2075, 1e-4);
  EXPECT_NEAR(a1, 0.8113, 1e-4);
  const std::vector<QVector> alphas{{a0}, {a1}};
  const auto s = legendre_transform(oracle_curve(vm, line(-3, 3, 0.25)), alphas);
  EXPECT_NEAR(s.f_values[0], 1.0, 1e-12);
  EXPECT_NEAR(s.f_values[1], a1, 1e-12);
  EXPECT_NEAR(s.hull_distance, 0.0, 1e-12);
  EXPECT_TRUE(s.in_domain[0]);
}

TEST(Legendre, ConjugateAtGridGradients) {
  for (const auto& vm : oracle::fixtures()) {
    const double step = vm.dimension() == 1 ? 0.25 : (vm.dimension() == 2 ? 1.0 : 1.5);
    const int per_axis = static_cast<int>(std::lround(6.0 / step)) + 1;
    auto c = oracle_curve(vm, oracle::cube_grid(vm.dimension(), -3.0, 3.0, per_axis));
    compute_gradients(c);
    std::vector<QVector> alphas;
    std::vector<double> expect;
    for (std::size_t i = 0; i < c.q_grid.size(); ++i) {
      if (!c.interior[i]) continue;
      QVector a = c.gradients[i];
      for (auto& v : a) v = -v;
      alphas.push_back(a);
      expect.push_back(dot(a, c.q_grid[i]) + c.values[i]);
    }
    const auto s = legendre_transform(c, alphas);
    for (std::size_t i = 0; i < alphas.size(); ++i) EXPECT_LE(std::abs(s.f_values[i] - expect[i]), 2 * step);
  }
}

TEST(Legendre, Errors) {
  SpectrumCurve bent;
  bent.q_grid = line(-1, 1, 1);
  bent.values = {0.0, 1.0, 0.0};
  try {
    legendre_transform(bent);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonConvexBeyondTolerance);
  }
  bent.values = {0.0, 0.01, 0.0};
  EXPECT_NEAR(legendre_transform(bent).hull_distance, 0.01, 1e-15);
  bent.kind = CurveKind::Cbar;
  EXPECT_THROW(legendre_transform(bent), Error);
}

TEST(LevelSet, Examples) {
  const auto c = oracle_curve(oracle::uniform1(), line(-3, 3, 1));
  auto one = level_set_upper_bound(c, c, {1.0});
  EXPECT_NEAR(one.dim_bound, 1.0, 1e-14);
  EXPECT_FALSE(one.empty_flag);
  EXPECT_TRUE(level_set_upper_bound(c, c, {2.0}).empty_flag);

  const auto bc = oracle_curve(oracle::binomial1(), line(-3, 3, 0.25));
  const double a1 = alpha_of(0.25, 1.0);
  EXPECT_NEAR(level_set_upper_bound(bc, bc, {a1}).dim_bound, a1, 0.25);

  auto other = c;
  other.q_grid.pop_back();
  other.values.pop_back();
  try {
    level_set_upper_bound(c, other, {1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
  }
  EXPECT_THROW(level_set_upper_bound(c, c, {-0.5}), Error);
}

TEST(LocalDimension, Examples) {
  const auto u = local_dimension(oracle::uniform1(), 1.0 / 3.0, {4, 14});
  EXPECT_NEAR(u.lower[0], 1.0, 1e-9);
  EXPECT_NEAR(u.upper[0], 1.0, 1e-9);
  const auto z = local_dimension(oracle::binomial1(), 0.0, {4, 14});
  EXPECT_NEAR(z.lower[0], 2.0, 1e-9);
  EXPECT_NEAR(z.upper[0], 2.0, 1e-9);
  const auto o = local_dimension(oracle::binomial1(), 1.0, {4, 14});
  EXPECT_NEAR(o.lower[0], std::log2(4.0 / 3.0), 1e-9);
  EXPECT_NEAR(o.upper[0], std::log2(4.0 / 3.0), 1e-9);
}

TEST(LocalDimension, Errors) {
  const VectorMeasure right({MeasureComponent::multinomial(2, {0.0, 1.0})});
  try {
    local_dimension(right, 0.1, {4, 8});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutsideSupport);
  }
  EXPECT_THROW(local_dimension(oracle::uniform1(), 0.5, {4, 4}), Error);
}

TEST(Coarse, UniformHasOneBin) {
  const auto s = coarse_spectrum(oracle::uniform1(), 8, 0.05);
  ASSERT_EQ(s.bins.size(), 1u);
  EXPECT_EQ(s.bins[0].count, 256u);
  EXPECT_NEAR(s.bins[0].value, 1.0, 1e-15);
  EXPECT_NEAR(s.bins[0].center[0], 1.0, 0.05);
  EXPECT_THROW(coarse_spectrum(oracle::uniform1(), 3, 0.05), Error);
}

// Cells with z zero-digits share α = (2z + (n-z) log2(4/3)) / n; there are
// C(n, z) of them.
TEST(Coarse, BinomialClassesAndUpperEnvelope) {
  const int n = 12;
  const double w = 0.05;
  const auto s = coarse_spectrum(oracle::binomial1(), n, w);
  std::map<std::int64_t, double> expect;
  for (int z = 0; z <= n; ++z) {
    const double a = (2.0 * z + (n - z) * std::log2(4.0 / 3.0)) / n;
    const auto bin = static_cast<std::int64_t>(std::floor(a / w + 1e-9));
    expect[bin] += std::exp(std::lgamma(n + 1.0) - std::lgamma(z + 1.0) - std::lgamma(n - z + 1.0));
  }
  ASSERT_EQ(s.bins.size(), expect.size());
  const auto c = oracle_curve(oracle::binomial1(), line(-3, 3, 0.25));
  for (const auto& bin : s.bins) {
    EXPECT_NEAR(bin.value, std::log2(expect.at(bin.index[0])) / n, 1e-12);
    const std::vector<QVector> at{bin.center};
    EXPECT_LE(bin.value, legendre_transform(c, at).f_values[0] + 0.05);
  }
}

TEST(Coarse, MixedBinsStayInTheGradientBox) {
  const auto vm = oracle::mixed2();
  const double w = 0.05;
  const auto s = coarse_spectrum(vm, 10, w);
  for (const auto& bin : s.bins)
    for (std::size_t j = 0; j < 2; ++j) {
      const double lo = std::min(-std::log2(vm[j].weights()[0]), -std::log2(vm[j].weights()[1]));
      const double hi = std::max(-std::log2(vm[j].weights()[0]), -std::log2(vm[j].weights()[1]));
      EXPECT_GE(bin.center[j], lo - w);
      EXPECT_LE(bin.center[j], hi + w);
    }
}

TEST(Taylor, Examples) {
  EXPECT_TRUE(taylor_check(1.0, 1.0, 0.01));
  EXPECT_TRUE(taylor_check(0.63, 0.63, 0.01));
  EXPECT_FALSE(taylor_check(0.5, 0.7, 0.01));
}
