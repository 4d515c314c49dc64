#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "bwa/fixtures.hpp"
#include "bwa/hypothesis.hpp"

using namespace bwa;

namespace {
constexpr Interval kUnit{0.0, 1.0};
const Domain kUnitDomain{{kUnit}, kUnit};
}  // namespace

TEST(Hypothesis, OutputsAreClampedToY) {
  const auto h = affine_hypothesis(0, {2.0}, -0.5, kUnit);
  const std::vector<double> lo{0.0}, mid{0.5}, hi{1.0};
  EXPECT_DOUBLE_EQ(h(lo), 0.0);
  EXPECT_DOUBLE_EQ(h(mid), 0.5);
  EXPECT_DOUBLE_EQ(h(hi), 1.0);
  EXPECT_DOUBLE_EQ(constant_hypothesis(1, 3.0, kUnit)(mid), 1.0);
}

TEST(Hypothesis, TableUsesNearestPointLowestIndexOnTies) {
  const auto h = table_hypothesis(0, {{0.0}, {1.0}}, {0.2, 0.8}, kUnit);
  const std::vector<double> a{0.1}, b{0.9}, tie{0.5};
  EXPECT_DOUBLE_EQ(h(a), 0.2);
  EXPECT_DOUBLE_EQ(h(b), 0.8);
  EXPECT_DOUBLE_EQ(h(tie), 0.2);
}

TEST(HypothesisSpace, ValidatesPriorAndIds) {
  std::vector<Hypothesis> two{constant_hypothesis(0, 0.1, kUnit), constant_hypothesis(1, 0.2, kUnit)};
  EXPECT_THROW(FiniteHypothesisSpace::create(two, {0.5, 0.6}, kUnitDomain), std::invalid_argument);
  EXPECT_THROW(FiniteHypothesisSpace::create(two, {1.2, -0.2}, kUnitDomain), std::invalid_argument);
  EXPECT_THROW(FiniteHypothesisSpace::create(two, {1.0}, kUnitDomain), std::invalid_argument);
  std::vector<Hypothesis> dup{constant_hypothesis(3, 0.1, kUnit), constant_hypothesis(3, 0.2, kUnit)};
  EXPECT_THROW(FiniteHypothesisSpace::uniform(dup, kUnitDomain), std::invalid_argument);
  const auto s = FiniteHypothesisSpace::uniform(two, kUnitDomain);
  EXPECT_EQ(s.index_of(1), 1u);
  EXPECT_THROW((void)s.index_of(7), std::out_of_range);
}

TEST(HypothesisSpace, ReferenceFixtureQuantities) {
  const auto f = make_fixture("reference");
  const auto pi = stationary_distribution(f.chain).probabilities;
  const auto l = expected_losses(f.space, f.chain, pi);
  const std::vector<double> want{0.05, 0.095, 0.37, 0.365, 0.36};
  ASSERT_EQ(l.size(), want.size());
  for (std::size_t i = 0; i < l.size(); ++i) EXPECT_NEAR(l[i], want[i], 1e-12) << i;
  EXPECT_NEAR(optimal_loss_gamma_star(f.space, f.chain, pi), 0.05, 1e-12);
  EXPECT_NEAR(good_volume_V_eps(f.space, f.chain, pi, 0.075), 0.4, 1e-12);
  EXPECT_NEAR(good_volume_V_eps(f.space, f.chain, pi, 0.15), 0.4, 1e-12);
  EXPECT_NEAR(good_volume_V_eps(f.space, f.chain, pi, 0.32), 1.0, 1e-12);
  const auto ml = constants_ML(f.space, f.chain);
  EXPECT_NEAR(ml.M, 0.4, 1e-12);
}

TEST(HypothesisSpace, GammaStarIgnoresZeroPriorHypotheses) {
  const std::vector<double> loss{0.01, 0.2, 0.3}, prior{0.0, 0.5, 0.5};
  EXPECT_DOUBLE_EQ(optimal_loss_gamma_star(loss, prior), 0.2);
  EXPECT_DOUBLE_EQ(good_volume_V_eps(loss, prior, 0.05), 0.5);
}

TEST(HypothesisSpace, ExpectedLossMatchesHandSum) {
  const auto f = make_fixture("two_state");
  const auto pi = stationary_distribution(f.chain).probabilities;
  // constant 0.4 against targets (0.2, 0.8) with pi = (5/6, 1/6)
  EXPECT_NEAR(expected_loss(f.space.hypothesis(1), f.chain, pi), 5.0 / 6.0 * 0.2 + 1.0 / 6.0 * 0.4, 1e-12);
}

TEST(HypothesisSpace, EmpiricalLossOfPath) {
  const auto f = make_fixture("two_state");
  Trajectory t;
  t.points = {f.chain.state(0), f.chain.state(1), f.chain.state(1)};
  EXPECT_NEAR(empirical_loss(f.space.hypothesis(0), t), (0.0 + 0.6 + 0.6) / 3.0, 1e-12);
  EXPECT_THROW(empirical_loss(f.space.hypothesis(0), Trajectory{}), std::invalid_argument);
}

TEST(Covering, FiniteTakesMinimumWithCardinality) {
  const SpaceCapacity cap{1.0, 1.0, 1.0, 1, 1.0};
  EXPECT_DOUBLE_EQ(covering_number_bound(SpaceKind::finite, 0.01, cap, 5), 5.0);
  EXPECT_NEAR(covering_number_bound(SpaceKind::finite, 2.0, cap, 5), std::exp(0.25), 1e-12);
  EXPECT_NEAR(covering_number_bound(SpaceKind::parametric, 2.0, cap, 0), std::exp(0.25), 1e-12);
  // the log form stays finite where the bound itself overflows
  const double lg = log_covering_number_bound(SpaceKind::parametric, 1e-4, cap, 0);
  EXPECT_NEAR(lg, 1e8, 1e-4);
  EXPECT_TRUE(std::isinf(covering_number_bound(SpaceKind::parametric, 1e-4, cap, 0)));
}

TEST(AffineFamily, GridEnumeration) {
  const auto fam = grid_affine_family(51);
  EXPECT_DOUBLE_EQ(fam.grid_value(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(fam.grid_value(0, 50), 1.0);
  EXPECT_DOUBLE_EQ(fam.grid_value(1, 25), 0.5);
  const auto s = fam.to_finite(kUnitDomain);
  EXPECT_EQ(s.size(), 51u * 51u);
  std::set<int> ids;
  for (const auto& h : s.hypotheses()) ids.insert(h.id());
  EXPECT_EQ(ids.size(), s.size());
  EXPECT_NEAR(s.prior(0), 1.0 / 2601.0, 1e-15);
  const std::vector<double> theta{0.5, 0.25}, x{0.5};
  EXPECT_DOUBLE_EQ(fam.evaluate(theta, x), 0.5);
  EXPECT_THROW(AffineFamily({Interval{-1, 1}, Interval{0, 1}}, kUnit).to_finite(kUnitDomain), std::logic_error);
}

TEST(AffineFamily, ParametricEstimateBracketsTruth) {
  // On the grid the exact quantities are available; the Monte Carlo estimate
  // should bracket them.
  const auto fam = grid_affine_family(21);
  const auto chain = make_fixture("three_state").chain;
  const auto pi = stationary_distribution(chain).probabilities;
  const auto finite = fam.to_finite(kUnitDomain);
  const auto l = expected_losses(finite, chain, pi);
  const double g = optimal_loss_gamma_star(finite, chain, pi);
  const double v = good_volume_V_eps(l, finite.priors(), 0.1);
  const auto est = estimate_parametric_quantities(fam, chain, pi, 0.1, 20000, 3);
  EXPECT_GE(est.gamma_star_upper, g - 1e-12);
  EXPECT_LE(est.V_eps_lo, v + 0.01);
  EXPECT_GE(est.V_eps_hi, v - 0.01);
}
