#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "bwa/fixtures.hpp"
#include "bwa/occupation.hpp"
#include "bwa/rng.hpp"
#include "bwa/weights.hpp"

using namespace bwa;

namespace {

constexpr Interval kUnit{0.0, 1.0};
const Domain kUnitDomain{{kUnit}, kUnit};

/// Naive oracle: weights as a running product alpha^loss, then the plain ratio.
double naive_prediction(const FiniteHypothesisSpace& s, const Trajectory& t, double alpha, std::span<const double> x) {
  std::vector<double> w(s.size(), 1.0);
  for (const auto& z : t.points)
    for (std::size_t h = 0; h < s.size(); ++h) w[h] *= std::pow(alpha, std::abs(s.hypothesis(h)(z.x) - z.y));
  double num = 0.0, den = 0.0;
  for (std::size_t h = 0; h < s.size(); ++h) {
    num += w[h] * s.prior(h) * s.hypothesis(h)(x);
    den += w[h] * s.prior(h);
  }
  return num / den;
}

FiniteHypothesisSpace random_space(CounterRng& rng, std::size_t m) {
  std::vector<Hypothesis> hyps;
  std::vector<double> prior(m);
  for (std::size_t i = 0; i < m; ++i) {
    hyps.push_back(affine_hypothesis(static_cast<int>(i), {2.0 * rng.uniform() - 1.0}, rng.uniform(), kUnit));
    prior[i] = 0.1 + rng.uniform();
  }
  const double s = std::accumulate(prior.begin(), prior.end(), 0.0);
  for (auto& p : prior) p /= s;
  return FiniteHypothesisSpace::create(std::move(hyps), std::move(prior), kUnitDomain);
}

}  // namespace

TEST(Weights, InitialWeightsRequireAlphaInOpenUnitInterval) {
  const auto f = make_fixture("two_state");
  EXPECT_THROW(initial_weights(f.space, 0.0), std::domain_error);
  EXPECT_THROW(initial_weights(f.space, 1.0), std::domain_error);
  const auto w = initial_weights(f.space, 0.5);
  EXPECT_EQ(w.steps, 0u);
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_EQ(w.log_weight(i), 0.0);
}

TEST(Weights, UpdateRejectsPointsOutsideTheDomain) {
  const auto f = make_fixture("two_state");
  const auto w = initial_weights(f.space, 0.5);
  EXPECT_THROW(update(w, StatePoint{{0.5}, 1.2}, f.space), std::invalid_argument);
  EXPECT_THROW(update(w, StatePoint{{1.5}, 0.5}, f.space), std::invalid_argument);
  const auto ok = update(w, StatePoint{{0.5}, 1.05}, f.space, 0.1);
  EXPECT_EQ(ok.steps, 1u);
  EXPECT_NEAR(ok.cumulative_loss[0], 0.85, 1e-12);
}

TEST(Weights, PredictionMatchesNaiveProductOracle) {
  CounterRng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const auto space = random_space(rng, 2 + rep % 7);
    Trajectory t;
    for (int i = 0; i < 40; ++i) t.points.push_back(StatePoint{{rng.uniform()}, rng.uniform()});
    const double alpha = 0.05 + 0.9 * rng.uniform();
    const auto state = train(space, t, alpha);
    for (double xv : {0.0, 0.3, 0.77, 1.0}) {
      const std::vector<double> x{xv};
      EXPECT_NEAR(predict(state, x, space).value, naive_prediction(space, t, alpha, x), 1e-12);
    }
  }
}

TEST(Weights, PosteriorMassesSumToOne) {
  CounterRng rng(6);
  for (int rep = 0; rep < 20; ++rep) {
    const auto space = random_space(rng, 3 + rep % 5);
    Trajectory t;
    for (int i = 0; i < 25; ++i) t.points.push_back(StatePoint{{rng.uniform()}, rng.uniform()});
    const auto state = train(space, t, 0.3);
    const auto mass = posterior_masses(state, space);
    EXPECT_NEAR(std::accumulate(mass.begin(), mass.end(), 0.0), 1.0, 1e-12);
    const auto P = normalized_weights(state, space);
    double integral = 0.0;
    for (std::size_t h = 0; h < space.size(); ++h) integral += P[h] * space.prior(h);
    EXPECT_NEAR(integral, 1.0, 1e-12);
  }
}

TEST(Weights, StableForHugeCumulativeLosses) {
  const auto f = make_fixture("reference");
  WeightState s = initial_weights(f.space, 0.5);
  s.cumulative_loss = {1e9, 1e9 + 1.0, 3e9, 3e9, 3e9};
  s.steps = 1;
  const auto mass = posterior_masses(s, f.space);
  for (double m : mass) EXPECT_TRUE(std::isfinite(m));
  EXPECT_NEAR(mass[0] / mass[1], 2.0, 1e-9);
  EXPECT_EQ(mass[2], 0.0);
  const std::vector<double> x{0.0};
  EXPECT_TRUE(std::isfinite(predict(s, x, f.space).value));
}

TEST(Weights, IdenticalHypothesesPredictThatHypothesis) {
  std::vector<Hypothesis> hyps;
  for (int i = 0; i < 4; ++i) hyps.push_back(constant_hypothesis(i, 0.3, kUnit));
  const auto space = FiniteHypothesisSpace::uniform(hyps, kUnitDomain);
  Trajectory t;
  t.points = {StatePoint{{0.1}, 0.9}, StatePoint{{0.7}, 0.0}};
  const std::vector<double> x{0.4};
  EXPECT_DOUBLE_EQ(predict(train(space, t, 0.5), x, space).value, 0.3);
}

TEST(Weights, CountsAndWeightedTrainingMatchPathTraining) {
  for (const auto& name : {"reference", "three_state", "two_state"}) {
    const auto f = make_fixture(name);
    const auto path = sample_path(f.chain, 300, 12);
    const auto counts = sample_occupation(f.chain, 300, 12, OccupationMethod::stepwise);
    const auto a = train(f.space, path, 0.5);
    const auto b = train_from_counts(f.space, f.chain, counts, 0.5);
    std::vector<double> dcounts(counts.begin(), counts.end());
    const auto c = train_weighted(f.space, f.chain.states(), dcounts, 0.5);
    EXPECT_EQ(a.steps, b.steps);
    EXPECT_EQ(a.steps, c.steps);
    for (std::size_t h = 0; h < a.size(); ++h) {
      EXPECT_NEAR(a.cumulative_loss[h], b.cumulative_loss[h], 1e-9) << name;
      EXPECT_NEAR(a.cumulative_loss[h], c.cumulative_loss[h], 1e-9) << name;
    }
  }
}

TEST(Weights, ExcessLossMatchesDirectDifference) {
  const auto f = make_fixture("reference");
  const auto pi = stationary_distribution(f.chain).probabilities;
  for (std::uint64_t n : {1ull, 10ull, 100ull}) {
    const auto counts = sample_occupation(f.chain, n, n);
    const auto s = train_from_counts(f.space, f.chain, counts, 0.5);
    const double direct = mixture_expected_loss(s, f.space, f.chain, pi) - 0.05;
    EXPECT_NEAR(mixture_excess_loss(s, f.space, f.chain, pi, 0), direct, 1e-12);
    EXPECT_GE(direct, -1e-12);
  }
}

TEST(Weights, ExcessLossResolvesTinyValues) {
  const auto f = make_fixture("reference");
  const auto pi = stationary_distribution(f.chain).probabilities;
  WeightState s = initial_weights(f.space, 0.5);
  s.cumulative_loss = {0.0, 200.0, 300.0, 300.0, 300.0};
  s.steps = 1000;
  const double excess = mixture_excess_loss(s, f.space, f.chain, pi, 0);
  EXPECT_GT(excess, 0.0);
  EXPECT_LT(excess, 1e-55);
}

TEST(Weights, PredictionMovesTowardTheBetterHypothesis) {
  const auto f = make_fixture("two_state");
  const std::vector<double> x{0.0};
  double prev = predict(initial_weights(f.space, 0.5), x, f.space).value;
  for (std::uint64_t n : {10ull, 100ull, 1000ull}) {
    const std::vector<std::uint64_t> counts{n, 0};
    const double v = predict(train_from_counts(f.space, f.chain, counts, 0.5), x, f.space).value;
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_NEAR(prev, 0.2, 1e-6);
}
