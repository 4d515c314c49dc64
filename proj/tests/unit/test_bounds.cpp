#include <gtest/gtest.h>

#include <cmath>

#include "bwa/bounds.hpp"
#include "bwa/chain.hpp"
#include "bwa/rng.hpp"

using namespace bwa;

namespace {

BoundInputs base() {
  BoundInputs in;
  in.eps = 0.1;
  in.delta = 0.05;
  in.M = 1.0;
  in.L = 1.0;
  in.gamma = 1.8;
  in.B = 1.000001;
  in.rho = 0.4;
  in.alpha = 0.5;
  in.covering = CoveringModel::fixed(5.0);
  in.V_eps_quarter = 0.4;
  in.V_eps_half = 0.4;
  return in;
}

/// Straight transcription of the printed formulas, written without the
/// library's term decomposition.
double direct_uniform(double factor, const BoundInputs& in, double N) {
  return factor * in.M * in.M / (in.eps * in.eps) *
         (std::log(2.0 / in.delta) + std::log(1.0 + in.gamma * in.B / std::exp(2.0)) + std::log(N));
}

double direct_decay(const BoundInputs& in) {
  return std::sqrt(3.0 * (std::log(1.0 / in.V_eps_quarter) + std::log(2.0 * in.M / in.eps)) /
                   (2.0 * in.eps * std::log(1.0 / in.alpha) * std::log(1.0 / in.rho)));
}

std::uint64_t linear_scan(std::uint64_t target, double rho, std::uint64_t limit) {
  for (std::uint64_t n = 1; n <= limit; ++n)
    if (effective_sample_size(n, rho) >= target) return n;
  return 0;
}

}  // namespace

TEST(Bounds, UniformBoundHandExample) {
  auto in = base();
  in.gamma = 0.0;
  in.covering = CoveringModel::fixed(1.0);
  const auto r = lemma1_ne(in);
  EXPECT_NEAR(r.n_e_required, 800.0 * std::log(40.0), 1e-9);
  ASSERT_EQ(r.terms.size(), 3u);
  EXPECT_EQ(r.terms[1].value, 0.0);
  EXPECT_EQ(r.terms[2].value, 0.0);
}

TEST(Bounds, MatchDirectFormulas) {
  const auto in = base();
  EXPECT_NEAR(lemma1_ne(in).n_e_required, direct_uniform(8.0, in, 5.0), 1e-9);
  EXPECT_NEAR(lemma2_ne(in).n_e_required, direct_uniform(288.0, in, 5.0), 1e-7);
  EXPECT_NEAR(theorem2_ne(in).n_e_required, direct_uniform(1152.0, in, 5.0) + direct_decay(in), 1e-6);
  const auto t2 = theorem2_ne(in);
  EXPECT_DOUBLE_EQ(t2.n_e_required, t2.term_sum());
}

TEST(Bounds, DominationBoundIsThirtySixTimesUniform) {
  CounterRng rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    auto in = base();
    in.M = 0.1 + rng.uniform();
    in.eps = 3.0 * in.M * (0.01 + 0.99 * rng.uniform());
    in.delta = 0.001 + 0.9 * rng.uniform();
    in.gamma = 5.0 * rng.uniform();
    in.covering = CoveringModel::fixed(1.0 + 100.0 * rng.uniform());
    EXPECT_NEAR(lemma2_ne(in).n_e_required / lemma1_ne(in).n_e_required, 36.0, 1e-9);
  }
}

TEST(Bounds, DoublingMQuadruplesAtFixedCovering) {
  auto in = base();
  in.eps = 0.5;
  const double a = lemma1_ne(in).n_e_required;
  in.M = 2.0;
  EXPECT_NEAR(lemma1_ne(in).n_e_required / a, 4.0, 1e-12);
}

TEST(Bounds, WeightDecayVanishesWhenItsLogsDo) {
  auto in = base();
  in.V_eps_quarter = 1.0;
  in.M = 1.0;
  in.eps = 2.0;
  const auto r = theorem2_ne(in);
  EXPECT_EQ(r.terms.back().name, "weight_decay");
  EXPECT_NEAR(r.terms.back().value, 0.0, 1e-15);
}

TEST(Bounds, EpsilonDomainBoundary) {
  auto in = base();
  in.eps = 3.0;
  EXPECT_NO_THROW(lemma1_ne(in));
  EXPECT_NO_THROW(theorem2_ne(in));
  in.eps = std::nextafter(3.0, 4.0);
  EXPECT_THROW(lemma1_ne(in), std::domain_error);
  in.eps = 0.0;
  EXPECT_THROW(lemma2_ne(in), std::domain_error);
  in = base();
  in.alpha = 1.0;
  EXPECT_NO_THROW(lemma1_ne(in));  // alpha only enters the generalisation bound
  EXPECT_THROW(theorem2_ne(in), std::domain_error);
  in = base();
  in.rho = 1.0;
  EXPECT_THROW(lemma1_ne(in), std::domain_error);
}

TEST(Bounds, MonotoneInEpsDeltaAndVolume) {
  auto in = base();
  double prev = INFINITY;
  for (int i = 1; i < 60; ++i) {
    const double eps = 0.05 * i;
    in.eps = eps;
    const double v = theorem2_ne(in).n_e_required;
    EXPECT_LT(v, prev) << eps;
    prev = v;
  }
  in = base();
  prev = 0.0;
  for (double delta = 0.9; delta > 1e-6; delta /= 2.0) {
    in.delta = delta;
    const double v = theorem2_ne(in).n_e_required;
    EXPECT_GT(v, prev);
    prev = v;
  }
  in = base();
  prev = 0.0;
  for (double V = 1.0; V > 1e-9; V /= 3.0) {
    in.V_eps_quarter = V;
    const double v = theorem2_ne(in).n_e_required;
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Bounds, SampleSizeRequiredAchievesTheTarget) {
  const auto r = theorem2_ne(base());
  ASSERT_TRUE(r.n_required);
  EXPECT_FALSE(r.vacuous);
  EXPECT_GE(static_cast<double>(effective_sample_size(*r.n_required, 0.4)), r.n_e_required);
  EXPECT_LT(static_cast<double>(effective_sample_size(*r.n_required - 1, 0.4)), std::ceil(r.n_e_required));
}

TEST(Bounds, CorollaryCapacityTerm) {
  auto in = base();
  EXPECT_THROW(corollary1_ne(in), std::invalid_argument);
  in.capacity = SpaceCapacity{1.0, 1.0, 2.0, 1, 1.0};
  in.eps = 0.48;
  // c (eps/48L)^(-2d/q) = (0.01)^-1 = 100
  auto r = corollary1_ne(in);
  const double lead = 1152.0 / (0.48 * 0.48);
  EXPECT_NEAR(r.terms[2].value, lead * 100.0, 1e-6);
  in.capacity->d = 2;
  r = corollary1_ne(in);
  EXPECT_NEAR(r.terms[2].value, lead * 1e4, 1e-3);
  // same as theorem2 when the fixed covering number matches
  in.capacity->d = 1;
  in.covering = CoveringModel::fixed(std::exp(100.0));
  EXPECT_NEAR(corollary1_ne(in).n_e_required, theorem2_ne(in).n_e_required, 1e-6);
}

TEST(Bounds, CoveringModelsAtTheirRadii) {
  const SpaceCapacity cap{1.0, 1.0, 1.0, 1, 1.0};
  auto in = base();
  in.eps = 0.4;
  in.covering = CoveringModel::finite(1000, cap);
  // radius 0.1 -> exp(100) capped at 1000 elements
  EXPECT_NEAR(lemma1_ne(in).terms[2].value, 8.0 / 0.16 * std::log(1000.0), 1e-9);
  in.eps = 3.0;
  in.covering = CoveringModel::parametric(cap);
  // radius 0.75 -> exp(1/0.5625)
  EXPECT_NEAR(lemma1_ne(in).terms[2].value, 8.0 / 9.0 / 0.5625, 1e-12);
}

TEST(Bounds, Theorem4WidensGuaranteeOnly) {
  auto in = base();
  in.Xi = 0.2;
  const auto r = theorem4_guarantee(in);
  EXPECT_DOUBLE_EQ(r.guarantee_excess, 0.30000000000000004);
  in.Xi = 0.0;
  EXPECT_EQ(r.bound, theorem2_ne(in));
}

TEST(DominationThreshold, Examples) {
  EXPECT_NEAR(weight_domination_threshold(0.5, 24.0, 1.0, 1.0), 0.0625, 1e-15);
  EXPECT_DOUBLE_EQ(weight_domination_threshold(0.5, 0.0, 0.3, 0.25), 4.0);
  double prev = INFINITY;
  for (double n = 0; n < 1e12; n = 2 * n + 1) {
    const double v = log_weight_domination_threshold(0.3, n, 0.3, 0.4);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_NEAR(log_weight_domination_threshold(0.5, 1e12, 0.3, 0.4), 0.05e12 * std::log(0.5) - std::log(0.4), 1e-3);
  EXPECT_THROW(weight_domination_threshold(0.5, 1.0, 0.3, 0.0), std::domain_error);
}

TEST(SampleSize, HandValues) {
  EXPECT_EQ(*n_from_ne(10.0, std::exp(-8.0)).n, 100u);
  const auto s = n_from_ne(9.0, 0.5);
  ASSERT_TRUE(s.n);
  EXPECT_LE(*s.n, 1000u);
  EXPECT_EQ(*s.n, linear_scan(9, 0.5, 1000));
}

TEST(SampleSize, TargetBelowOneIsVacuous) {
  const auto s = n_from_ne(0.3, 0.5);
  EXPECT_TRUE(s.vacuous);
  ASSERT_TRUE(s.n);
  EXPECT_EQ(*s.n, linear_scan(1, 0.5, 1000));
  EXPECT_FALSE(n_from_ne(1.0, 0.5).vacuous);
}

TEST(SampleSize, TargetOneAgreesWithLinearScan) {
  EXPECT_EQ(*n_from_ne(1.0, 0.9).n, linear_scan(1, 0.9, 100000));
}

TEST(SampleSize, AgreesWithLinearScanOnRandomTargets) {
  CounterRng rng(21);
  for (int rep = 0; rep < 300; ++rep) {
    const double rho = 0.02 + 0.96 * rng.uniform();
    const double target = 1.0 + 60.0 * rng.uniform();
    const auto t = static_cast<std::uint64_t>(std::ceil(target));
    const auto s = n_from_ne(target, rho);
    ASSERT_TRUE(s.n);
    EXPECT_EQ(*s.n, linear_scan(t, rho, 5000000)) << "target " << target << " rho " << rho;
  }
}

TEST(SampleSize, OverflowReportsNoSampleSize) {
  EXPECT_FALSE(n_from_ne(1e19, 0.5).n);
  auto in = base();
  in.eps = 1e-9;
  const auto r = lemma1_ne(in);
  EXPECT_FALSE(r.n_required);
  EXPECT_GT(r.n_e_required, 1e18);
  EXPECT_THROW(n_from_ne(5.0, 1.0), std::domain_error);
}
