#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "bwa/fixtures.hpp"
#include "bwa/occupation.hpp"

using namespace bwa;

namespace {

std::vector<std::uint64_t> histogram(const FiniteChainSpec& c, const Trajectory& t) {
  std::vector<std::uint64_t> h(c.size(), 0);
  for (const auto& z : t.points)
    for (std::size_t s = 0; s < c.size(); ++s)
      if (c.state(s) == z) {
        ++h[s];
        break;
      }
  return h;
}

/// Exact law of the count vector by enumerating all k^n paths.
std::map<std::vector<std::uint64_t>, double> exact_count_law(const FiniteChainSpec& c, std::size_t n) {
  std::map<std::vector<std::uint64_t>, double> law;
  const std::size_t k = c.size();
  std::size_t paths = 1;
  for (std::size_t i = 0; i < n; ++i) paths *= k;
  for (std::size_t code = 0; code < paths; ++code) {
    std::size_t rest = code;
    std::vector<std::size_t> path(n);
    for (std::size_t i = 0; i < n; ++i) {
      path[i] = rest % k;
      rest /= k;
    }
    double p = c.initial()(static_cast<Eigen::Index>(path[0]));
    for (std::size_t i = 1; i < n; ++i)
      p *= c.transition()(static_cast<Eigen::Index>(path[i - 1]), static_cast<Eigen::Index>(path[i]));
    if (p == 0.0) continue;
    std::vector<std::uint64_t> counts(k, 0);
    for (auto s : path) ++counts[s];
    law[counts] += p;
  }
  return law;
}

}  // namespace

TEST(Renewal, DetectsRenewalKernels) {
  const auto ref = renewal_form(make_fixture("reference").chain);
  ASSERT_TRUE(ref);
  EXPECT_NEAR(ref->lambda, 0.4, 1e-12);
  EXPECT_NEAR(ref->nu(0), 0.4, 1e-12);
  EXPECT_NEAR(ref->nu(3), 0.1, 1e-12);

  const auto two = renewal_form(make_fixture("two_state").chain);
  ASSERT_TRUE(two);
  EXPECT_NEAR(two->lambda, 0.4, 1e-12);
  EXPECT_NEAR(two->nu(0), 5.0 / 6.0, 1e-12);

  EXPECT_FALSE(renewal_form(make_fixture("three_state").chain));
}

TEST(Occupation, StepwiseMatchesSamplePathHistogram) {
  for (const auto& name : {"reference", "three_state", "two_state"}) {
    const auto c = make_fixture(name).chain;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto counts = sample_occupation(c, 777, seed, OccupationMethod::stepwise);
      EXPECT_EQ(counts, histogram(c, sample_path(c, 777, seed))) << name << " seed " << seed;
    }
  }
}

TEST(Occupation, CountsSumToN) {
  const auto c = make_fixture("reference").chain;
  for (std::uint64_t n : {1ull, 2ull, 17ull, 1000ull, 123456789ull, 1000000000000ull}) {
    const auto counts = sample_occupation(c, n, n + 1, OccupationMethod::renewal);
    std::uint64_t total = 0;
    for (auto v : counts) total += v;
    EXPECT_EQ(total, n);
  }
}

TEST(Occupation, RenewalMatchesExactLawOnShortPaths) {
  const std::size_t draws = 200000;
  for (const auto& name : {"two_state", "reference"}) {
    const auto c = make_fixture(name).chain;
    for (std::size_t n : {1u, 2u, 3u, 5u}) {
      const auto law = exact_count_law(c, n);
      std::map<std::vector<std::uint64_t>, double> freq;
      for (std::size_t i = 0; i < draws; ++i) freq[sample_occupation(c, n, 1000 * n + i, OccupationMethod::renewal)] += 1.0;
      for (const auto& [counts, f] : freq) EXPECT_TRUE(law.count(counts)) << "impossible count vector drawn";
      for (const auto& [counts, p] : law) {
        const double got = freq.count(counts) ? freq[counts] / draws : 0.0;
        const double se = std::sqrt(p * (1.0 - p) / draws);
        EXPECT_NEAR(got, p, 5.0 * se + 1e-4) << name << " n=" << n;
      }
    }
  }
}

TEST(Occupation, MeanMatchesExpectedOccupation) {
  const auto c = make_fixture("reference").chain;
  const std::uint64_t n = 60;
  const std::size_t draws = 40000;
  const auto expect = expected_occupation(c, n);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(4), sq = Eigen::VectorXd::Zero(4);
  for (std::size_t i = 0; i < draws; ++i) {
    const auto counts = sample_occupation(c, n, i, OccupationMethod::renewal);
    for (Eigen::Index z = 0; z < 4; ++z) {
      const double v = static_cast<double>(counts[static_cast<std::size_t>(z)]);
      sum(z) += v;
      sq(z) += v * v;
    }
  }
  for (Eigen::Index z = 0; z < 4; ++z) {
    const double mean = sum(z) / draws;
    const double var = sq(z) / draws - mean * mean;
    EXPECT_NEAR(mean, expect(z), 5.0 * std::sqrt(var / draws));
  }
}

TEST(Occupation, ExpectedOccupationSumsToN) {
  const auto c = make_fixture("three_state").chain;
  EXPECT_NEAR(expected_occupation(c, 25).sum(), 25.0, 1e-9);
}

TEST(Occupation, RenewalRejectsOtherKernels) {
  const auto c = make_fixture("three_state").chain;
  EXPECT_THROW(sample_occupation(c, 10, 0, OccupationMethod::renewal), std::invalid_argument);
  // automatic falls back to walking the chain
  EXPECT_EQ(sample_occupation(c, 100, 4, OccupationMethod::automatic),
            sample_occupation(c, 100, 4, OccupationMethod::stepwise));
}

TEST(Occupation, Deterministic) {
  const auto c = make_fixture("reference").chain;
  EXPECT_EQ(sample_occupation(c, 1 << 20, 5), sample_occupation(c, 1 << 20, 5));
}
