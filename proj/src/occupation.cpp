#include "bwa/occupation.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace bwa {

std::optional<RenewalForm> renewal_form(const FiniteChainSpec& spec, double tol) {
  const auto& P = spec.transition();
  const auto k = P.rows();
  if (k == 1) return RenewalForm{0.0, Eigen::VectorXd::Ones(1)};

  // off-diagonal entries of column w must all equal (1 - lambda) nu_w
  Eigen::VectorXd c(k);
  for (Eigen::Index w = 0; w < k; ++w) {
    const Eigen::Index ref = (w == 0) ? 1 : 0;
    c(w) = P(ref, w);
    for (Eigen::Index z = 0; z < k; ++z)
      if (z != w && std::abs(P(z, w) - c(w)) > tol) return std::nullopt;
  }
  const double lambda = P(0, 0) - c(0);
  for (Eigen::Index z = 1; z < k; ++z)
    if (std::abs(P(z, z) - c(z) - lambda) > tol) return std::nullopt;
  if (lambda < -tol || lambda >= 1.0) return std::nullopt;

  RenewalForm form;
  form.lambda = std::max(lambda, 0.0);
  form.nu = c / c.sum();
  return form;
}

namespace {

std::uint64_t binomial(CounterRng& rng, std::uint64_t trials, double p) {
  if (trials == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  std::binomial_distribution<std::uint64_t> dist(trials, p);
  return dist(rng);
}

double beta(CounterRng& rng, double a, double b) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x / (x + y);
}

std::vector<std::uint64_t> occupation_stepwise(const FiniteChainSpec& spec, std::uint64_t n, std::uint64_t seed) {
  std::vector<std::uint64_t> counts(spec.size(), 0);
  ChainWalker walker(spec, seed);
  for (std::uint64_t i = 0; i < n; ++i) ++counts[walker.next()];
  return counts;
}

std::vector<std::uint64_t> occupation_renewal(const FiniteChainSpec& spec, const RenewalForm& form,
                                              std::uint64_t n, std::uint64_t seed) {
  const auto k = spec.size();
  CounterRng rng(seed, 1);
  const std::size_t first = sample_index(spec.initial_cdf(), rng.uniform());
  const std::uint64_t redraws = binomial(rng, n - 1, 1.0 - form.lambda);

  // runs per state: the first run plus a multinomial split of the redraws
  std::vector<std::uint64_t> runs(k, 0);
  runs[first] = 1;
  std::uint64_t left = redraws;
  double mass_left = 1.0;
  for (std::size_t z = 0; z < k && left > 0; ++z) {
    const double p = form.nu(static_cast<Eigen::Index>(z));
    const std::uint64_t r = (z + 1 == k) ? left : binomial(rng, left, std::min(1.0, p / mass_left));
    runs[z] += r;
    left -= r;
    mass_left -= p;
  }

  std::vector<std::uint64_t> counts(k, 0);
  std::uint64_t len_left = n;
  std::uint64_t runs_left = redraws + 1;
  for (std::size_t z = 0; z < k; ++z) {
    const std::uint64_t r = runs[z];
    if (r == 0) continue;
    if (r == runs_left) {
      counts[z] = len_left;
    } else {
      const double p = beta(rng, static_cast<double>(r), static_cast<double>(runs_left - r));
      counts[z] = r + binomial(rng, len_left - runs_left, p);
    }
    len_left -= counts[z];
    runs_left -= r;
  }
  return counts;
}

}  // namespace

std::vector<std::uint64_t> sample_occupation(const FiniteChainSpec& spec, std::uint64_t n, std::uint64_t seed,
                                             OccupationMethod method) {
  if (n == 0) throw std::invalid_argument("sample_occupation: n must be >= 1");
  if (method == OccupationMethod::stepwise) return occupation_stepwise(spec, n, seed);
  auto form = renewal_form(spec);
  if (form) return occupation_renewal(spec, *form, n, seed);
  if (method == OccupationMethod::renewal)
    throw std::invalid_argument("sample_occupation: kernel has no renewal form");
  return occupation_stepwise(spec, n, seed);
}

Eigen::VectorXd expected_occupation(const FiniteChainSpec& spec, std::uint64_t n) {
  Eigen::RowVectorXd dist = spec.initial().transpose();
  Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(dist.size());
  for (std::uint64_t t = 0; t < n; ++t) {
    acc += dist;
    dist = dist * spec.transition();
  }
  return acc.transpose();
}

}  // namespace bwa
