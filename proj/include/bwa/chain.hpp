#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bwa/domain.hpp"
#include "bwa/rng.hpp"

namespace bwa {

/// Finite-state Markov chain on X x Y. Construction validates the kernel:
/// row-stochastic within 1e-12, nonnegative, irreducible and aperiodic.
class FiniteChainSpec {
public:
  /// Throws std::invalid_argument when any invariant fails. When `domain` is
  /// empty the tight bounding box of the states is used.
  static FiniteChainSpec create(std::vector<StatePoint> states, Eigen::MatrixXd transition,
                                Eigen::VectorXd initial, std::optional<Domain> domain = {},
                                std::string name = {});

  [[nodiscard]] std::size_t size() const noexcept { return states_.size(); }
  [[nodiscard]] std::size_t dimension() const noexcept { return domain_.dimension(); }
  [[nodiscard]] const std::vector<StatePoint>& states() const noexcept { return states_; }
  [[nodiscard]] const StatePoint& state(std::size_t i) const { return states_.at(i); }
  [[nodiscard]] const Eigen::MatrixXd& transition() const noexcept { return transition_; }
  [[nodiscard]] const Eigen::VectorXd& initial() const noexcept { return initial_; }
  [[nodiscard]] const Domain& domain() const noexcept { return domain_; }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }

  /// Row-wise cumulative sums used for inverse-CDF sampling.
  [[nodiscard]] const std::vector<std::vector<double>>& row_cdf() const noexcept { return row_cdf_; }
  [[nodiscard]] const std::vector<double>& initial_cdf() const noexcept { return initial_cdf_; }

private:
  FiniteChainSpec() = default;

  std::vector<StatePoint> states_;
  Eigen::MatrixXd transition_;
  Eigen::VectorXd initial_;
  Domain domain_;
  std::string name_;
  std::vector<std::vector<double>> row_cdf_;
  std::vector<double> initial_cdf_;
};

/// Reachability and period checks; exposed for diagnostics.
bool is_irreducible(const Eigen::MatrixXd& transition);
std::size_t period(const Eigen::MatrixXd& transition);

struct StationaryDistribution {
  Eigen::VectorXd probabilities;
  std::size_t iterations = 0;
};

/// Power iteration from the uniform vector until successive iterates are within
/// TV 1e-13, capped at 1e6 iterations. Throws std::runtime_error on
/// non-convergence with a spectral gap estimate in the message.
StationaryDistribution stationary_distribution(const FiniteChainSpec& spec);

/// Sum_i |p_i - q_i|; the factor-2 total variation on a discrete space.
double tv_distance(std::span<const double> p, std::span<const double> q);
double tv_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

struct Trajectory {
  std::vector<StatePoint> points;
  std::uint64_t seed = 0;
  std::string source;
  /// How far targets may sit outside Y (Xi/2 after noise injection).
  double y_slack = 0.0;

  [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
};

/// Inverse-CDF index of u in a cumulative table; the last index absorbs rounding.
std::size_t sample_index(std::span<const double> cdf, double u) noexcept;

/// Walks a chain one state index at a time. sample_path and the stepwise
/// occupation sampler share this so they consume the generator identically.
class ChainWalker {
public:
  ChainWalker(const FiniteChainSpec& spec, std::uint64_t seed);

  std::size_t next();

private:
  const FiniteChainSpec* spec_;
  CounterRng rng_;
  std::optional<std::size_t> current_;
};

/// n >= 1 observations; the first from `initial`, each next one from the
/// transition row of its predecessor. Deterministic in (spec, n, seed).
Trajectory sample_path(const FiniteChainSpec& spec, std::size_t n, std::uint64_t seed);

/// Per-state empirical frequencies of a sequence of state indices.
Eigen::VectorXd state_frequencies(std::span<const std::uint64_t> counts);

/// Rows of TV(P^n(.|z), pi) for n = 1..horizon; result(n-1, z).
Eigen::MatrixXd tv_decay(const FiniteChainSpec& spec, const Eigen::VectorXd& pi, std::size_t horizon);

struct ErgodicityCertificate {
  double gamma = 0.0;
  double rho = 0.5;
  double B = 1.0;
  std::vector<double> V;
  std::size_t horizon = 0;
};

/// TV values at or below this are treated as numerically zero when fitting and
/// validating envelopes; exact kernel powers bottom out around 1e-16.
inline constexpr double kTvFloor = 1e-12;

/// Envelope gamma * rho^n with V = 1 dominating the worst-state TV decay for
/// 0 <= n <= horizon: rho is the smallest rate that fits n >= 1 given the first
/// step, and gamma is raised if needed to cover the point mass at n = 0. B = 1 + 1e-6. Throws std::invalid_argument if horizon < 2.
ErgodicityCertificate fit_certificate(const FiniteChainSpec& spec, std::size_t horizon);

/// Checks TV(P^n(.|z), pi) <= gamma rho^n V(z) + kTvFloor for all z, n <= horizon,
/// and sum_z V(z) pi(z) < B.
bool certificate_holds(const FiniteChainSpec& spec, const Eigen::VectorXd& pi,
                       const ErgodicityCertificate& cert, std::size_t horizon);

/// ceil(sqrt(8n / ln(1/rho))), the block length inside the effective sample size.
std::uint64_t ess_block_length(std::uint64_t n, double rho);

/// floor(n / ceil(sqrt(8n / ln(1/rho)))). Throws std::domain_error unless 0 < rho < 1.
std::uint64_t effective_sample_size(std::uint64_t n, double rho);

}  // namespace bwa
