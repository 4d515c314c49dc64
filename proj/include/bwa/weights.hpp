#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bwa/chain.hpp"
#include "bwa/hypothesis.hpp"

namespace bwa {

/// Learned state of the batched weighted average after n observations. Only
/// cumulative losses are stored; log w_n(h) = cumulative_loss(h) * ln(alpha).
struct WeightState {
  double alpha = 0.5;
  std::vector<int> ids;
  std::vector<double> cumulative_loss;
  std::uint64_t steps = 0;

  [[nodiscard]] std::size_t size() const noexcept { return ids.size(); }
  [[nodiscard]] double log_weight(std::size_t i) const { return cumulative_loss.at(i) * std::log(alpha); }
};

/// w_0 = 1 for every hypothesis. Throws std::domain_error unless 0 < alpha < 1.
WeightState initial_weights(const FiniteHypothesisSpace& space, double alpha);

/// Adds |h(x) - y| to every cumulative loss and bumps the step count. Points
/// outside X x Y (Y widened by y_slack) are rejected with std::invalid_argument.
WeightState update(const WeightState& state, const StatePoint& z, const FiniteHypothesisSpace& space,
                   double y_slack = 0.0);
void update_in_place(WeightState& state, const StatePoint& z, const FiniteHypothesisSpace& space,
                     double y_slack = 0.0);

/// Single pass of update over the trajectory, honouring traj.y_slack.
WeightState train(const FiniteHypothesisSpace& space, const Trajectory& traj, double alpha);

/// Training from per-state visit counts of a finite chain; equal to train on any
/// path with those counts.
WeightState train_from_counts(const FiniteHypothesisSpace& space, const FiniteChainSpec& spec,
                              std::span<const std::uint64_t> counts, double alpha);

/// Training from distinct observations with multiplicities.
WeightState train_weighted(const FiniteHypothesisSpace& space, std::span<const StatePoint> points,
                           std::span<const double> counts, double alpha, double y_slack = 0.0);

/// log P_n(h) for every hypothesis, with P_n the density of the normalised
/// weights with respect to mu. Log-sum-exp with max subtraction.
std::vector<double> log_normalized_weights(const WeightState& state, const FiniteHypothesisSpace& space);
/// P_n(h) = w_n(h) / sum_h' w_n(h') mu(h')
double normalized_weight(const WeightState& state, std::size_t index, const FiniteHypothesisSpace& space);
std::vector<double> normalized_weights(const WeightState& state, const FiniteHypothesisSpace& space);
/// P_n(h) mu(h); sums to 1.
std::vector<double> posterior_masses(const WeightState& state, const FiniteHypothesisSpace& space);

enum class PredictionMethod { exact, mcmc };

struct Prediction {
  double value = 0.0;
  PredictionMethod method = PredictionMethod::exact;
  std::optional<double> mc_error;
  std::optional<double> acceptance_rate;
  /// Set when the sampler's acceptance rate left [0.05, 0.95].
  std::optional<std::string> warning;
};

/// Weighted average prediction sum_h P_n(h) mu(h) h(x).
Prediction predict(const WeightState& state, std::span<const double> x, const FiniteHypothesisSpace& space);

/// l(h_bar_n) computed exactly under pi.
double mixture_expected_loss(const WeightState& state, const FiniteHypothesisSpace& space,
                             const FiniteChainSpec& spec, const Eigen::VectorXd& pi);

/// l(h_bar_n) - l(h_ref) without cancellation: per state the mixture residual is
/// split as a + d with a the reference residual and d = sum_h mass_h (r_h - a),
/// so excess weights far below machine epsilon stay resolvable.
double mixture_excess_loss(const WeightState& state, const FiniteHypothesisSpace& space,
                           const FiniteChainSpec& spec, const Eigen::VectorXd& pi, std::size_t reference);

}  // namespace bwa
