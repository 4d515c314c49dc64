#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bwa/chain.hpp"
#include "bwa/hypothesis.hpp"
#include "bwa/weights.hpp"

namespace bwa {

enum class TaskKind { regression, classification, deterministic_target };

std::string_view to_string(TaskKind kind);
TaskKind parse_task_kind(std::string_view name);

/// Predicts 1 with probability h_bar_n(x). Draws are keyed by (seed, draw index)
/// so a given call index always gives the same answer.
class RandomClassifier {
public:
  RandomClassifier(const WeightState& state, const FiniteHypothesisSpace& space, std::uint64_t seed)
      : state_(&state), space_(&space), seed_(seed) {}

  /// h_bar_n(x); throws std::domain_error when it leaves [0, 1] by more than 1e-9.
  [[nodiscard]] double probability(std::span<const double> x) const;
  [[nodiscard]] int classify(std::span<const double> x, std::uint64_t draw_index) const;
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

private:
  const WeightState* state_;
  const FiniteHypothesisSpace* space_;
  std::uint64_t seed_;
};

struct ClassificationError {
  double exact = 0.0;      ///< sum_z pi(z) |h_bar(x_z) - y_z|
  double mc = 0.0;         ///< disagreement frequency over stationary draws
  double std_error = 0.0;  ///< sqrt(exact (1 - exact) / draws)
  std::size_t draws = 0;
};

/// Throws std::invalid_argument if any state target is not 0 or 1.
ClassificationError expected_error(const WeightState& state, const FiniteHypothesisSpace& space,
                                   const FiniteChainSpec& spec, const Eigen::VectorXd& pi, std::size_t mc_draws,
                                   std::uint64_t seed);

using TargetFunction = std::function<double(std::span<const double>)>;

/// Names accepted by `task.target`: identity (first coordinate clamped to Y),
/// threshold (1 when x_0 >= 1/2), constant (midpoint of Y).
TargetFunction named_target(std::string_view name, Interval y_range);
std::vector<std::string> target_names();

/// The chain (X_i, c(X_i)): states (x, c(x)) with the X-chain's kernel and initial
/// law. Only the diagonal {(x, c(x))} is represented; off-target states carry no
/// stationary mass and jump onto the diagonal in one step.
FiniteChainSpec augment_with_target(const FiniteChainSpec& x_spec, const TargetFunction& c, Interval y_range,
                                    std::string name = {});

/// The full kernel of the augmented chain over X x labels, off-target states
/// included: from (x, y != c(x)) the chain moves to (x, c(x)). Row/column index
/// is x_index * labels.size() + label_index. Every c(x) must appear in labels.
struct FullAugmentedChain {
  Eigen::MatrixXd transition;
  Eigen::VectorXd stationary;
  std::vector<bool> on_target;
  std::vector<std::size_t> x_index;
};
FullAugmentedChain augmented_full_kernel(const FiniteChainSpec& x_spec, const TargetFunction& c,
                                         std::span<const double> labels);

/// Checks TV(P^n(.|z), pi) <= gamma rho^n V(z) + kTvFloor for n = 1..horizon on
/// the full augmented chain, with V(x, c(x)) = V_X(x) and V(x, y) = V_X(x) / rho
/// off target, using the X-chain's certificate.
bool augmented_envelope_holds(const FullAugmentedChain& chain, const ErgodicityCertificate& x_cert,
                              std::size_t horizon);

/// Index-aligned argmin of per-hypothesis losses; ties go to the lowest id.
const Hypothesis& erm_select(const FiniteHypothesisSpace& space, std::span<const double> loss);
/// argmin of the empirical loss; ties go to the lowest id.
const Hypothesis& erm_train(const FiniteHypothesisSpace& space, const Trajectory& traj);
/// Same, from per-state visit counts of a finite chain.
const Hypothesis& erm_train_from_counts(const FiniteHypothesisSpace& space, const FiniteChainSpec& spec,
                                        std::span<const std::uint64_t> counts);

}  // namespace bwa
