#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bwa/chain.hpp"
#include "bwa/domain.hpp"

namespace bwa {

/// A function X -> Y. Outputs are clamped to Y and evaluation is deterministic.
class Hypothesis {
public:
  using Evaluator = std::function<double(std::span<const double>)>;

  Hypothesis(int id, Evaluator f, Interval y_range) : id_(id), f_(std::move(f)), y_(y_range) {}

  [[nodiscard]] int id() const noexcept { return id_; }
  [[nodiscard]] const Interval& y_range() const noexcept { return y_; }
  [[nodiscard]] double operator()(std::span<const double> x) const { return y_.clamp(f_(x)); }

private:
  int id_;
  Evaluator f_;
  Interval y_;
};

Hypothesis constant_hypothesis(int id, double value, Interval y_range);
/// clamp(slope . x + intercept)
Hypothesis affine_hypothesis(int id, std::vector<double> slope, double intercept, Interval y_range);
/// Tabulated predictions at fixed points; other inputs take the value of the
/// nearest tabulated point (Euclidean, lowest index on ties).
Hypothesis table_hypothesis(int id, std::vector<std::vector<double>> points, std::vector<double> values,
                            Interval y_range);

/// Finite hypothesis set with prior measure mu. Prior sums to 1 within 1e-12,
/// entries nonnegative, ids unique.
class FiniteHypothesisSpace {
public:
  static FiniteHypothesisSpace create(std::vector<Hypothesis> hypotheses, std::vector<double> prior,
                                      Domain domain);
  static FiniteHypothesisSpace uniform(std::vector<Hypothesis> hypotheses, Domain domain);

  [[nodiscard]] std::size_t size() const noexcept { return hypotheses_.size(); }
  [[nodiscard]] const Hypothesis& hypothesis(std::size_t i) const { return hypotheses_.at(i); }
  [[nodiscard]] const std::vector<Hypothesis>& hypotheses() const noexcept { return hypotheses_; }
  [[nodiscard]] double prior(std::size_t i) const { return prior_.at(i); }
  [[nodiscard]] const std::vector<double>& priors() const noexcept { return prior_; }
  [[nodiscard]] const Domain& domain() const noexcept { return domain_; }
  /// Position of the hypothesis with this id; throws std::out_of_range.
  [[nodiscard]] std::size_t index_of(int id) const;

private:
  FiniteHypothesisSpace() = default;

  std::vector<Hypothesis> hypotheses_;
  std::vector<double> prior_;
  Domain domain_;
};

/// Capacity metadata: loss range M, loss Lipschitz constant L, Hoelder exponent
/// q, input dimension d and covering constant c.
struct SpaceCapacity {
  double M = 1.0;
  double L = 1.0;
  double q = 1.0;
  int d = 1;
  double c = 1.0;
};

enum class SpaceKind { finite, parametric };

/// |h(x) - y|
double loss_l1(const Hypothesis& h, const StatePoint& z);
/// Mean L1 loss over the trajectory; throws on an empty trajectory.
double empirical_loss(const Hypothesis& h, const Trajectory& traj);
/// Exact sum_z pi(z) |h(x_z) - y_z|.
double expected_loss(const Hypothesis& h, const FiniteChainSpec& spec, const Eigen::VectorXd& pi);
std::vector<double> expected_losses(const FiniteHypothesisSpace& space, const FiniteChainSpec& spec,
                                    const Eigen::VectorXd& pi);

/// Residual table r(h, z) = h(x_z) - y_z, row per hypothesis.
Eigen::MatrixXd residual_table(const FiniteHypothesisSpace& space, const FiniteChainSpec& spec);

struct LossConstants {
  double M = 0.0;
  double L = 1.0;
  /// true when no pair of distinct hypotheses exists; L is then reported as 1.
  bool L_undefined = false;
};

/// M and L restricted to the chain's state list (the sup norm over X becomes a
/// max over states).
LossConstants constants_ML(const FiniteHypothesisSpace& space, const FiniteChainSpec& spec);

/// min(m, exp{c eps^(-2d/q)}) for finite spaces, exp{c eps^(-2d/q)} otherwise.
double covering_number_bound(SpaceKind kind, double eps, const SpaceCapacity& cap, std::size_t m);
/// Natural log of covering_number_bound; stays finite where the bound overflows.
double log_covering_number_bound(SpaceKind kind, double eps, const SpaceCapacity& cap, std::size_t m);

/// inf{gamma : mu(H_gamma) > 0} = min over positive-prior hypotheses of l(h).
double optimal_loss_gamma_star(std::span<const double> expected, std::span<const double> prior);
double optimal_loss_gamma_star(const FiniteHypothesisSpace& space, const FiniteChainSpec& spec,
                               const Eigen::VectorXd& pi);

/// mu(H_{gamma* + eps}).
double good_volume_V_eps(std::span<const double> expected, std::span<const double> prior, double eps);
double good_volume_V_eps(const FiniteHypothesisSpace& space, const FiniteChainSpec& spec,
                         const Eigen::VectorXd& pi, double eps);

/// h(x) = clamp(a . x + b) with a uniform prior on a parameter box over (a, b).
/// With `grid` set, the family is the grid of `grid` points per coordinate and
/// the prior is uniform on those points.
class AffineFamily {
public:
  AffineFamily(std::vector<Interval> box, Interval y_range, std::optional<std::size_t> grid = {});

  [[nodiscard]] std::size_t input_dimension() const noexcept { return box_.size() - 1; }
  [[nodiscard]] std::size_t parameter_dimension() const noexcept { return box_.size(); }
  [[nodiscard]] const std::vector<Interval>& box() const noexcept { return box_; }
  [[nodiscard]] const Interval& y_range() const noexcept { return y_; }
  [[nodiscard]] std::optional<std::size_t> grid() const noexcept { return grid_; }

  [[nodiscard]] double evaluate(std::span<const double> theta, std::span<const double> x) const;
  /// Coordinate value of grid index i along parameter axis j.
  [[nodiscard]] double grid_value(std::size_t j, std::size_t i) const;
  [[nodiscard]] Hypothesis hypothesis(int id, std::span<const double> theta) const;

  /// The grid as a finite space with uniform prior; ids enumerate the grid in
  /// row-major order over parameter axes. Throws if no grid is set.
  [[nodiscard]] FiniteHypothesisSpace to_finite(const Domain& domain) const;

private:
  std::vector<Interval> box_;
  Interval y_;
  std::optional<std::size_t> grid_;
};

/// Monte Carlo estimates for parametric spaces where gamma* and V_eps are not
/// exactly computable. gamma* is estimated by the minimum over prior draws
/// (an upper estimate); V_eps by the hit fraction with a Wilson 95% interval.
struct ParametricQuantities {
  double gamma_star_upper = 0.0;
  double V_eps = 0.0;
  double V_eps_lo = 0.0;
  double V_eps_hi = 0.0;
  std::size_t samples = 0;
};
ParametricQuantities estimate_parametric_quantities(const AffineFamily& family, const FiniteChainSpec& spec,
                                                    const Eigen::VectorXd& pi, double eps, std::size_t samples,
                                                    std::uint64_t seed);

}  // namespace bwa
