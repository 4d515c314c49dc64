#include "bwa/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bwa {

WeightState initial_weights(const FiniteHypothesisSpace& space, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0, 1)");
  WeightState s;
  s.alpha = alpha;
  s.ids.reserve(space.size());
  for (const auto& h : space.hypotheses()) s.ids.push_back(h.id());
  s.cumulative_loss.assign(space.size(), 0.0);
  return s;
}

void update_in_place(WeightState& state, const StatePoint& z, const FiniteHypothesisSpace& space, double y_slack) {
  if (state.size() != space.size()) throw std::invalid_argument("update: weight state does not match the space");
  if (!space.domain().contains(z, y_slack)) throw std::invalid_argument("update: observation outside X x Y");
  for (std::size_t i = 0; i < space.size(); ++i) state.cumulative_loss[i] += loss_l1(space.hypothesis(i), z);
  ++state.steps;
}

WeightState update(const WeightState& state, const StatePoint& z, const FiniteHypothesisSpace& space,
                   double y_slack) {
  WeightState next = state;
  update_in_place(next, z, space, y_slack);
  return next;
}

WeightState train(const FiniteHypothesisSpace& space, const Trajectory& traj, double alpha) {
  if (traj.points.empty()) throw std::invalid_argument("train: empty trajectory");
  WeightState s = initial_weights(space, alpha);
  for (const auto& z : traj.points) update_in_place(s, z, space, traj.y_slack);
  return s;
}

WeightState train_from_counts(const FiniteHypothesisSpace& space, const FiniteChainSpec& spec,
                              std::span<const std::uint64_t> counts, double alpha) {
  if (counts.size() != spec.size()) throw std::invalid_argument("train_from_counts: one count per state");
  WeightState s = initial_weights(space, alpha);
  for (std::size_t z = 0; z < spec.size(); ++z) {
    if (counts[z] == 0) continue;
    const auto& pt = spec.state(z);
    if (!space.domain().contains(pt)) throw std::invalid_argument("train_from_counts: state outside X x Y");
    const double c = static_cast<double>(counts[z]);
    for (std::size_t i = 0; i < space.size(); ++i) s.cumulative_loss[i] += c * loss_l1(space.hypothesis(i), pt);
    s.steps += counts[z];
  }
  return s;
}

WeightState train_weighted(const FiniteHypothesisSpace& space, std::span<const StatePoint> points,
                           std::span<const double> counts, double alpha, double y_slack) {
  if (points.size() != counts.size()) throw std::invalid_argument("train_weighted: one count per point");
  WeightState s = initial_weights(space, alpha);
  double total = 0.0;
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (counts[j] < 0.0) throw std::invalid_argument("train_weighted: negative count");
    if (counts[j] == 0.0) continue;
    if (!space.domain().contains(points[j], y_slack))
      throw std::invalid_argument("train_weighted: observation outside X x Y");
    for (std::size_t i = 0; i < space.size(); ++i)
      s.cumulative_loss[i] += counts[j] * loss_l1(space.hypothesis(i), points[j]);
    total += counts[j];
  }
  s.steps = static_cast<std::uint64_t>(total);
  return s;
}

std::vector<double> log_normalized_weights(const WeightState& state, const FiniteHypothesisSpace& space) {
  if (state.size() != space.size()) throw std::invalid_argument("weights: state does not match the space");
  const double log_alpha = std::log(state.alpha);
  // Work with losses relative to the best supported one; the difference of two
  // large cumulative losses is exact where their products with ln(alpha) are not.
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state.size(); ++i)
    if (space.prior(i) > 0.0) best = std::min(best, state.cumulative_loss[i]);
  std::vector<double> logw(state.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    logw[i] = (state.cumulative_loss[i] - best) * log_alpha;
    if (space.prior(i) > 0.0) acc += space.prior(i) * std::exp(logw[i]);
  }
  const double log_norm = std::log(acc);
  for (auto& v : logw) v -= log_norm;
  return logw;
}

double normalized_weight(const WeightState& state, std::size_t index, const FiniteHypothesisSpace& space) {
  return std::exp(log_normalized_weights(state, space).at(index));
}

std::vector<double> normalized_weights(const WeightState& state, const FiniteHypothesisSpace& space) {
  auto lw = log_normalized_weights(state, space);
  for (auto& v : lw) v = std::exp(v);
  return lw;
}

std::vector<double> posterior_masses(const WeightState& state, const FiniteHypothesisSpace& space) {
  auto p = normalized_weights(state, space);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] *= space.prior(i);
  return p;
}

Prediction predict(const WeightState& state, std::span<const double> x, const FiniteHypothesisSpace& space) {
  const auto mass = posterior_masses(state, space);
  double v = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i)
    if (mass[i] > 0.0) v += mass[i] * space.hypothesis(i)(x);
  Prediction p;
  p.value = space.domain().y.clamp(v);
  p.method = PredictionMethod::exact;
  return p;
}

double mixture_expected_loss(const WeightState& state, const FiniteHypothesisSpace& space,
                             const FiniteChainSpec& spec, const Eigen::VectorXd& pi) {
  double l = 0.0;
  for (std::size_t z = 0; z < spec.size(); ++z) {
    const auto& pt = spec.state(z);
    l += pi(static_cast<Eigen::Index>(z)) * std::abs(predict(state, pt.x, space).value - pt.y);
  }
  return l;
}

double mixture_excess_loss(const WeightState& state, const FiniteHypothesisSpace& space,
                           const FiniteChainSpec& spec, const Eigen::VectorXd& pi, std::size_t reference) {
  const auto mass = posterior_masses(state, space);
  const Eigen::MatrixXd r = residual_table(space, spec);
  const auto ref = static_cast<Eigen::Index>(reference);
  double excess = 0.0;
  for (Eigen::Index z = 0; z < r.cols(); ++z) {
    const double a = r(ref, z);
    double d = 0.0;
    for (Eigen::Index i = 0; i < r.rows(); ++i)
      if (i != ref && mass[static_cast<std::size_t>(i)] > 0.0) d += mass[static_cast<std::size_t>(i)] * (r(i, z) - a);
    // |a + d| - |a|, exact in the common case where a + d keeps the sign of a
    double diff;
    if (a > 0.0 && a + d >= 0.0) diff = d;
    else if (a < 0.0 && a + d <= 0.0) diff = -d;
    else diff = std::abs(a + d) - std::abs(a);
    excess += pi(z) * diff;
  }
  return excess;
}

}  // namespace bwa
