#include "bwa/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "bwa/rng.hpp"

namespace bwa {

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::regression: return "regression";
    case TaskKind::classification: return "classification";
    case TaskKind::deterministic_target: return "deterministic_target";
  }
  return "unknown";
}

TaskKind parse_task_kind(std::string_view name) {
  if (name == "regression") return TaskKind::regression;
  if (name == "classification") return TaskKind::classification;
  if (name == "deterministic_target") return TaskKind::deterministic_target;
  throw std::invalid_argument("unknown task kind '" + std::string(name) + "'");
}

double RandomClassifier::probability(std::span<const double> x) const {
  const auto mass = posterior_masses(*state_, *space_);
  double p = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i)
    if (mass[i] > 0.0) p += mass[i] * space_->hypothesis(i)(x);
  if (p < -1e-9 || p > 1.0 + 1e-9)
    throw std::domain_error("classify: h_bar(x) = " + std::to_string(p) + " is not a probability");
  return std::clamp(p, 0.0, 1.0);
}

int RandomClassifier::classify(std::span<const double> x, std::uint64_t draw_index) const {
  const double p = probability(x);
  CounterRng rng(derive_seed(seed_, {draw_index}), 5);
  return rng.uniform() < p ? 1 : 0;
}

ClassificationError expected_error(const WeightState& state, const FiniteHypothesisSpace& space,
                                   const FiniteChainSpec& spec, const Eigen::VectorXd& pi, std::size_t mc_draws,
                                   std::uint64_t seed) {
  for (const auto& z : spec.states())
    if (z.y != 0.0 && z.y != 1.0) throw std::invalid_argument("expected_error: state targets must be 0 or 1");
  if (mc_draws == 0) throw std::invalid_argument("expected_error: need at least one draw");

  RandomClassifier clf(state, space, seed);
  std::vector<double> prob(spec.size());
  for (std::size_t z = 0; z < spec.size(); ++z) prob[z] = clf.probability(spec.state(z).x);

  ClassificationError out;
  out.draws = mc_draws;
  for (std::size_t z = 0; z < spec.size(); ++z)
    out.exact += pi(static_cast<Eigen::Index>(z)) * std::abs(prob[z] - spec.state(z).y);

  std::vector<double> cdf(spec.size());
  double acc = 0.0;
  for (std::size_t z = 0; z < spec.size(); ++z) cdf[z] = (acc += pi(static_cast<Eigen::Index>(z)));
  CounterRng states(seed, 6);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < mc_draws; ++i) {
    const std::size_t z = sample_index(cdf, states.uniform());
    const int label = clf.classify(spec.state(z).x, i);
    if (label != static_cast<int>(spec.state(z).y)) ++wrong;
  }
  out.mc = static_cast<double>(wrong) / static_cast<double>(mc_draws);
  out.std_error = std::sqrt(out.exact * (1.0 - out.exact) / static_cast<double>(mc_draws));
  return out;
}

TargetFunction named_target(std::string_view name, Interval y_range) {
  if (name == "identity")
    return [y_range](std::span<const double> x) { return y_range.clamp(x.empty() ? 0.0 : x[0]); };
  if (name == "threshold")
    return [y_range](std::span<const double> x) { return y_range.clamp(!x.empty() && x[0] >= 0.5 ? 1.0 : 0.0); };
  if (name == "constant") return [y_range](std::span<const double>) { return 0.5 * (y_range.lo + y_range.hi); };
  throw std::invalid_argument("unknown target '" + std::string(name) + "'");
}

std::vector<std::string> target_names() { return {"identity", "threshold", "constant"}; }

FiniteChainSpec augment_with_target(const FiniteChainSpec& x_spec, const TargetFunction& c, Interval y_range,
                                    std::string name) {
  std::vector<StatePoint> states;
  states.reserve(x_spec.size());
  for (const auto& z : x_spec.states()) states.push_back(StatePoint{z.x, c(z.x)});
  Domain dom{x_spec.domain().x_box, y_range};
  if (name.empty()) name = x_spec.name() + "+target";
  return FiniteChainSpec::create(std::move(states), x_spec.transition(), x_spec.initial(), dom, std::move(name));
}

FullAugmentedChain augmented_full_kernel(const FiniteChainSpec& x_spec, const TargetFunction& c,
                                         std::span<const double> labels) {
  const std::size_t k = x_spec.size();
  const std::size_t m = labels.size();
  std::vector<std::size_t> target(k);
  for (std::size_t x = 0; x < k; ++x) {
    const double cx = c(x_spec.state(x).x);
    std::size_t j = 0;
    while (j < m && labels[j] != cx) ++j;
    if (j == m) throw std::invalid_argument("augmented_full_kernel: c(x) is not among the labels");
    target[x] = j;
  }
  const auto pi_x = stationary_distribution(x_spec).probabilities;
  const auto& P = x_spec.transition();

  FullAugmentedChain out;
  const auto size = static_cast<Eigen::Index>(k * m);
  out.transition = Eigen::MatrixXd::Zero(size, size);
  out.stationary = Eigen::VectorXd::Zero(size);
  out.on_target.resize(k * m);
  out.x_index.resize(k * m);
  for (std::size_t x = 0; x < k; ++x) {
    for (std::size_t y = 0; y < m; ++y) {
      const auto row = static_cast<Eigen::Index>(x * m + y);
      out.x_index[x * m + y] = x;
      out.on_target[x * m + y] = y == target[x];
      if (y == target[x]) {
        out.stationary(row) = pi_x(static_cast<Eigen::Index>(x));
        for (std::size_t x2 = 0; x2 < k; ++x2)
          out.transition(row, static_cast<Eigen::Index>(x2 * m + target[x2])) =
              P(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x2));
      } else {
        out.transition(row, static_cast<Eigen::Index>(x * m + target[x])) = 1.0;
      }
    }
  }
  return out;
}

bool augmented_envelope_holds(const FullAugmentedChain& chain, const ErgodicityCertificate& x_cert,
                              std::size_t horizon) {
  const Eigen::Index size = chain.transition.rows();
  Eigen::MatrixXd power = chain.transition;
  for (std::size_t n = 1; n <= horizon; ++n) {
    const double env = x_cert.gamma * std::pow(x_cert.rho, static_cast<double>(n));
    for (Eigen::Index z = 0; z < size; ++z) {
      const auto idx = static_cast<std::size_t>(z);
      const double vx = x_cert.V.at(chain.x_index[idx]);
      const double v = chain.on_target[idx] ? vx : vx / x_cert.rho;
      const double tv = (power.row(z).transpose() - chain.stationary).cwiseAbs().sum();
      if (tv > env * v * (1.0 + 1e-12) + kTvFloor) return false;
    }
    power = power * chain.transition;
  }
  return true;
}

const Hypothesis& erm_select(const FiniteHypothesisSpace& space, std::span<const double> loss) {
  if (loss.size() != space.size()) throw std::invalid_argument("erm: one loss per hypothesis");
  std::size_t best = 0;
  for (std::size_t i = 1; i < space.size(); ++i) {
    if (loss[i] < loss[best] || (loss[i] == loss[best] && space.hypothesis(i).id() < space.hypothesis(best).id()))
      best = i;
  }
  return space.hypothesis(best);
}

const Hypothesis& erm_train(const FiniteHypothesisSpace& space, const Trajectory& traj) {
  if (traj.points.empty()) throw std::invalid_argument("erm_train: empty trajectory");
  std::vector<double> loss(space.size(), 0.0);
  for (const auto& z : traj.points)
    for (std::size_t i = 0; i < space.size(); ++i) loss[i] += loss_l1(space.hypothesis(i), z);
  return erm_select(space, loss);
}

const Hypothesis& erm_train_from_counts(const FiniteHypothesisSpace& space, const FiniteChainSpec& spec,
                                        std::span<const std::uint64_t> counts) {
  if (counts.size() != spec.size()) throw std::invalid_argument("erm_train: one count per state");
  std::vector<double> loss(space.size(), 0.0);
  for (std::size_t z = 0; z < spec.size(); ++z) {
    if (counts[z] == 0) continue;
    for (std::size_t i = 0; i < space.size(); ++i)
      loss[i] += static_cast<double>(counts[z]) * loss_l1(space.hypothesis(i), spec.state(z));
  }
  return erm_select(space, loss);
}

}  // namespace bwa
