#include "bwa/hypothesis.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "bwa/rng.hpp"
#include "bwa/stats.hpp"

namespace bwa {

Hypothesis constant_hypothesis(int id, double value, Interval y_range) {
  return Hypothesis(id, [value](std::span<const double>) { return value; }, y_range);
}

Hypothesis affine_hypothesis(int id, std::vector<double> slope, double intercept, Interval y_range) {
  return Hypothesis(
      id,
      [slope = std::move(slope), intercept](std::span<const double> x) {
        if (x.size() != slope.size()) throw std::invalid_argument("affine hypothesis: input dimension mismatch");
        double v = intercept;
        for (std::size_t i = 0; i < x.size(); ++i) v += slope[i] * x[i];
        return v;
      },
      y_range);
}

Hypothesis table_hypothesis(int id, std::vector<std::vector<double>> points, std::vector<double> values,
                            Interval y_range) {
  if (points.empty() || points.size() != values.size())
    throw std::invalid_argument("table hypothesis: need one value per tabulated point");
  return Hypothesis(
      id,
      [points = std::move(points), values = std::move(values)](std::span<const double> x) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < points.size(); ++i) {
          if (points[i].size() != x.size()) throw std::invalid_argument("table hypothesis: input dimension mismatch");
          double d = 0.0;
          for (std::size_t j = 0; j < x.size(); ++j) d += (points[i][j] - x[j]) * (points[i][j] - x[j]);
          if (d < best_d) {
            best_d = d;
            best = i;
          }
        }
        return values[best];
      },
      y_range);
}

FiniteHypothesisSpace FiniteHypothesisSpace::create(std::vector<Hypothesis> hypotheses, std::vector<double> prior,
                                                    Domain domain) {
  if (hypotheses.empty()) throw std::invalid_argument("hypothesis space: empty");
  if (prior.size() != hypotheses.size()) throw std::invalid_argument("hypothesis space: prior length mismatch");
  double total = 0.0;
  for (double p : prior) {
    if (!(p >= 0.0)) throw std::invalid_argument("hypothesis space: negative prior mass");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("hypothesis space: prior does not sum to 1");
  std::set<int> ids;
  for (const auto& h : hypotheses)
    if (!ids.insert(h.id()).second) throw std::invalid_argument("hypothesis space: duplicate id");

  FiniteHypothesisSpace s;
  s.hypotheses_ = std::move(hypotheses);
  s.prior_ = std::move(prior);
  s.domain_ = std::move(domain);
  return s;
}

FiniteHypothesisSpace FiniteHypothesisSpace::uniform(std::vector<Hypothesis> hypotheses, Domain domain) {
  std::vector<double> prior(hypotheses.size(), hypotheses.empty() ? 0.0 : 1.0 / static_cast<double>(hypotheses.size()));
  return create(std::move(hypotheses), std::move(prior), std::move(domain));
}

std::size_t FiniteHypothesisSpace::index_of(int id) const {
  for (std::size_t i = 0; i < hypotheses_.size(); ++i)
    if (hypotheses_[i].id() == id) return i;
  throw std::out_of_range("hypothesis space: unknown id " + std::to_string(id));
}

double loss_l1(const Hypothesis& h, const StatePoint& z) { return std::abs(h(z.x) - z.y); }

double empirical_loss(const Hypothesis& h, const Trajectory& traj) {
  if (traj.points.empty()) throw std::invalid_argument("empirical_loss: empty trajectory");
  double s = 0.0;
  for (const auto& z : traj.points) s += loss_l1(h, z);
  return s / static_cast<double>(traj.points.size());
}

double expected_loss(const Hypothesis& h, const FiniteChainSpec& spec, const Eigen::VectorXd& pi) {
  if (static_cast<std::size_t>(pi.size()) != spec.size())
    throw std::invalid_argument("expected_loss: stationary distribution does not match the chain");
  double s = 0.0;
  for (std::size_t z = 0; z < spec.size(); ++z) s += pi(static_cast<Eigen::Index>(z)) * loss_l1(h, spec.state(z));
  return s;
}

std::vector<double> expected_losses(const FiniteHypothesisSpace& space, const FiniteChainSpec& spec,
                                    const Eigen::VectorXd& pi) {
  std::vector<double> out;
  out.reserve(space.size());
  for (const auto& h : space.hypotheses()) out.push_back(expected_loss(h, spec, pi));
  return out;
}

Eigen::MatrixXd residual_table(const FiniteHypothesisSpace& space, const FiniteChainSpec& spec) {
  Eigen::MatrixXd r(static_cast<Eigen::Index>(space.size()), static_cast<Eigen::Index>(spec.size()));
  for (std::size_t i = 0; i < space.size(); ++i)
    for (std::size_t z = 0; z < spec.size(); ++z)
      r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(z)) =
          space.hypothesis(i)(spec.state(z).x) - spec.state(z).y;
  return r;
}

LossConstants constants_ML(const FiniteHypothesisSpace& space, const FiniteChainSpec& spec) {
  const Eigen::MatrixXd r = residual_table(space, spec);
  LossConstants out;
  out.M = r.cwiseAbs().maxCoeff();
  double L = 0.0;
  bool any_pair = false;
  const auto m = r.rows();
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = a + 1; b < m; ++b) {
      // h_a - h_b on the states equals r_a - r_b
      const double sup = (r.row(a) - r.row(b)).cwiseAbs().maxCoeff();
      if (sup <= 0.0) continue;
      any_pair = true;
      const double num = (r.row(a).cwiseAbs() - r.row(b).cwiseAbs()).cwiseAbs().maxCoeff();
      L = std::max(L, num / sup);
    }
  }
  if (!any_pair) {
    out.L = 1.0;
    out.L_undefined = true;
  } else {
    out.L = L > 0.0 ? L : 1.0;
  }
  return out;
}

double log_covering_number_bound(SpaceKind kind, double eps, const SpaceCapacity& cap, std::size_t m) {
  if (!(eps > 0.0)) throw std::invalid_argument("covering_number_bound: eps must be positive");
  const double capacity = cap.c * std::pow(eps, -2.0 * static_cast<double>(cap.d) / cap.q);
  if (kind == SpaceKind::finite) return std::min(std::log(static_cast<double>(m)), capacity);
  return capacity;
}

double covering_number_bound(SpaceKind kind, double eps, const SpaceCapacity& cap, std::size_t m) {
  return std::exp(log_covering_number_bound(kind, eps, cap, m));
}

double optimal_loss_gamma_star(std::span<const double> expected, std::span<const double> prior) {
  if (expected.size() != prior.size()) throw std::invalid_argument("gamma_star: size mismatch");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < expected.size(); ++i)
    if (prior[i] > 0.0) best = std::min(best, expected[i]);
  if (!std::isfinite(best)) throw std::invalid_argument("gamma_star: prior puts no mass on any hypothesis");
  return best;
}

double optimal_loss_gamma_star(const FiniteHypothesisSpace& space, const FiniteChainSpec& spec,
                               const Eigen::VectorXd& pi) {
  const auto losses = expected_losses(space, spec, pi);
  return optimal_loss_gamma_star(losses, space.priors());
}

double good_volume_V_eps(std::span<const double> expected, std::span<const double> prior, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("V_eps: eps must be positive");
  const double level = optimal_loss_gamma_star(expected, prior) + eps;
  double v = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i)
    if (expected[i] <= level) v += prior[i];
  return v;
}

double good_volume_V_eps(const FiniteHypothesisSpace& space, const FiniteChainSpec& spec,
                         const Eigen::VectorXd& pi, double eps) {
  const auto losses = expected_losses(space, spec, pi);
  return good_volume_V_eps(losses, space.priors(), eps);
}

AffineFamily::AffineFamily(std::vector<Interval> box, Interval y_range, std::optional<std::size_t> grid)
    : box_(std::move(box)), y_(y_range), grid_(grid) {
  if (box_.size() < 2) throw std::invalid_argument("affine family: box needs slope and intercept coordinates");
  for (const auto& b : box_)
    if (!(b.hi >= b.lo)) throw std::invalid_argument("affine family: inverted parameter interval");
  if (grid_ && *grid_ == 0) throw std::invalid_argument("affine family: grid needs at least one point");
}

double AffineFamily::evaluate(std::span<const double> theta, std::span<const double> x) const {
  if (theta.size() != box_.size() || x.size() + 1 != box_.size())
    throw std::invalid_argument("affine family: dimension mismatch");
  double v = theta.back();
  for (std::size_t i = 0; i < x.size(); ++i) v += theta[i] * x[i];
  return y_.clamp(v);
}

double AffineFamily::grid_value(std::size_t j, std::size_t i) const {
  const auto& b = box_.at(j);
  const std::size_t g = grid_.value_or(1);
  if (g == 1) return 0.5 * (b.lo + b.hi);
  return b.lo + static_cast<double>(i) * (b.hi - b.lo) / static_cast<double>(g - 1);
}

Hypothesis AffineFamily::hypothesis(int id, std::span<const double> theta) const {
  std::vector<double> slope(theta.begin(), theta.end() - 1);
  return affine_hypothesis(id, std::move(slope), theta.back(), y_);
}

FiniteHypothesisSpace AffineFamily::to_finite(const Domain& domain) const {
  if (!grid_) throw std::invalid_argument("affine family: no grid to enumerate");
  const std::size_t g = *grid_;
  const std::size_t dims = box_.size();
  std::size_t total = 1;
  for (std::size_t j = 0; j < dims; ++j) total *= g;
  std::vector<Hypothesis> hyps;
  hyps.reserve(total);
  std::vector<double> theta(dims);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t j = dims; j-- > 0;) {
      theta[j] = grid_value(j, rem % g);
      rem /= g;
    }
    hyps.push_back(hypothesis(static_cast<int>(flat), theta));
  }
  return FiniteHypothesisSpace::uniform(std::move(hyps), domain);
}

ParametricQuantities estimate_parametric_quantities(const AffineFamily& family, const FiniteChainSpec& spec,
                                                    const Eigen::VectorXd& pi, double eps, std::size_t samples,
                                                    std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("estimate_parametric_quantities: need samples");
  CounterRng rng(seed, 3);
  std::vector<double> losses(samples);
  std::vector<double> theta(family.parameter_dimension());
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t j = 0; j < theta.size(); ++j) {
      if (family.grid()) {
        const auto g = *family.grid();
        theta[j] = family.grid_value(j, std::min<std::size_t>(g - 1, static_cast<std::size_t>(rng.uniform() * g)));
      } else {
        const auto& b = family.box()[j];
        theta[j] = b.lo + rng.uniform() * (b.hi - b.lo);
      }
    }
    double l = 0.0;
    for (std::size_t z = 0; z < spec.size(); ++z)
      l += pi(static_cast<Eigen::Index>(z)) * std::abs(family.evaluate(theta, spec.state(z).x) - spec.state(z).y);
    losses[s] = l;
  }
  ParametricQuantities q;
  q.samples = samples;
  q.gamma_star_upper = *std::min_element(losses.begin(), losses.end());
  std::size_t hits = 0;
  for (double l : losses) hits += (l <= q.gamma_star_upper + eps) ? 1 : 0;
  const auto w = wilson_interval(hits, samples);
  q.V_eps = w.estimate;
  q.V_eps_lo = w.lower;
  q.V_eps_hi = w.upper;
  return q;
}

}  // namespace bwa
