#include "bwa/mcmc.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "bwa/rng.hpp"
#include "bwa/stats.hpp"

namespace bwa {

namespace {

/// Distinct observations with multiplicities; the log target only needs these.
struct WeightedPoints {
  std::vector<StatePoint> points;
  std::vector<double> counts;
};

WeightedPoints compress(const Trajectory& traj) {
  std::map<std::pair<std::vector<double>, double>, double> tally;
  for (const auto& z : traj.points) tally[{z.x, z.y}] += 1.0;
  WeightedPoints w;
  for (const auto& [key, c] : tally) {
    w.points.push_back(StatePoint{key.first, key.second});
    w.counts.push_back(c);
  }
  return w;
}

double reflect(double v, const Interval& b) {
  const double w = b.hi - b.lo;
  if (w <= 0.0) return b.lo;
  // fold onto [lo, lo + 2w) then mirror the upper half
  double t = std::fmod(v - b.lo, 2.0 * w);
  if (t < 0.0) t += 2.0 * w;
  return b.lo + (t <= w ? t : 2.0 * w - t);
}

long long reflect_index(long long i, long long g) {
  if (g <= 1) return 0;
  // mirror with the boundary between -1 and 0 (and between g-1 and g)
  const long long period = 2 * g;
  long long t = i % period;
  if (t < 0) t += period;
  return t < g ? t : period - 1 - t;
}

}  // namespace

Prediction predict_mcmc(const AffineFamily& family, const Trajectory& traj, double alpha,
                        std::span<const double> x, const McmcOptions& options) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("predict_mcmc: alpha must lie in (0, 1)");
  if (options.samples < 100) throw std::invalid_argument("predict_mcmc: need at least 100 samples");
  if (options.thin == 0) throw std::invalid_argument("predict_mcmc: thin must be >= 1");
  if (x.size() != family.input_dimension()) throw std::invalid_argument("predict_mcmc: input dimension mismatch");

  const auto& box = family.box();
  const std::size_t dims = box.size();
  const auto grid = family.grid();

  bool collapsed = true;
  for (const auto& b : box) collapsed = collapsed && b.width() == 0.0;
  if (collapsed || (grid && *grid == 1)) {
    std::vector<double> theta(dims);
    for (std::size_t j = 0; j < dims; ++j) theta[j] = grid ? family.grid_value(j, 0) : box[j].lo;
    Prediction p;
    p.value = family.evaluate(theta, x);
    p.method = PredictionMethod::mcmc;
    p.mc_error = 0.0;
    p.acceptance_rate = 1.0;
    return p;
  }

  const WeightedPoints data = compress(traj);
  const double log_alpha = std::log(alpha);
  auto log_target = [&](std::span<const double> theta) {
    double cum = 0.0;
    for (std::size_t i = 0; i < data.points.size(); ++i)
      cum += data.counts[i] * std::abs(family.evaluate(theta, data.points[i].x) - data.points[i].y);
    return cum * log_alpha;
  };

  CounterRng rng(options.seed, 2);
  std::vector<double> theta(dims);
  std::vector<long long> index(dims, 0);
  std::vector<double> step(dims);
  std::vector<long long> step_cells(dims);
  for (std::size_t j = 0; j < dims; ++j) {
    if (grid) {
      index[j] = static_cast<long long>(*grid / 2);
      theta[j] = family.grid_value(j, static_cast<std::size_t>(index[j]));
      step_cells[j] = std::max<long long>(1, std::llround(options.step_fraction * static_cast<double>(*grid - 1)));
    } else {
      theta[j] = 0.5 * (box[j].lo + box[j].hi);
      step[j] = options.step_fraction * box[j].width();
    }
  }

  double current = log_target(theta);
  std::vector<double> proposal(theta);
  std::vector<long long> proposal_index(index);
  std::vector<double> kept;
  kept.reserve(options.samples);
  std::size_t accepted = 0;
  std::size_t proposed = 0;
  const std::size_t total = options.burn_in + options.samples * options.thin;

  for (std::size_t it = 0; it < total; ++it) {
    for (std::size_t j = 0; j < dims; ++j) {
      if (grid) {
        const long long span = 2 * step_cells[j] + 1;
        const auto delta = static_cast<long long>(rng.uniform() * static_cast<double>(span)) - step_cells[j];
        proposal_index[j] = reflect_index(index[j] + delta, static_cast<long long>(*grid));
        proposal[j] = family.grid_value(j, static_cast<std::size_t>(proposal_index[j]));
      } else {
        proposal[j] = reflect(theta[j] + (2.0 * rng.uniform() - 1.0) * step[j], box[j]);
      }
    }
    const double cand = log_target(proposal);
    const double u = rng.uniform();
    const bool after_burn = it >= options.burn_in;
    if (after_burn) ++proposed;
    if (std::log(u) < cand - current) {
      theta = proposal;
      index = proposal_index;
      current = cand;
      if (after_burn) ++accepted;
    }
    if (after_burn && (it - options.burn_in + 1) % options.thin == 0) kept.push_back(family.evaluate(theta, x));
  }

  const auto bm = batch_means(kept, std::min(options.batches, kept.size()));
  Prediction p;
  p.value = bm.mean;
  p.method = PredictionMethod::mcmc;
  p.mc_error = bm.std_error;
  p.acceptance_rate = proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
  if (*p.acceptance_rate < 0.05 || *p.acceptance_rate > 0.95)
    p.warning = "acceptance rate " + std::to_string(*p.acceptance_rate) + " outside [0.05, 0.95]";
  return p;
}

}  // namespace bwa
