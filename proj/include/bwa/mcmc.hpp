#pragma once

#include <cstdint>
#include <span>

#include "bwa/chain.hpp"
#include "bwa/hypothesis.hpp"
#include "bwa/weights.hpp"

namespace bwa {

struct McmcOptions {
  std::size_t samples = 2000;  ///< m, kept after burn-in and thinning; >= 100
  std::size_t burn_in = 1000;
  std::size_t thin = 5;
  std::size_t batches = 20;    ///< batch means for the standard error
  double step_fraction = 0.1;  ///< per-coordinate step as a fraction of the box width
  std::uint64_t seed = 0;
};

/// Random-walk Metropolis over the affine family's parameters targeting
/// w_n(theta) mu(theta). Proposals are uniform in +-step per coordinate and are
/// reflected at the box faces (on grid indices when the family is a grid), which
/// keeps the proposal symmetric. The step is fixed; burn-in is not used to tune
/// it. Returns the mean of h_theta(x) over the kept samples with a batch-means
/// standard error. A box collapsed to a point returns its hypothesis exactly.
Prediction predict_mcmc(const AffineFamily& family, const Trajectory& traj, double alpha,
                        std::span<const double> x, const McmcOptions& options);

}  // namespace bwa
