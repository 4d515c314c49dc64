#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bwa/chain.hpp"

namespace bwa {

/// Kernel of the form P = lambda * I + (1 - lambda) * 1 nu^T: each step the
/// chain either stays put (probability lambda) or redraws its state from nu.
/// Every two-state chain with p + q <= 1 has this form, with nu = pi.
struct RenewalForm {
  double lambda = 0.0;
  Eigen::VectorXd nu;
};

/// Detects the renewal form within `tol`; nullopt when the kernel has none.
std::optional<RenewalForm> renewal_form(const FiniteChainSpec& spec, double tol = 1e-12);

enum class OccupationMethod {
  automatic,  ///< renewal when the kernel allows it, stepwise otherwise
  stepwise,   ///< walk all n steps
  renewal,    ///< closed-form draw; throws if the kernel is not renewal
};

/// Visit counts N_z of the first n states of the chain. Training under L1 loss
/// only depends on these counts, so for long horizons they stand in for the
/// trajectory.
///
/// stepwise consumes the generator exactly as sample_path does, so its counts
/// equal the histogram of sample_path(spec, n, seed). The renewal method draws
/// the same distribution in O(k) work:
///   - the first state comes from `initial`;
///   - the number of redraws among the n-1 transitions is Binomial(n-1, 1-lambda);
///   - redraw labels are Multinomial over nu;
///   - given R redraws the n steps split into R+1 runs whose lengths form a
///     uniform composition of n, so the total length of r runs out of K is
///     r + BetaBinomial(n-K, r, K-r), drawn group by group.
std::vector<std::uint64_t> sample_occupation(const FiniteChainSpec& spec, std::uint64_t n, std::uint64_t seed,
                                             OccupationMethod method = OccupationMethod::automatic);

/// Exact E[N_z] over n steps, sum_t (initial P^t)_z; test oracle and diagnostics.
Eigen::VectorXd expected_occupation(const FiniteChainSpec& spec, std::uint64_t n);

}  // namespace bwa
