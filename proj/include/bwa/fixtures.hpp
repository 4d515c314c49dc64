#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bwa/chain.hpp"
#include "bwa/hypothesis.hpp"
#include "bwa/tasks.hpp"

namespace bwa {

/// A chain together with a finite hypothesis space over its states.
struct Fixture {
  std::string name;
  FiniteChainSpec chain;
  FiniteHypothesisSpace space;
  SpaceCapacity capacity;
  TaskKind task = TaskKind::regression;
};

/// Built-in fixtures:
///   reference         4 states on [0, 1], kernel 0.4 I + 0.6 1 pi^T with
///                     pi = (0.4, 0.3, 0.2, 0.1); five tabulated hypotheses that
///                     all over-predict, one optimal (l = 0.05), one near-optimal
///                     (0.095) and three bad (>= 0.36); uniform prior.
///   two_state         [[0.9, 0.1], [0.5, 0.5]] with four constant hypotheses.
///   three_state       a 3-state kernel without renewal structure, five constants.
///   classify_pair     binary targets on the two-state chain.
///   classify_ladder   binary targets on the reference chain, non-uniform prior.
///   classify_offspace threshold target on the three-state chain; the target is
///                     not in the space, so gamma* > 0.
Fixture make_fixture(std::string_view name);
std::vector<std::string> fixture_names();
/// Chains of every fixture plus the X-only chains used for the target construction.
std::vector<FiniteChainSpec> fixture_chains();

/// X-only chains (targets ignored) for augment_with_target.
FiniteChainSpec x_chain(std::string_view name);
std::vector<std::string> x_chain_names();

/// h(x) = clamp(a x + b), (a, b) in [-1, 1] x [0, 1], 51 x 51 grid, Y = [0, 1].
AffineFamily grid_affine_family(std::size_t grid = 51);

}  // namespace bwa
