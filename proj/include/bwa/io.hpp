#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "bwa/chain.hpp"
#include "bwa/fixtures.hpp"
#include "bwa/hypothesis.hpp"
#include "bwa/tasks.hpp"
#include "bwa/weights.hpp"

namespace bwa {

using nlohmann::json;

/// Doubles in reports are printed with 17 significant digits so they round-trip.
std::string format_double(double v);

/// {"name", "states": [[x..., y], ...], "transition": [[...]], "initial": [...],
///  "domain": {"x": [[lo, hi], ...], "y": [lo, hi]}}; domain is optional.
json chain_to_json(const FiniteChainSpec& spec);
FiniteChainSpec chain_from_json(const json& j);

/// A learning problem: chain, hypotheses and their capacity constants. The space
/// is empty for a continuous affine family, which only supports MCMC prediction.
struct Problem {
  std::string name;
  FiniteChainSpec chain;
  std::optional<FiniteHypothesisSpace> space;
  std::optional<AffineFamily> family;
  SpaceCapacity capacity;
  TaskKind task = TaskKind::regression;

  /// Throws std::invalid_argument when the problem has no finite space.
  [[nodiscard]] const FiniteHypothesisSpace& finite_space() const;
};

Problem problem_from_fixture(Fixture f);

/// Resolves `fixture`, or `chain` + `space`, plus `task.kind` / `task.target`.
///
/// Space schema:
///   {"kind": "finite", "hypotheses": [{"id": 0, "values": [per-state predictions]}
///                                     | {"id": 1, "constant": 0.3}
///                                     | {"id": 2, "slope": [...], "intercept": 0.1}],
///    "prior": [...] (default uniform), "capacity": {"M", "L", "q", "d", "c"}}
///   {"kind": "affine", "box": [[lo, hi], ...], "grid": 51 (optional), "capacity": {...}}
Problem problem_from_json(const json& config);

/// Header `step,x0..x{d-1},y`, one row per observation, step counted from 0.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& in);

/// Header `hypothesis_id,cumulative_loss,log_weight,posterior_mass` with
/// log_weight = cumulative_loss * ln(alpha) and posterior_mass = P_n(h) mu(h).
void write_weights_csv(std::ostream& out, const WeightState& state, const FiniteHypothesisSpace& space);
/// Restores cumulative losses; rows must follow the space's hypothesis order and
/// log_weight must agree with `alpha`.
WeightState read_weights_csv(std::istream& in, const FiniteHypothesisSpace& space, double alpha);

json read_json_file(const std::string& path);

}  // namespace bwa
