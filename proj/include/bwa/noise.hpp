#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "bwa/chain.hpp"
#include "bwa/hypothesis.hpp"

namespace bwa {

enum class NoiseKind { uniform, two_point, adversarial };

std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view name);

/// Bounded label noise xi_i with |xi_i| <= Xi / 2.
///   uniform      xi ~ U[-Xi/2, Xi/2]
///   two_point    xi = +-Xi/2 with equal probability
///   adversarial  xi = (Xi/2) sign(h*(x) - y), pulling every target toward the
///                designated hypothesis h*
struct NoiseSpec {
  double Xi = 0.0;
  NoiseKind kind = NoiseKind::uniform;
  std::uint64_t seed = 0;
  std::optional<Hypothesis> designated;  ///< required for adversarial noise
};

/// The noise value for draw i. `u` is a uniform [0, 1) variate owned by the
/// caller; adversarial noise ignores it.
double noise_value(const NoiseSpec& spec, const StatePoint& z, double u);

/// Replaces each y by y + xi_i; x is untouched and targets are not clamped back
/// into Y. The result records y_slack = Xi / 2 so training accepts it.
/// Throws std::invalid_argument for negative Xi or adversarial noise without
/// a designated hypothesis.
Trajectory inject_noise(const Trajectory& traj, const NoiseSpec& spec);

}  // namespace bwa
