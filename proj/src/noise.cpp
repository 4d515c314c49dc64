#include "bwa/noise.hpp"

#include <stdexcept>
#include <string>

#include "bwa/rng.hpp"

namespace bwa {

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::uniform: return "uniform";
    case NoiseKind::two_point: return "two_point";
    case NoiseKind::adversarial: return "adversarial";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(std::string_view name) {
  if (name == "uniform") return NoiseKind::uniform;
  if (name == "two_point") return NoiseKind::two_point;
  if (name == "adversarial") return NoiseKind::adversarial;
  throw std::invalid_argument("unknown noise kind '" + std::string(name) + "'");
}

double noise_value(const NoiseSpec& spec, const StatePoint& z, double u) {
  const double half = 0.5 * spec.Xi;
  switch (spec.kind) {
    case NoiseKind::uniform: return (2.0 * u - 1.0) * half;
    case NoiseKind::two_point: return u < 0.5 ? -half : half;
    case NoiseKind::adversarial: {
      const double r = (*spec.designated)(z.x) - z.y;
      return r > 0.0 ? half : (r < 0.0 ? -half : 0.0);
    }
  }
  return 0.0;
}

Trajectory inject_noise(const Trajectory& traj, const NoiseSpec& spec) {
  if (!(spec.Xi >= 0.0)) throw std::invalid_argument("inject_noise: Xi must be nonnegative");
  if (spec.kind == NoiseKind::adversarial && !spec.designated)
    throw std::invalid_argument("inject_noise: adversarial noise needs a designated hypothesis");
  Trajectory out = traj;
  out.y_slack = traj.y_slack + 0.5 * spec.Xi;
  if (spec.Xi == 0.0) return out;
  CounterRng rng(spec.seed, 4);
  for (auto& z : out.points) z.y += noise_value(spec, z, rng.uniform());
  return out;
}

}  // namespace bwa
