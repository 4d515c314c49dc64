#pragma once

#include <cstdint>
#include <initializer_list>

namespace bwa {

/// Counter-based generator. Draw i of a stream is the SplitMix64 finaliser of
/// key + i * golden, so a stream is fully determined by its key and the draw
/// index. Keys are derived from (seed, stream id) so trials keyed by index are
/// reproducible and independent of evaluation order.
///
/// Satisfies UniformRandomBitGenerator so it can drive <random> distributions.
class CounterRng {
public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(derive(seed, stream)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept { return mix(key_ + (++counter_) * kGolden); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Independent child stream; does not advance this generator.
  [[nodiscard]] CounterRng split(std::uint64_t stream) const noexcept {
    return CounterRng(key_, stream);
  }

  [[nodiscard]] std::uint64_t key() const noexcept { return key_; }
  [[nodiscard]] std::uint64_t draws() const noexcept { return counter_; }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix(mix(seed ^ 0x6a09e667f3bcc909ULL) + (stream + 1) * 0xd1b54a32d192ed03ULL);
  }

private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Seed for a nested (base, i, j, ...) key path, e.g. (base seed, n, trial).
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t s = base;
  for (auto p : path) s = CounterRng::derive(s, p);
  return s;
}

}  // namespace bwa
