#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace nichelab {

/// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of the substream owned by run `run_index` of an experiment seeded
/// with `master`:
///
///     derive_seed(m, i) = splitmix64(splitmix64(m) ^ (i + 1) * 0x9E3779B97F4A7C15)
///
/// This mapping is part of the reproducibility contract; changing it
/// changes every persisted result.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run_index) noexcept;

// Deterministic random stream backed by std::mt19937_64. All derived draws
// (uniform integers, unit reals) are computed here rather than through
// <random> distributions, whose output is implementation-defined.
class RandomStream {
public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed) : engine_{seed}, seed_{seed} {}

  static RandomStream substream(std::uint64_t master, std::uint64_t run_index) {
    return RandomStream{derive_seed(master, run_index)};
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return engine_(); }

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, bound). Lemire's multiply-shift with rejection,
  /// exactly uniform. `bound` must be positive. Always consumes at least one
  /// draw, including for bound == 1.
  std::uint64_t uniform_below(std::uint64_t bound);

  /// Uniform real in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform real in (0, 1].
  double uniform01_open_closed() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

} // namespace nichelab
