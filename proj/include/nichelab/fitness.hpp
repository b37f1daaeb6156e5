#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "nichelab/genome.hpp"

namespace nichelab {

using FitnessValue = std::int64_t;

enum class FitnessKind { OneMax, TwoMax };

std::string_view to_string(FitnessKind kind);
FitnessKind parse_fitness_kind(std::string_view text);

FitnessValue onemax(const Genome& g);
FitnessValue twomax(const Genome& g);

// A function of unitation: the value depends only on the number of ones.
// Mechanisms use `from_ones` to score offspring without re-reading bits.
class FitnessFunction {
public:
  constexpr explicit FitnessFunction(FitnessKind kind) : kind_{kind} {}

  constexpr FitnessKind kind() const noexcept { return kind_; }

  constexpr FitnessValue from_ones(std::size_t ones, std::size_t n) const noexcept {
    const auto k = static_cast<FitnessValue>(ones);
    if (kind_ == FitnessKind::OneMax) {
      return k;
    }
    const auto zeros = static_cast<FitnessValue>(n) - k;
    return k > zeros ? k : zeros;
  }

  FitnessValue operator()(const Genome& g) const { return from_ones(g.ones_count(), g.size()); }

  friend constexpr bool operator==(FitnessFunction, FitnessFunction) = default;

private:
  FitnessKind kind_;
};

} // namespace nichelab
