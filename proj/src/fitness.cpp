#include "nichelab/fitness.hpp"

#include <stdexcept>
#include <string>

namespace nichelab {

std::string_view to_string(FitnessKind kind) {
  return kind == FitnessKind::OneMax ? "onemax" : "twomax";
}

FitnessKind parse_fitness_kind(std::string_view text) {
  if (text == "onemax") {
    return FitnessKind::OneMax;
  }
  if (text == "twomax") {
    return FitnessKind::TwoMax;
  }
  throw std::invalid_argument("unknown fitness function '" + std::string(text) + "'");
}

FitnessValue onemax(const Genome& g) { return FitnessFunction{FitnessKind::OneMax}(g); }

FitnessValue twomax(const Genome& g) { return FitnessFunction{FitnessKind::TwoMax}(g); }

} // namespace nichelab
