#include "nichelab/population.hpp"

#include <algorithm>
#include <stdexcept>

namespace nichelab {

Population::Population(std::vector<Genome> genomes, FitnessFunction fitness)
    : n_{genomes.empty() ? 0 : genomes.front().size()}, fitness_{fitness} {
  if (genomes.empty()) {
    throw std::invalid_argument("Population: needs at least one member");
  }
  members_.reserve(genomes.size());
  for (auto& g : genomes) {
    if (g.size() != n_) {
      throw std::invalid_argument("Population: all genomes must have the same length");
    }
    const auto ones = g.ones_count();
    track(ones, +1);
    members_.push_back(Member{std::move(g), ones, fitness_.from_ones(ones, n_)});
  }
}

Population Population::random(std::size_t n, std::size_t mu, FitnessFunction fitness,
                              RandomStream& rng) {
  if (mu == 0) {
    throw std::invalid_argument("Population::random: mu must be positive");
  }
  std::vector<Genome> genomes;
  genomes.reserve(mu);
  for (std::size_t i = 0; i < mu; ++i) {
    genomes.push_back(uniform_random_genome(n, rng));
  }
  return Population{std::move(genomes), fitness};
}

void Population::track(std::size_t ones, int delta) noexcept {
  auto bump = [delta](std::size_t& counter) { counter = delta > 0 ? counter + 1 : counter - 1; };
  if (ones == 0) {
    bump(zero_optima_);
  }
  if (ones == n_) {
    bump(one_optima_);
  }
}

void Population::replace(std::size_t i, const Genome& genome, std::size_t ones) {
  if (genome.size() != n_) {
    throw std::logic_error("Population::replace: genome length mismatch");
  }
  auto& m = members_.at(i);
  track(m.ones, -1);
  // Assign word-by-word so the member keeps its buffer.
  std::ranges::copy(genome.words(), m.genome.words().begin());
  m.ones = ones;
  m.fitness = fitness_.from_ones(ones, n_);
  track(ones, +1);
}

void Population::apply_flips(std::size_t i, std::span<const std::size_t> positions,
                             std::size_t new_ones) {
  auto& m = members_.at(i);
  track(m.ones, -1);
  m.genome.flip_all(positions);
  m.ones = new_ones;
  m.fitness = fitness_.from_ones(new_ones, n_);
  track(new_ones, +1);
}

FitnessValue Population::best_fitness() const noexcept {
  FitnessValue best = members_.front().fitness;
  for (const auto& m : members_) {
    best = std::max(best, m.fitness);
  }
  return best;
}

FitnessValue Population::min_fitness() const noexcept {
  FitnessValue worst = members_.front().fitness;
  for (const auto& m : members_) {
    worst = std::min(worst, m.fitness);
  }
  return worst;
}

bool Population::caches_consistent() const {
  std::size_t zeros = 0;
  std::size_t ones_opt = 0;
  for (const auto& m : members_) {
    const auto ones = m.genome.ones_count();
    if (ones != m.ones || fitness_(m.genome) != m.fitness) {
      return false;
    }
    zeros += m.genome.all_zeros() ? 1 : 0;
    ones_opt += m.genome.all_ones() ? 1 : 0;
  }
  return zeros == zero_optima_ && ones_opt == one_optima_;
}

} // namespace nichelab
