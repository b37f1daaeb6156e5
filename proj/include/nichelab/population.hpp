#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nichelab/fitness.hpp"
#include "nichelab/genome.hpp"
#include "nichelab/random.hpp"

namespace nichelab {

struct Member {
  Genome genome;
  std::size_t ones;
  FitnessValue fitness;

  friend bool operator==(const Member&, const Member&) = default;
};

// Fixed-size multiset of genomes with cached ones-counts and fitness. Size
// and genome length never change after construction; the only mutators
// replace one member at a time and keep the caches and optimum counters in
// step with the genomes.
class Population {
public:
  Population(std::vector<Genome> genomes, FitnessFunction fitness);

  /// mu genomes drawn with uniform_random_genome, in index order.
  static Population random(std::size_t n, std::size_t mu, FitnessFunction fitness,
                           RandomStream& rng);

  std::size_t size() const noexcept { return members_.size(); }
  std::size_t length() const noexcept { return n_; }
  FitnessFunction fitness_function() const noexcept { return fitness_; }

  const Member& operator[](std::size_t i) const { return members_[i]; }
  std::span<const Member> members() const noexcept { return members_; }

  FitnessValue evaluate_ones(std::size_t ones) const noexcept { return fitness_.from_ones(ones, n_); }

  /// Overwrites member i with `genome`, whose ones-count is `ones`.
  void replace(std::size_t i, const Genome& genome, std::size_t ones);
  void replace(std::size_t i, const Genome& genome) { replace(i, genome, genome.ones_count()); }

  /// Flips the given positions of member i in place; `new_ones` is the
  /// ones-count after flipping.
  void apply_flips(std::size_t i, std::span<const std::size_t> positions, std::size_t new_ones);

  std::size_t zero_optimum_count() const noexcept { return zero_optima_; }
  std::size_t one_optimum_count() const noexcept { return one_optima_; }
  bool has_both_optima() const noexcept { return zero_optima_ > 0 && one_optima_ > 0; }

  FitnessValue best_fitness() const noexcept;
  FitnessValue min_fitness() const noexcept;

  /// True iff every cached ones-count, fitness and optimum counter matches a
  /// fresh evaluation of the genomes.
  bool caches_consistent() const;

  friend bool operator==(const Population&, const Population&) = default;

private:
  void track(std::size_t ones, int delta) noexcept;

  std::size_t n_;
  FitnessFunction fitness_;
  std::vector<Member> members_;
  std::size_t zero_optima_ = 0;
  std::size_t one_optima_ = 0;
};

} // namespace nichelab
