#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nichelab/genome.hpp"
#include "nichelab/mutation.hpp"
#include "nichelab/population.hpp"
#include "nichelab/random.hpp"

namespace nichelab {

enum class MechanismKind { ProbabilisticCrowding, RestrictedTournament, DeterministicCrowding, PlainReplaceWorst };

enum class DistanceKind { Genotypic, Phenotypic };

std::string_view to_string(MechanismKind kind);  // "pc", "rts", "dc", "plain"
std::string_view to_string(DistanceKind kind);   // "geno", "pheno"
MechanismKind parse_mechanism_kind(std::string_view text);
DistanceKind parse_distance_kind(std::string_view text);

// Survivor-selection rule plus its parameters. Window size and distance
// exist exactly when the kind is RestrictedTournament.
class MechanismSpec {
public:
  static MechanismSpec probabilistic_crowding() { return MechanismSpec{MechanismKind::ProbabilisticCrowding}; }
  static MechanismSpec deterministic_crowding() { return MechanismSpec{MechanismKind::DeterministicCrowding}; }
  static MechanismSpec plain_replace_worst() { return MechanismSpec{MechanismKind::PlainReplaceWorst}; }
  /// Throws std::invalid_argument if window == 0.
  static MechanismSpec restricted_tournament(std::size_t window, DistanceKind distance);
  /// Builds any kind; window/distance must be given iff kind is RTS.
  static MechanismSpec make(MechanismKind kind, std::optional<std::size_t> window,
                            std::optional<DistanceKind> distance);

  MechanismKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> window() const noexcept { return window_; }
  std::optional<DistanceKind> distance() const noexcept { return distance_; }

  /// "pc", "dc", "plain", "rts(w=8,geno)".
  std::string label() const;

  friend bool operator==(const MechanismSpec&, const MechanismSpec&) = default;

private:
  explicit MechanismSpec(MechanismKind kind) : kind_{kind} {}

  MechanismKind kind_;
  std::optional<std::size_t> window_;
  std::optional<DistanceKind> distance_;
};

// What one generation did. The offspring's flip positions (relative to the
// parent) are available from Stepper::last_flips().
struct StepRecord {
  std::size_t parent_index = 0;
  std::size_t offspring_ones = 0;
  FitnessValue offspring_fitness = 0;
  bool accepted = false;
  std::optional<std::size_t> replaced_index;
};

// In-place generation driver. Owns scratch buffers so that a step performs
// no allocation once warmed up. Random draws per step, in order:
//
//   1. parent index          uniform_below(mu)
//   2. mutation              sample_flip_positions(n, ...)
//   3. survivor selection
//        pc     uniform_below(f(x)+f(y)), accept iff < f(y)
//               (uniform_below(2) == 0 when f(x)+f(y) == 0)
//        rts    w x uniform_below(mu) for the pool, then uniform_below(ties)
//               only when more than one pool entry is closest
//        dc     none
//        plain  uniform_below(count) only when accepted and several
//               members share the minimum fitness
class Stepper {
public:
  explicit Stepper(MechanismSpec spec, MutationSampler sampler = MutationSampler::GeometricSkip);

  const MechanismSpec& spec() const noexcept { return spec_; }

  StepRecord step(Population& population, RandomStream& rng);

  std::span<const std::size_t> last_flips() const noexcept { return flips_; }

private:
  void materialize_offspring(const Population& population, std::size_t parent);

  MechanismSpec spec_;
  MutationSampler sampler_;
  std::vector<std::size_t> flips_;
  std::vector<std::size_t> pool_;
  std::vector<std::size_t> ties_;
  std::optional<Genome> offspring_;
};

/// Ones-count of parent after flipping `positions`.
std::size_t ones_after_flips(const Genome& parent, std::size_t parent_ones,
                             std::span<const std::size_t> positions);

/// Fitness-proportional duel: true with probability f_off / (f_parent + f_off),
/// or 1/2 when both are zero.
bool pc_accepts(FitnessValue parent_fitness, FitnessValue offspring_fitness, RandomStream& rng);

/// RTS survivor selection against an explicit pool of population indices
/// (duplicates allowed). Picks the pool entry closest to the offspring, ties
/// uniform over pool entries, and returns its index iff the offspring is at
/// least as fit. `ties` is scratch space.
std::optional<std::size_t> rts_tournament(const Population& population, const Genome& offspring,
                                          std::size_t offspring_ones,
                                          std::span<const std::size_t> pool, DistanceKind distance,
                                          RandomStream& rng, std::vector<std::size_t>& ties);

std::optional<std::size_t> rts_tournament(const Population& population, const Genome& offspring,
                                          std::size_t offspring_ones,
                                          std::span<const std::size_t> pool, DistanceKind distance,
                                          RandomStream& rng);

/// Plain (mu+1) survivor selection: index of a uniformly chosen
/// minimum-fitness member iff the offspring is at least as fit as it.
std::optional<std::size_t> replace_worst_target(const Population& population,
                                                FitnessValue offspring_fitness, RandomStream& rng);

// Value form of one generation, for tests and traces.
struct StepOutcome {
  Population next_population;
  Genome offspring;
  std::size_t parent_index;
  bool offspring_accepted;
  std::optional<std::size_t> replaced_index;
};

StepOutcome probabilistic_crowding_step(const Population& p, RandomStream& rng);
StepOutcome rts_step(const Population& p, const MechanismSpec& spec, RandomStream& rng);
StepOutcome deterministic_crowding_step(const Population& p, RandomStream& rng);
StepOutcome plain_replace_worst_step(const Population& p, RandomStream& rng);
StepOutcome apply_step(const Population& p, const MechanismSpec& spec, RandomStream& rng);

} // namespace nichelab
