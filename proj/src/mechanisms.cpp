#include "nichelab/mechanisms.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace nichelab {

std::string_view to_string(MechanismKind kind) {
  switch (kind) {
  case MechanismKind::ProbabilisticCrowding:
    return "pc";
  case MechanismKind::RestrictedTournament:
    return "rts";
  case MechanismKind::DeterministicCrowding:
    return "dc";
  case MechanismKind::PlainReplaceWorst:
    return "plain";
  }
  return "?";
}

std::string_view to_string(DistanceKind kind) {
  return kind == DistanceKind::Genotypic ? "geno" : "pheno";
}

MechanismKind parse_mechanism_kind(std::string_view text) {
  for (auto k : {MechanismKind::ProbabilisticCrowding, MechanismKind::RestrictedTournament,
                 MechanismKind::DeterministicCrowding, MechanismKind::PlainReplaceWorst}) {
    if (text == to_string(k)) {
      return k;
    }
  }
  throw std::invalid_argument("unknown mechanism '" + std::string(text) + "'");
}

DistanceKind parse_distance_kind(std::string_view text) {
  if (text == "geno") {
    return DistanceKind::Genotypic;
  }
  if (text == "pheno") {
    return DistanceKind::Phenotypic;
  }
  throw std::invalid_argument("unknown distance '" + std::string(text) + "'");
}

MechanismSpec MechanismSpec::restricted_tournament(std::size_t window, DistanceKind distance) {
  if (window == 0) {
    throw std::invalid_argument("restricted tournament window must be at least 1");
  }
  MechanismSpec spec{MechanismKind::RestrictedTournament};
  spec.window_ = window;
  spec.distance_ = distance;
  return spec;
}

MechanismSpec MechanismSpec::make(MechanismKind kind, std::optional<std::size_t> window,
                                  std::optional<DistanceKind> distance) {
  if (kind == MechanismKind::RestrictedTournament) {
    if (!window) {
      throw std::invalid_argument("restricted tournament needs a window size");
    }
    return restricted_tournament(*window, distance.value_or(DistanceKind::Genotypic));
  }
  if (window || distance) {
    throw std::invalid_argument("window size and distance apply only to restricted tournament");
  }
  return MechanismSpec{kind};
}

std::string MechanismSpec::label() const {
  std::string out{to_string(kind_)};
  if (kind_ == MechanismKind::RestrictedTournament) {
    out += "(w=" + std::to_string(*window_) + "," + std::string(to_string(*distance_)) + ")";
  }
  return out;
}

std::size_t ones_after_flips(const Genome& parent, std::size_t parent_ones,
                             std::span<const std::size_t> positions) {
  std::size_t ones = parent_ones;
  for (auto i : positions) {
    if (parent.get(i)) {
      --ones;
    } else {
      ++ones;
    }
  }
  return ones;
}

bool pc_accepts(FitnessValue parent_fitness, FitnessValue offspring_fitness, RandomStream& rng) {
  const auto total = parent_fitness + offspring_fitness;
  if (total == 0) {
    return rng.uniform_below(2) == 0;
  }
  return rng.uniform_below(static_cast<std::uint64_t>(total)) <
         static_cast<std::uint64_t>(offspring_fitness);
}

std::optional<std::size_t> rts_tournament(const Population& population, const Genome& offspring,
                                          std::size_t offspring_ones,
                                          std::span<const std::size_t> pool, DistanceKind distance,
                                          RandomStream& rng, std::vector<std::size_t>& ties) {
  if (pool.empty()) {
    throw std::invalid_argument("rts_tournament: empty pool");
  }
  ties.clear();
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (auto idx : pool) {
    const Member& m = population[idx];
    const std::size_t d = distance == DistanceKind::Genotypic
                              ? hamming_distance(offspring, m.genome)
                              : (offspring_ones > m.ones ? offspring_ones - m.ones : m.ones - offspring_ones);
    if (d < best) {
      best = d;
      ties.clear();
    }
    if (d == best) {
      ties.push_back(idx);
    }
  }
  const std::size_t z = ties.size() == 1 ? ties.front() : ties[rng.uniform_below(ties.size())];
  if (population.evaluate_ones(offspring_ones) >= population[z].fitness) {
    return z;
  }
  return std::nullopt;
}

std::optional<std::size_t> rts_tournament(const Population& population, const Genome& offspring,
                                          std::size_t offspring_ones,
                                          std::span<const std::size_t> pool, DistanceKind distance,
                                          RandomStream& rng) {
  std::vector<std::size_t> ties;
  return rts_tournament(population, offspring, offspring_ones, pool, distance, rng, ties);
}

std::optional<std::size_t> replace_worst_target(const Population& population,
                                                FitnessValue offspring_fitness, RandomStream& rng) {
  const FitnessValue worst = population.min_fitness();
  if (offspring_fitness < worst) {
    return std::nullopt;
  }
  std::size_t count = 0;
  for (const auto& m : population.members()) {
    count += m.fitness == worst ? 1 : 0;
  }
  std::size_t pick = count == 1 ? 0 : rng.uniform_below(count);
  for (std::size_t i = 0; i < population.size(); ++i) {
    if (population[i].fitness == worst && pick-- == 0) {
      return i;
    }
  }
  return std::nullopt; // unreachable
}

Stepper::Stepper(MechanismSpec spec, MutationSampler sampler) : spec_{spec}, sampler_{sampler} {}

void Stepper::materialize_offspring(const Population& population, std::size_t parent) {
  const Genome& source = population[parent].genome;
  if (!offspring_ || offspring_->size() != source.size()) {
    offspring_.emplace(source);
  } else {
    std::ranges::copy(source.words(), offspring_->words().begin());
  }
  offspring_->flip_all(flips_);
}

StepRecord Stepper::step(Population& population, RandomStream& rng) {
  const std::size_t mu = population.size();
  const std::size_t n = population.length();

  StepRecord rec;
  rec.parent_index = static_cast<std::size_t>(rng.uniform_below(mu));
  sample_flip_positions(n, rng, flips_, sampler_);

  const Member& parent = population[rec.parent_index];
  rec.offspring_ones = ones_after_flips(parent.genome, parent.ones, flips_);
  rec.offspring_fitness = population.evaluate_ones(rec.offspring_ones);

  switch (spec_.kind()) {
  case MechanismKind::ProbabilisticCrowding:
    if (pc_accepts(parent.fitness, rec.offspring_fitness, rng)) {
      rec.replaced_index = rec.parent_index;
    }
    break;
  case MechanismKind::DeterministicCrowding:
    if (rec.offspring_fitness >= parent.fitness) {
      rec.replaced_index = rec.parent_index;
    }
    break;
  case MechanismKind::RestrictedTournament: {
    const std::size_t w = *spec_.window();
    pool_.resize(w);
    for (auto& slot : pool_) {
      slot = static_cast<std::size_t>(rng.uniform_below(mu));
    }
    materialize_offspring(population, rec.parent_index);
    rec.replaced_index =
        rts_tournament(population, *offspring_, rec.offspring_ones, pool_, *spec_.distance(), rng, ties_);
    break;
  }
  case MechanismKind::PlainReplaceWorst:
    rec.replaced_index = replace_worst_target(population, rec.offspring_fitness, rng);
    break;
  }

  rec.accepted = rec.replaced_index.has_value();
  if (!rec.accepted) {
    return rec;
  }
  if (*rec.replaced_index == rec.parent_index) {
    population.apply_flips(rec.parent_index, flips_, rec.offspring_ones);
  } else {
    if (spec_.kind() != MechanismKind::RestrictedTournament) {
      materialize_offspring(population, rec.parent_index);
    }
    population.replace(*rec.replaced_index, *offspring_, rec.offspring_ones);
  }
  return rec;
}

StepOutcome apply_step(const Population& p, const MechanismSpec& spec, RandomStream& rng) {
  Stepper stepper{spec};
  Population next{p};
  const StepRecord rec = stepper.step(next, rng);
  Genome offspring{p[rec.parent_index].genome};
  offspring.flip_all(stepper.last_flips());
  return StepOutcome{std::move(next), std::move(offspring), rec.parent_index, rec.accepted,
                     rec.replaced_index};
}

StepOutcome probabilistic_crowding_step(const Population& p, RandomStream& rng) {
  return apply_step(p, MechanismSpec::probabilistic_crowding(), rng);
}

StepOutcome rts_step(const Population& p, const MechanismSpec& spec, RandomStream& rng) {
  if (spec.kind() != MechanismKind::RestrictedTournament) {
    throw std::invalid_argument("rts_step: spec must be a restricted tournament");
  }
  return apply_step(p, spec, rng);
}

StepOutcome deterministic_crowding_step(const Population& p, RandomStream& rng) {
  return apply_step(p, MechanismSpec::deterministic_crowding(), rng);
}

StepOutcome plain_replace_worst_step(const Population& p, RandomStream& rng) {
  return apply_step(p, MechanismSpec::plain_replace_worst(), rng);
}

} // namespace nichelab
