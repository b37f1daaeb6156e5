#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "nichelab/mechanisms.hpp"

using namespace nichelab;

namespace {

Population make_pop(std::initializer_list<const char*> bits, FitnessKind kind = FitnessKind::TwoMax) {
  std::vector<Genome> g;
  for (auto b : bits) {
    g.push_back(Genome::from_string(b));
  }
  return Population{std::move(g), FitnessFunction{kind}};
}

// Brute force over all mu^w ordered pools. Within a pool the winner is drawn
// uniformly from the closest entries, counting repeated indices separately.
// Returns P(member i is replaced) and P(rejected) at index mu.
std::vector<double> rts_oracle(const Population& pop, const Genome& y, std::size_t w, DistanceKind d) {
  const std::size_t mu = pop.size();
  const FitnessValue fy = pop.fitness_function()(y);
  std::vector<double> prob(mu + 1, 0.0);
  std::vector<std::size_t> pool(w, 0);
  const double pool_weight = std::pow(static_cast<double>(mu), -static_cast<double>(w));
  while (true) {
    std::vector<std::size_t> dist(w);
    for (std::size_t j = 0; j < w; ++j) {
      dist[j] = d == DistanceKind::Genotypic ? hamming_distance(y, pop[pool[j]].genome)
                                              : phenotypic_distance(y, pop[pool[j]].genome);
    }
    const std::size_t best = *std::min_element(dist.begin(), dist.end());
    const auto ties = static_cast<double>(std::count(dist.begin(), dist.end(), best));
    for (std::size_t j = 0; j < w; ++j) {
      if (dist[j] != best) {
        continue;
      }
      const std::size_t z = pool[j];
      prob[fy >= pop[z].fitness ? z : mu] += pool_weight / ties;
    }
    std::size_t pos = 0;
    while (pos < w && ++pool[pos] == mu) {
      pool[pos++] = 0;
    }
    if (pos == w) {
      break;
    }
  }
  return prob;
}

std::vector<double> rts_empirical(const Population& pop, const Genome& y, std::size_t w, DistanceKind d,
                                  int trials, std::uint64_t seed) {
  RandomStream rng{seed};
  std::vector<double> freq(pop.size() + 1, 0.0);
  std::vector<std::size_t> pool(w);
  for (int t = 0; t < trials; ++t) {
    for (auto& p : pool) {
      p = rng.uniform_below(pop.size());
    }
    const auto z = rts_tournament(pop, y, y.ones_count(), pool, d, rng);
    freq[z ? *z : pop.size()] += 1.0 / trials;
  }
  return freq;
}

} // namespace

TEST_SUITE("mechanisms") {

TEST_CASE("mechanism spec validation and labels") {
  CHECK_THROWS_AS(MechanismSpec::restricted_tournament(0, DistanceKind::Genotypic), std::invalid_argument);
  CHECK_THROWS_AS(MechanismSpec::make(MechanismKind::ProbabilisticCrowding, 3, std::nullopt), std::invalid_argument);
  CHECK_THROWS_AS(MechanismSpec::make(MechanismKind::RestrictedTournament, std::nullopt, std::nullopt),
                  std::invalid_argument);
  CHECK(MechanismSpec::restricted_tournament(8, DistanceKind::Phenotypic).label() == "rts(w=8,pheno)");
  CHECK(MechanismSpec::deterministic_crowding().label() == "dc");
  CHECK(parse_mechanism_kind("plain") == MechanismKind::PlainReplaceWorst);
  CHECK_THROWS(parse_distance_kind("euclid"));
}

TEST_CASE("rts oracle: symmetric population rejects the valley offspring") {
  const auto pop = make_pop({"0000", "0000", "1111", "1111"});
  const auto y = Genome::from_string("1110");
  const auto exact = rts_oracle(pop, y, 2, DistanceKind::Genotypic);
  CHECK(exact[4] == doctest::Approx(1.0));
  const auto emp = rts_empirical(pop, y, 2, DistanceKind::Genotypic, 100000, 3);
  CHECK(emp[4] == doctest::Approx(1.0));
}

TEST_CASE("rts oracle matches the fast path on mixed populations") {
  struct Case {
    std::vector<const char*> members;
    const char* y;
    std::size_t w;
    DistanceKind d;
  };
  const std::vector<Case> cases{
      {{"0000", "0011", "1111", "0111"}, "1011", 2, DistanceKind::Genotypic},
      {{"0000", "0011", "1111", "0111"}, "1011", 3, DistanceKind::Phenotypic},
      {{"00000", "11000", "11100", "00111", "11111"}, "01100", 4, DistanceKind::Genotypic},
      {{"0000", "1111"}, "0001", 3, DistanceKind::Genotypic},
  };
  std::uint64_t seed = 10;
  for (const auto& c : cases) {
    std::vector<Genome> g;
    for (auto m : c.members) {
      g.push_back(Genome::from_string(m));
    }
    const Population pop{g, FitnessFunction{FitnessKind::TwoMax}};
    const auto y = Genome::from_string(c.y);
    const auto exact = rts_oracle(pop, y, c.w, c.d);
    const auto emp = rts_empirical(pop, y, c.w, c.d, 400000, seed++);
    double accepted = 0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
      INFO("y=" << c.y << " outcome " << i);
      CHECK(std::abs(emp[i] - exact[i]) <= 0.004);
      accepted += i < pop.size() ? exact[i] : 0;
    }
    if (c.members.size() == 4 && c.w == 2) {
      CHECK(accepted > 0);
    }
  }
}

TEST_CASE("rts: closest member is chosen, pool of own parent improves") {
  const auto pop = make_pop({"0000", "1111"}, FitnessKind::OneMax);
  RandomStream rng{4};
  const std::vector<std::size_t> pool_a{1, 0, 1};
  CHECK(rts_tournament(pop, Genome::from_string("0001"), 1, pool_a, DistanceKind::Genotypic, rng) == 0u);
  const std::vector<std::size_t> pool_b{1, 1};
  CHECK_FALSE(rts_tournament(pop, Genome::from_string("0001"), 1, pool_b, DistanceKind::Genotypic, rng));

  const auto one = make_pop({"0100"}, FitnessKind::OneMax);
  const std::vector<std::size_t> self{0, 0};
  CHECK(rts_tournament(one, Genome::from_string("0110"), 2, self, DistanceKind::Genotypic, rng) == 0u);
  CHECK_THROWS(rts_step(one, MechanismSpec::deterministic_crowding(), rng));
}

TEST_CASE("probabilistic crowding acceptance ratio") {
  RandomStream rng{8};
  const int trials = 1'000'000;
  int accepted = 0;
  for (int i = 0; i < trials; ++i) {
    accepted += pc_accepts(50, 51, rng) ? 1 : 0;
  }
  CHECK(std::abs(accepted / double(trials) - 51.0 / 101.0) <= 0.005);
  int equal = 0;
  for (int i = 0; i < trials; ++i) {
    equal += pc_accepts(7, 7, rng) ? 1 : 0;
  }
  CHECK(std::abs(equal / double(trials) - 0.5) <= 0.005);
  int zero = 0;
  for (int i = 0; i < 100000; ++i) {
    zero += pc_accepts(0, 0, rng) ? 1 : 0;
  }
  CHECK(std::abs(zero / 1e5 - 0.5) <= 0.01);
}

TEST_CASE("probabilistic crowding with mu = 1 follows the fitness-proportional (1+1) chain") {
  // Exact one-step transition law of the ones-count on OneMax, n = 3.
  const std::size_t n = 3;
  for (std::size_t k = 0; k <= n; ++k) {
    std::vector<double> exact(n + 1, 0.0);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::size_t ones = k;
      std::size_t flips = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if ((mask >> i) & 1u) {
          ++flips;
          ones = i < k ? ones - 1 : ones + 1;
        }
      }
      const double p = std::pow(1.0 / n, flips) * std::pow(1.0 - 1.0 / n, n - flips);
      const double fx = static_cast<double>(k);
      const double fy = static_cast<double>(ones);
      const double accept = fx + fy == 0 ? 0.5 : fy / (fx + fy);
      exact[ones] += p * accept;
      exact[k] += p * (1 - accept);
    }
    Genome g{n};
    for (std::size_t i = 0; i < k; ++i) {
      g.set(i, true);
    }
    const Population start{{g}, FitnessFunction{FitnessKind::OneMax}};
    RandomStream rng{50 + k};
    std::vector<double> freq(n + 1, 0.0);
    const int trials = 300000;
    for (int t = 0; t < trials; ++t) {
      const auto out = probabilistic_crowding_step(start, rng);
      freq[out.next_population[0].ones] += 1.0 / trials;
    }
    for (std::size_t j = 0; j <= n; ++j) {
      INFO("k=" << k << " j=" << j);
      CHECK(std::abs(freq[j] - exact[j]) <= 0.005);
    }
  }
}

TEST_CASE("parent selection is uniform") {
  auto pop = make_pop({"00000", "00001", "00011", "00111", "01111"});
  Stepper stepper{MechanismSpec::deterministic_crowding()};
  RandomStream rng{17};
  std::vector<double> counts(5, 0);
  const int steps = 500000;
  for (int i = 0; i < steps; ++i) {
    Population copy = pop;
    counts[stepper.step(copy, rng).parent_index] += 1;
  }
  double stat = 0;
  for (double c : counts) {
    const double e = steps / 5.0;
    stat += (c - e) * (c - e) / e;
  }
  CHECK(stat < boost::math::quantile(boost::math::chi_squared(4.0), 0.999));
}

TEST_CASE("deterministic crowding examples") {
  // From 0^n only the full flip keeps fitness n.
  const auto pop = make_pop({"000000"});
  RandomStream rng{21};
  for (int i = 0; i < 20000; ++i) {
    const auto out = deterministic_crowding_step(pop, rng);
    if (out.offspring_accepted) {
      CHECK(twomax(out.offspring) == 6);
    } else {
      CHECK(out.next_population == pop);
    }
  }
  // Equal fitness is accepted, strictly worse is rejected.
  const auto eq = make_pop({"0011"});
  int equal_seen = 0;
  for (int i = 0; i < 20000; ++i) {
    const auto out = deterministic_crowding_step(eq, rng);
    const auto fy = twomax(out.offspring);
    if (fy == 2) {
      ++equal_seen;
      CHECK(out.offspring_accepted);
    }
    if (fy < 2) {
      CHECK_FALSE(out.offspring_accepted);
    }
  }
  CHECK(equal_seen > 0);
}

TEST_CASE("plain replace-worst examples") {
  RandomStream rng{33};
  const auto pop = make_pop({"11111000000", "00000111110", "11000110010"}, FitnessKind::OneMax);
  int improved = 0;
  for (int i = 0; i < 20000; ++i) {
    const auto out = plain_replace_worst_step(pop, rng);
    const auto fy = onemax(out.offspring);
    if (fy > 5) {
      ++improved;
      CHECK(out.offspring_accepted);
      CHECK(out.next_population.min_fitness() >= 5);
    }
    if (fy < 5) {
      CHECK_FALSE(out.offspring_accepted);
      CHECK(out.next_population == pop);
    }
  }
  CHECK(improved > 0);
  CHECK_FALSE(replace_worst_target(pop, 4, rng));
  // Ties at the minimum are split uniformly.
  std::vector<int> hits(3, 0);
  for (int i = 0; i < 30000; ++i) {
    ++hits[*replace_worst_target(pop, 5, rng)];
  }
  for (int h : hits) {
    CHECK(std::abs(h / 30000.0 - 1.0 / 3) <= 0.02);
  }
}

TEST_CASE("step invariants on random configurations") {
  RandomStream rng{77};
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + rng.uniform_below(70);
    const std::size_t mu = 1 + rng.uniform_below(10);
    const std::size_t w = 1 + rng.uniform_below(6);
    const auto d = rng.uniform_below(2) ? DistanceKind::Genotypic : DistanceKind::Phenotypic;
    for (const auto& spec : {MechanismSpec::probabilistic_crowding(), MechanismSpec::restricted_tournament(w, d),
                             MechanismSpec::deterministic_crowding(), MechanismSpec::plain_replace_worst()}) {
      Population pop = Population::random(n, mu, FitnessFunction{FitnessKind::TwoMax}, rng);
      for (int s = 0; s < 50; ++s) {
        const auto out = apply_step(pop, spec, rng);
        REQUIRE(out.next_population.size() == mu);
        CHECK(out.next_population.caches_consistent());
        CHECK(hamming_distance(out.offspring, pop[out.parent_index].genome) <= n);
        if (out.offspring_accepted) {
          CHECK(out.next_population[*out.replaced_index].genome == out.offspring);
          if (spec.kind() != MechanismKind::ProbabilisticCrowding) {
            CHECK(twomax(out.offspring) >= pop[*out.replaced_index].fitness);
          } else {
            CHECK(*out.replaced_index == out.parent_index);
          }
        } else {
          CHECK(out.next_population == pop);
        }
        pop = out.next_population;
      }
    }
  }
}

TEST_CASE("stepper and value wrappers agree") {
  for (const auto& spec : {MechanismSpec::probabilistic_crowding(),
                           MechanismSpec::restricted_tournament(3, DistanceKind::Genotypic),
                           MechanismSpec::plain_replace_worst()}) {
    RandomStream init{5};
    Population a = Population::random(40, 6, FitnessFunction{FitnessKind::TwoMax}, init);
    Population b = a;
    RandomStream r1{6};
    RandomStream r2{6};
    Stepper stepper{spec};
    for (int i = 0; i < 2000; ++i) {
      stepper.step(a, r1);
      b = apply_step(b, spec, r2).next_population;
    }
    CHECK(a == b);
  }
}

} // TEST_SUITE
