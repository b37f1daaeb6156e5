#include <doctest.h>

#include <cmath>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "nichelab/mechanisms.hpp"
#include "nichelab/theory.hpp"

using namespace nichelab;
using theory::Rational;
using boost::multiprecision::cpp_int;

namespace {

// Drift by enumerating every flip mask of x = 1^k 0^(n-k). Exact.
Rational enumerated_pc_drift(std::size_t n, std::size_t k) {
  Rational total = 0;
  const cpp_int denom = boost::multiprecision::pow(cpp_int(n), static_cast<unsigned>(n));
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    long long fy = static_cast<long long>(k);
    unsigned flips = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if ((mask >> i) & 1u) {
        ++flips;
        fy += i < k ? -1 : 1;
      }
    }
    const long long fx = static_cast<long long>(k);
    if (fx + fy == 0) {
      continue;
    }
    const Rational p(boost::multiprecision::pow(cpp_int(n - 1), n - flips), denom);
    total += p * Rational(fy, fx + fy) * (fy - fx);
  }
  return total;
}

// Gap event by brute force over member categories. Each member is low
// (2 ones <= n - 2 sigma), high (2 ones >= n + 2 sigma), both or neither.
double gap_probability_brute(std::size_t n, std::size_t mu, double sigma) {
  double p_low = 0;
  double p_high = 0;
  double p_both = 0;
  for (std::size_t c = 0; c <= n; ++c) {
    const double pc = std::exp(std::lgamma(n + 1.0) - std::lgamma(c + 1.0) - std::lgamma(n - c + 1.0) -
                               static_cast<double>(n) * std::log(2.0));
    const bool low = 2.0 * c <= n - 2 * sigma;
    const bool high = 2.0 * c >= n + 2 * sigma;
    p_both += low && high ? pc : 0;
    p_low += low && !high ? pc : 0;
    p_high += high && !low ? pc : 0;
  }
  const double p[4] = {p_low, p_high, p_both, 1 - p_low - p_high - p_both};
  std::vector<int> cat(mu, 0);
  double total = 0;
  while (true) {
    double prob = 1;
    for (auto c : cat) {
      prob *= p[c];
    }
    bool ok = false;
    for (std::size_t i = 0; i < mu && !ok; ++i) {
      for (std::size_t j = 0; j < mu && !ok; ++j) {
        const bool li = cat[i] == 0 || cat[i] == 2;
        const bool hj = cat[j] == 1 || cat[j] == 2;
        ok = i != j && li && hj;
      }
    }
    total += ok ? prob : 0;
    std::size_t pos = 0;
    while (pos < mu && ++cat[pos] == 4) {
      cat[pos++] = 0;
    }
    if (pos == mu) {
      break;
    }
  }
  return total;
}

} // namespace

TEST_SUITE("theory") {

TEST_CASE("crowding drift at n = 2, k = 1: enumeration vs simulation") {
  const Rational exact = enumerated_pc_drift(2, 1);
  CHECK(exact == Rational(1, 6));
  CHECK(theory::exact_pc_drift_rational(2, 1) == exact);
  CHECK(static_cast<double>(theory::exact_pc_drift(2, 1).value) == doctest::Approx(1.0 / 6).epsilon(1e-15));

  Population pop{{Genome::from_string("10")}, FitnessFunction{FitnessKind::OneMax}};
  Stepper stepper{MechanismSpec::probabilistic_crowding()};
  RandomStream rng{2024};
  const int steps = 10'000'000;
  double sum = 0;
  for (int i = 0; i < steps; ++i) {
    const auto rec = stepper.step(pop, rng);
    if (rec.accepted) {
      sum += static_cast<double>(rec.offspring_fitness) - 1.0;
      pop.apply_flips(0, stepper.last_flips(), 1);
    }
  }
  CHECK(std::abs(sum / steps - 1.0 / 6) <= 0.001);
}

TEST_CASE("crowding drift: both routes equal exhaustive enumeration for n <= 10") {
  for (std::size_t n = 1; n <= 10; ++n) {
    for (std::size_t k = 0; k <= n; ++k) {
      const Rational exact = enumerated_pc_drift(n, k);
      INFO("n=" << n << " k=" << k);
      CHECK(theory::exact_pc_drift_rational(n, k) == exact);
      const double fl = static_cast<double>(theory::exact_pc_drift(n, k, {0}).value);
      CHECK(fl == doctest::Approx(exact.convert_to<double>()).epsilon(1e-14));
    }
  }
}

TEST_CASE("crowding drift: float and rational routes agree to 10 digits up to n = 200") {
  for (std::size_t n : {20, 50, 101, 200}) {
    for (std::size_t k : {std::size_t{0}, n / 4, n / 2, (3 * n) / 5, n - 1, n}) {
      const double exact = theory::exact_pc_drift_rational(n, k).convert_to<double>();
      const auto fl = theory::exact_pc_drift(n, k);
      INFO("n=" << n << " k=" << k);
      CHECK(std::abs(static_cast<double>(fl.value) - exact) <= 1e-10 * std::max(std::abs(exact), 1e-300));
      CHECK(fl.discarded_mass < 1e-40L);
    }
  }
}

TEST_CASE("crowding drift: sign and size at the balance point and above it") {
  for (std::size_t n : {100, 200, 400}) {
    const double at_half = static_cast<double>(theory::exact_pc_drift(n, n / 2).value);
    CHECK(at_half * n > 0);
    CHECK(at_half * n < 1);
    const double above = static_cast<double>(theory::exact_pc_drift(n, (6 * n) / 10).value);
    CHECK(above < 0);
    // Offspring drift halved plus an O(1/n) term.
    CHECK(above <= theory::exact_offspring_drift(n, (6 * n) / 10) / 2 + 1.5 / n);
  }
  const auto table = theory::make_drift_table(60);
  CHECK(table.entries.size() == 61);
  CHECK(table.entries[40] == theory::exact_pc_drift(60, 40).value);
}

TEST_CASE("offspring drift closed form") {
  CHECK(theory::exact_offspring_drift(100, 50) == 0.0);
  CHECK(theory::exact_offspring_drift(100, 100) == -1.0);
  CHECK(theory::exact_offspring_drift(200, 120) == doctest::Approx(-0.2));
  CHECK(theory::exact_offspring_drift_rational(200, 120) == Rational(-1, 5));
  CHECK(theory::exact_offspring_drift_rational(7, 0) == Rational(1));
}

TEST_CASE("binomial upper tail") {
  const double direct = 1 - std::pow(0.9, 10) - 10 * 0.1 * std::pow(0.9, 9);
  CHECK(static_cast<double>(theory::binomial_upper_tail(10, 0.1L, 1)) == doctest::Approx(direct).epsilon(1e-12));
  CHECK(theory::binomial_upper_tail(10, 0.1L, 10) == 0);
}

TEST_CASE("initial gap: closed-form bound and exact probability") {
  for (std::size_t mu : {1, 2, 3, 10}) {
    CHECK(theory::init_gap_lower_bound(101, mu, 0.0) == 1 - std::ldexp(1.0, 1 - static_cast<int>(mu)));
  }
  CHECK(theory::init_gap_probability_exact(101, 1, 0.0) == 0.0);
  for (std::size_t n : {8, 9, 20, 101}) {
    for (std::size_t mu : {1, 2, 3, 4, 5}) {
      for (double sigma : {0.0, 1.0, 2.5}) {
        INFO("n=" << n << " mu=" << mu << " sigma=" << sigma);
        const double brute = gap_probability_brute(n, mu, sigma);
        CHECK(theory::init_gap_probability_exact(n, mu, sigma) == doctest::Approx(brute).epsilon(1e-12));
        CHECK(brute >= theory::init_gap_lower_bound(n, mu, sigma) - 1e-12);
      }
    }
  }
}

TEST_CASE("initial gap: Monte Carlo reports") {
  RandomStream rng{31};
  const auto r = theory::init_gap_probability_mc(101, 10, 5.0, 200000, rng);
  CHECK(r.verdict == theory::Verdict::Consistent);
  CHECK(r.sample_count == 200000);
  CHECK(std::abs(r.empirical_value - theory::init_gap_probability_exact(101, 10, 5.0)) < 0.005);
  const auto single = theory::init_gap_probability_mc(101, 1, 0.0, 10000, rng);
  CHECK(single.empirical_value == 0.0);
}

TEST_CASE("takeover bound") {
  using Dec = boost::multiprecision::cpp_dec_float_50;
  const std::size_t mu = 8;
  const std::size_t w = 2;
  const std::size_t n = 1000;
  Dec product = 1;
  for (std::size_t i = 1; i < mu; ++i) {
    const Dec ratio = Dec(mu - i) / Dec(mu);
    const Dec term = 1 - Dec(4 * mu) / (Dec(i * n) * pow(ratio, static_cast<int>(w)));
    product *= term > 0 ? term : Dec(0);
  }
  const auto bound = theory::rts_takeover_bound(mu, w, n);
  REQUIRE(bound);
  CHECK(*bound > 0);
  CHECK(std::abs(*bound - product.convert_to<double>()) <= 1e-12 * product.convert_to<double>());

  double prev = 2;
  for (std::size_t ww = 2; ww <= 5; ++ww) {
    const double b = *theory::rts_takeover_bound(mu, ww, n);
    CHECK(b <= prev);
    prev = b;
  }
  CHECK(*theory::rts_takeover_bound(8, 8, 64) == 0.0);
  CHECK_FALSE(theory::rts_takeover_bound(1, 2, 1000));
  CHECK_FALSE(theory::rts_takeover_bound(8, 1, 1000));
  CHECK_FALSE(theory::rts_takeover_bound(8, 2, 63));
}

TEST_CASE("named bounds") {
  CHECK(theory::det_crowding_success_lower_bound(8) == 0.9921875);
  const auto det = theory::theorem_bound("det_crowding_success_lb", {8, 100});
  REQUIRE(det.size() == 1);
  CHECK(det[0].value == 0.9921875);

  const auto rts = theory::theorem_bound("rts_success_lb", {8, 100});
  REQUIRE(rts.size() == 2);
  CHECK(rts[0].value == doctest::Approx(1 - std::pow(2.0, -std::log2(100.0) + 3)));
  CHECK(rts[0].value == doctest::Approx(0.92));
  CHECK(rts[1].value == doctest::Approx(1 - std::pow(2.0, -std::log(100.0) + 3)));
  CHECK(theory::rts_success_lower_bound(4, 1 << 20, theory::LogBase::Two) == 0.5);

  const auto climb = theory::theorem_bound("climb_budget", {2, 100});
  REQUIRE(climb.size() == 1);
  CHECK(climb[0].value == doctest::Approx(2 * std::exp(1.0) * 2 * 100 * std::log(100.0)));
  CHECK(climb[0].value == doctest::Approx(5007.26).epsilon(1e-5));

  CHECK_THROWS_AS(theory::theorem_bound("no_such_bound", {2, 100}), std::invalid_argument);
}

} // TEST_SUITE
