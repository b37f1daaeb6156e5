#include "nichelab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "nichelab/results_io.hpp"
#include "nichelab/theory.hpp"

namespace nichelab::acceptance {

namespace {

using Clock = std::chrono::steady_clock;

template <typename Body>
CriterionResult timed(int id, std::string title, Body&& body) {
  const auto start = Clock::now();
  CriterionResult r;
  r.id = id;
  r.title = std::move(title);
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail += (r.detail.empty() ? "" : "; ") + std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

RunConfig twomax_point(std::size_t n, std::size_t mu, MechanismSpec mechanism, std::uint64_t seed) {
  RunConfig cfg;
  cfg.n = n;
  cfg.mu = mu;
  cfg.mechanism = mechanism;
  cfg.fitness = FitnessKind::TwoMax;
  cfg.master_seed = seed;
  cfg.trace = TracePolicy::None;
  return cfg;
}

SweepResult sweep_or_throw(const std::vector<RunConfig>& grid, std::size_t runs, const Options& opt) {
  SweepResult s = run_sweep(grid, runs, opt.exec);
  if (s.partial) {
    throw std::runtime_error("sweep aborted: " + s.error);
  }
  return s;
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

} // namespace

CriterionResult pc_never_reaches_optimum(const Options& opt) {
  return timed(1, "probabilistic crowding reaches no optimum (n=100, mu=32, 100 runs)", [&](CriterionResult& r) {
    const auto cfg = twomax_point(100, 32, MechanismSpec::probabilistic_crowding(), opt.master_seed);
    const auto sweep = sweep_or_throw({cfg}, 100, opt);
    std::size_t with_optimum = 0;
    FitnessValue peak = 0;
    double best_final = 0;
    for (const auto& rec : sweep.runs) {
      with_optimum += (rec.result.found_zero_opt || rec.result.found_one_opt) ? 1 : 0;
      peak = std::max(peak, rec.result.peak_fitness);
      best_final = std::max(best_final, rec.result.best_normalized_fitness);
    }
    r.passed = sweep.runs.size() == 100 && with_optimum == 0;
    r.detail = std::to_string(with_optimum) + "/100 runs hold an optimum at termination; budget " +
               std::to_string(cfg.budget()) + "; highest fitness ever seen " + std::to_string(peak) +
               "; best final normalized " + fmt(best_final);
  });
}

CriterionResult pc_fitness_concentrates(const Options& opt) {
  return timed(2, "probabilistic crowding best fitness concentrates toward n/2 (small fig1 grid)", [&](CriterionResult& r) {
    const std::vector<std::size_t> ns{32, 64, 128, 256, 512, 1024};
    const auto study = best_fitness_study(ns, 32, MechanismSpec::probabilistic_crowding(), 100, opt.master_seed, opt.exec);
    bool non_increasing = true;
    std::string medians;
    for (std::size_t i = 0; i < study.size(); ++i) {
      medians += (i ? " " : "") + std::to_string(study[i].n) + ":" + fmt(study[i].stats.median, 5);
      if (i > 0 && study[i].stats.median > study[i - 1].stats.median) {
        non_increasing = false;
      }
    }
    const bool strict_drop = study.back().stats.median < study.front().stats.median;
    r.passed = non_increasing && strict_drop;
    r.detail = "medians " + medians + (non_increasing ? "" : " [not non-increasing]") +
               (strict_drop ? "" : " [no drop from n=32 to n=1024]");
  });
}

CriterionResult rts_large_window_succeeds(const Options& opt) {
  return timed(3, "RTS with w >= 2.5 mu ln n finds both optima (n=100, mu=8, 100 runs)", [&](CriterionResult& r) {
    const std::size_t w_formula = static_cast<std::size_t>(std::ceil(2.5 * 8 * std::log(100.0)));
    const std::vector<std::size_t> windows{w_formula, 922};
    std::vector<RunConfig> grid;
    for (auto w : windows) {
      grid.push_back(twomax_point(100, 8, MechanismSpec::restricted_tournament(w, DistanceKind::Genotypic), opt.master_seed));
    }
    const auto sweep = sweep_or_throw(grid, 100, opt);
    r.passed = true;
    for (const auto& s : sweep.summaries) {
      r.passed = r.passed && s.successes >= 90;
      r.detail += (r.detail.empty() ? "" : ", ") + std::string("w=") + std::to_string(*s.point.mechanism.window()) +
                  ": " + std::to_string(s.successes) + "/100";
    }
    r.detail += " (need >= 90 each; bounds 1-2^(-mu'+3): log2 " +
                fmt(theory::rts_success_lower_bound(8, 100, theory::LogBase::Two), 4) + ", ln " +
                fmt(theory::rts_success_lower_bound(8, 100, theory::LogBase::Natural), 4) + ")";
  });
}

CriterionResult rts_small_window_fails(const Options& opt) {
  return timed(4, "RTS with small mu and w loses a branch (n=100, 100 runs)", [&](CriterionResult& r) {
    const std::vector<RunConfig> grid{
        twomax_point(100, 2, MechanismSpec::restricted_tournament(1, DistanceKind::Genotypic), opt.master_seed),
        twomax_point(100, 32, MechanismSpec::restricted_tournament(8, DistanceKind::Genotypic), opt.master_seed)};
    const auto sweep = sweep_or_throw(grid, 100, opt);
    const std::size_t small = sweep.summaries.at(0).successes;
    const std::size_t large = sweep.summaries.at(1).successes;
    r.passed = small < large && small <= 20;
    r.detail = "successes(mu=2,w=1)=" + std::to_string(small) + ", successes(mu=32,w=8)=" + std::to_string(large) +
               " (need small < large and small <= 20)";
  });
}

CriterionResult pc_drift_bound(const Options& opt) {
  return timed(5, "exact crowding drift obeys -delta/2 + C/n and matches simulation", [&](CriterionResult& r) {
    // drift = E[d]/2 + E[d^2 / (2 (2k + d))] with E[d] = -delta and
    // 2k + d >= k >= n/2, so C <= E[d^2] <= 1 + delta^2 for every n.
    const std::vector<double> deltas{0.1, 0.2, 0.5};
    const std::vector<std::size_t> ns{100, 200, 400};
    double c_fit = -1e300;
    double c_min = 1e300;
    for (double delta : deltas) {
      for (auto n : ns) {
        const auto k = static_cast<std::size_t>(std::llround((1.0 + delta) * static_cast<double>(n) / 2.0));
        const auto drift = theory::exact_pc_drift(n, k);
        const double scaled = static_cast<double>(n) * (static_cast<double>(drift.value) + delta / 2.0);
        c_fit = std::max(c_fit, scaled);
        c_min = std::min(c_min, scaled);
      }
    }
    bool bound_holds = true;
    for (double delta : deltas) {
      for (auto n : ns) {
        const auto k = static_cast<std::size_t>(std::llround((1.0 + delta) * static_cast<double>(n) / 2.0));
        const double drift = static_cast<double>(theory::exact_pc_drift(n, k).value);
        bound_holds = bound_holds && drift <= -delta / 2.0 + c_fit / static_cast<double>(n);
      }
    }
    const double c_ceiling = 1.0 + 0.5 * 0.5;

    // Single-lineage simulation at n = 50, k = 30 on OneMax.
    const std::size_t n = 50;
    const std::size_t k = 30;
    const std::uint64_t steps = 10'000'000;
    Genome parent{n};
    for (std::size_t i = 0; i < k; ++i) {
      parent.set(i, true);
    }
    Population pop{{parent}, FitnessFunction{FitnessKind::OneMax}};
    Stepper stepper{MechanismSpec::probabilistic_crowding()};
    RandomStream rng = RandomStream::substream(opt.master_seed, 5);
    double sum = 0;
    double sum_sq = 0;
    for (std::uint64_t t = 0; t < steps; ++t) {
      const StepRecord rec = stepper.step(pop, rng);
      if (rec.accepted) {
        const double change = static_cast<double>(rec.offspring_fitness) - static_cast<double>(k);
        sum += change;
        sum_sq += change * change;
        pop.apply_flips(0, stepper.last_flips(), k);
      }
    }
    const double mean = sum / static_cast<double>(steps);
    const double var = sum_sq / static_cast<double>(steps) - mean * mean;
    const double se = std::sqrt(var / static_cast<double>(steps));
    const double exact = static_cast<double>(theory::exact_pc_drift(n, k).value);
    const bool mc_ok = std::fabs(mean - exact) <= 3.0 * se;

    r.passed = bound_holds && c_fit <= c_ceiling && c_min > 0 && mc_ok;
    r.detail = "fitted C=" + fmt(c_fit) + " (min " + fmt(c_min) + ", ceiling 1+delta_max^2=" + fmt(c_ceiling) +
               "); simulation " + fmt(mean, 8) + " vs exact " + fmt(exact, 8) + " (|diff|=" +
               fmt(std::fabs(mean - exact), 3) + ", 3se=" + fmt(3 * se, 3) + ")";
  });
}

CriterionResult offspring_drift_exact(const Options&) {
  return timed(6, "offspring drift (n-2k)/n equals exhaustive flip enumeration, n <= 12", [&](CriterionResult& r) {
    using boost::multiprecision::cpp_int;
    std::size_t checked = 0;
    std::size_t mismatches = 0;
    for (std::size_t n = 1; n <= 12; ++n) {
      // P(mask) = (n-1)^(n - |mask|) / n^n.
      std::vector<cpp_int> weight(n + 1);
      for (std::size_t j = 0; j <= n; ++j) {
        weight[j] = boost::multiprecision::pow(cpp_int(n - 1), static_cast<unsigned>(n - j));
      }
      const cpp_int denom = boost::multiprecision::pow(cpp_int(n), static_cast<unsigned>(n));
      for (std::size_t k = 0; k <= n; ++k) {
        cpp_int numer = 0;
        for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
          long long change = 0;
          for (std::size_t i = 0; i < n; ++i) {
            if ((mask >> i) & 1U) {
              change += i < k ? -1 : 1; // parent is 1^k 0^(n-k)
            }
          }
          numer += weight[std::popcount(mask)] * change;
        }
        const theory::Rational enumerated(numer, denom);
        const bool exact_match = enumerated == theory::exact_offspring_drift_rational(n, k);
        const bool double_match = theory::exact_offspring_drift(n, k) == enumerated.convert_to<double>();
        mismatches += (exact_match && double_match) ? 0 : 1;
        ++checked;
      }
    }
    r.passed = mismatches == 0;
    r.detail = std::to_string(checked) + " (n, k) pairs, " + std::to_string(mismatches) + " mismatches";
  });
}

CriterionResult init_gap_bound(const Options& opt) {
  return timed(7, "initial-gap probability respects its lower bound (n=101, 10^6 trials)", [&](CriterionResult& r) {
    r.passed = true;
    std::uint64_t stream = 700;
    for (std::size_t mu : {2, 10}) {
      for (double sigma : {0.0, 5.0}) {
        RandomStream rng = RandomStream::substream(opt.master_seed, stream++);
        const auto report = theory::init_gap_probability_mc(101, mu, sigma, 1'000'000, rng);
        r.passed = r.passed && report.verdict == theory::Verdict::Consistent;
        r.detail += (r.detail.empty() ? "" : "; ") + std::string("mu=") + std::to_string(mu) + " sigma=" +
                    fmt(sigma, 2) + ": " + fmt(report.empirical_value) + " vs bound " + fmt(report.analytic_value) +
                    " [" + std::string(theory::to_string(report.verdict)) + "]";
      }
      const double at_zero = theory::init_gap_lower_bound(101, mu, 0.0);
      const double expected = 1.0 - std::ldexp(1.0, 1 - static_cast<int>(mu));
      r.passed = r.passed && at_zero == expected;
    }
  });
}

CriterionResult dc_climb_budget(const Options& opt) {
  return timed(8, "deterministic crowding successes finish within 2e mu n ln n (n=100)", [&](CriterionResult& r) {
    const std::vector<RunConfig> grid{
        twomax_point(100, 4, MechanismSpec::deterministic_crowding(), opt.master_seed),
        twomax_point(100, 16, MechanismSpec::deterministic_crowding(), opt.master_seed)};
    const auto sweep = sweep_or_throw(grid, 100, opt);
    r.passed = true;
    for (std::size_t mu : {4, 16}) {
      const double budget = theory::climb_budget(mu, 100);
      std::size_t successes = 0;
      std::size_t within = 0;
      for (const auto& rec : sweep.runs) {
        if (rec.config.mu != mu || rec.result.outcome != Outcome::Success) {
          continue;
        }
        ++successes;
        within += static_cast<double>(rec.result.generations_used) <= budget ? 1 : 0;
      }
      const bool ok = successes > 0 && static_cast<double>(within) >= 0.95 * static_cast<double>(successes);
      r.passed = r.passed && ok;
      r.detail += (r.detail.empty() ? "" : "; ") + std::string("mu=") + std::to_string(mu) + ": " +
                  std::to_string(within) + "/" + std::to_string(successes) + " successes within " + fmt(budget, 7);
    }
  });
}

CriterionResult invariants_and_determinism(const Options& opt) {
  return timed(9, "population, elitism, RTS replacement and determinism properties", [&](CriterionResult& r) {
    RandomStream gen = RandomStream::substream(opt.master_seed, 900);
    std::size_t size_violations = 0;
    std::size_t cache_violations = 0;
    std::size_t elitism_violations = 0;
    std::size_t rts_violations = 0;
    std::size_t lineage_violations = 0;
    std::size_t cases = 0;

    const std::vector<MechanismKind> kinds{MechanismKind::ProbabilisticCrowding, MechanismKind::RestrictedTournament,
                                           MechanismKind::DeterministicCrowding, MechanismKind::PlainReplaceWorst};
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 1 + gen.uniform_below(40);
      const std::size_t mu = 1 + gen.uniform_below(12);
      const auto fitness = gen.uniform_below(2) ? FitnessKind::TwoMax : FitnessKind::OneMax;
      for (auto kind : kinds) {
        const auto spec = kind == MechanismKind::RestrictedTournament
                              ? MechanismSpec::restricted_tournament(
                                    1 + gen.uniform_below(8),
                                    gen.uniform_below(2) ? DistanceKind::Genotypic : DistanceKind::Phenotypic)
                              : MechanismSpec::make(kind, std::nullopt, std::nullopt);
        Population pop = Population::random(n, mu, FitnessFunction{fitness}, gen);
        Stepper stepper{spec};
        ++cases;
        for (int step = 0; step < 500; ++step) {
          const Population before = pop;
          const StepRecord rec = stepper.step(pop, gen);
          size_violations += pop.size() == mu ? 0 : 1;
          cache_violations += pop.caches_consistent() ? 0 : 1;
          std::size_t changed = 0;
          for (std::size_t i = 0; i < mu; ++i) {
            if (!(pop[i] == before[i])) {
              ++changed;
              if (!rec.replaced_index || *rec.replaced_index != i) {
                ++lineage_violations;
              }
            }
          }
          lineage_violations += changed <= 1 ? 0 : 1;
          if (kind == MechanismKind::DeterministicCrowding || kind == MechanismKind::PlainReplaceWorst) {
            elitism_violations += pop.best_fitness() >= before.best_fitness() ? 0 : 1;
          }
          if (kind == MechanismKind::RestrictedTournament && rec.accepted) {
            rts_violations += rec.offspring_fitness >= before[*rec.replaced_index].fitness ? 0 : 1;
          }
        }
      }
    }

    // Full traces of whole runs stay elitist for dc and plain.
    for (auto spec : {MechanismSpec::deterministic_crowding(), MechanismSpec::plain_replace_worst()}) {
      for (std::uint64_t run = 0; run < 20; ++run) {
        RunConfig cfg = twomax_point(30, 6, spec, opt.master_seed);
        cfg.run_index = run;
        cfg.trace = TracePolicy::Full;
        const auto result = run_single(cfg);
        for (std::size_t i = 1; i < result.trace.size(); ++i) {
          elitism_violations += result.trace[i].best_overall >= result.trace[i - 1].best_overall ? 0 : 1;
        }
      }
    }

    // Same seed and grid, different worker counts: byte-identical files.
    std::vector<RunConfig> grid{
        twomax_point(24, 4, MechanismSpec::restricted_tournament(2, DistanceKind::Phenotypic), opt.master_seed),
        twomax_point(24, 4, MechanismSpec::deterministic_crowding(), opt.master_seed),
        twomax_point(24, 4, MechanismSpec::probabilistic_crowding(), opt.master_seed)};
    for (auto& g : grid) {
      g.budget_generations = 5000;
    }
    const auto dir = std::filesystem::temp_directory_path() /
                     ("nichelab-acceptance-" + std::to_string(opt.master_seed) + "-" +
                      std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    std::filesystem::create_directories(dir);
    auto read_all = [](const std::filesystem::path& p) {
      std::ifstream in(p, std::ios::binary);
      return std::string(std::istreambuf_iterator<char>(in), {});
    };
    ExecutionOptions serial;
    serial.workers = 1;
    ExecutionOptions parallel;
    parallel.workers = 4;
    const auto a = run_sweep(grid, 10, serial);
    const auto b = run_sweep(grid, 10, parallel);
    persist_runs(dir / "a.csv", a.runs, opt.master_seed);
    persist_runs(dir / "b.csv", b.runs, opt.master_seed);
    persist_sweep(dir / "a_sweep.csv", a.summaries, opt.master_seed);
    persist_sweep(dir / "b_sweep.csv", b.summaries, opt.master_seed);
    const bool identical = read_all(dir / "a.csv") == read_all(dir / "b.csv") &&
                           read_all(dir / "a_sweep.csv") == read_all(dir / "b_sweep.csv") &&
                           load_runs(dir / "a.csv") == a.runs;
    std::filesystem::remove_all(dir);

    r.passed = size_violations == 0 && cache_violations == 0 && elitism_violations == 0 && rts_violations == 0 &&
               lineage_violations == 0 && identical;
    r.detail = std::to_string(cases) + " step sequences; violations: size " + std::to_string(size_violations) +
               ", cache " + std::to_string(cache_violations) + ", elitism " + std::to_string(elitism_violations) +
               ", rts " + std::to_string(rts_violations) + ", single-slot " + std::to_string(lineage_violations) +
               "; reruns " + (identical ? "byte-identical" : "DIFFER");
  });
  // The one-minute runtime limit is checked by the caller from r.seconds.
}

std::vector<CriterionResult> run_selected(const Options& opt, const std::vector<int>& ids) {
  using Fn = CriterionResult (*)(const Options&);
  const Fn table[] = {pc_never_reaches_optimum, pc_fitness_concentrates, rts_large_window_succeeds,
                      rts_small_window_fails,   pc_drift_bound,          offspring_drift_exact,
                      init_gap_bound,           dc_climb_budget,         invariants_and_determinism};
  std::vector<CriterionResult> out;
  for (int id : ids) {
    if (id < 1 || id > 9) {
      throw std::invalid_argument("no acceptance criterion " + std::to_string(id));
    }
    CriterionResult r = table[id - 1](opt);
    if (id == 9 && r.seconds >= 60.0) {
      r.passed = false;
      r.detail += "; took longer than one minute";
    }
    if (opt.on_result) {
      opt.on_result(r);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CriterionResult> run_all(const Options& opt) { return run_selected(opt, {1, 2, 3, 4, 5, 6, 7, 8, 9}); }

std::string format_line(const CriterionResult& r) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(1);
  os << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << ' ' << r.title << " :: " << r.detail << " (" << r.seconds
     << " s)";
  return os.str();
}

} // namespace nichelab::acceptance
