// nichelab command-line front end.
//
// Exit codes: 0 completed, 1 usage error, 2 runtime or I/O error,
// 3 verification failure.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nichelab/acceptance.hpp"
#include "nichelab/experiments.hpp"
#include "nichelab/results_io.hpp"
#include "nichelab/theory.hpp"

namespace fs = std::filesystem;
using namespace nichelab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitVerify = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::size_t workers = 0;

  ExecutionOptions exec() const {
    ExecutionOptions e;
    e.workers = workers;
    return e;
  }
};

void add_workers(CLI::App* cmd, Common& common) {
  cmd->add_option("--workers", common.workers, "Concurrent runs (0: NICHELAB_WORKERS or all cores)")
      ->capture_default_str();
}

std::vector<std::size_t> powers_of_two(std::size_t from, std::size_t to) {
  std::vector<std::size_t> out;
  for (std::size_t v = from; v <= to; v *= 2) {
    out.push_back(v);
  }
  return out;
}

std::string join(const std::vector<std::size_t>& values) {
  std::string out;
  for (auto v : values) {
    out += (out.empty() ? "" : " ") + std::to_string(v);
  }
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ResultsError(ResultsError::Kind::Io, dir, "cannot create output directory");
  }
}

// ---------------------------------------------------------------------------
// run / sweep
// ---------------------------------------------------------------------------

struct RunFlags {
  std::size_t n = 0;
  std::size_t mu = 0;
  std::string mechanism;
  std::optional<std::size_t> w;
  std::optional<std::string> distance;
  std::string fitness = "twomax";
  std::uint64_t seed = 1;
  std::uint64_t run_index = 0;
  std::optional<std::uint64_t> budget;
  std::string trace = "branch";
  std::string out;
  std::string trace_out;
};

MechanismSpec mechanism_from(const std::string& name, std::optional<std::size_t> w,
                             const std::optional<std::string>& distance) {
  const MechanismKind kind = parse_mechanism_kind(name);
  if (kind != MechanismKind::RestrictedTournament) {
    if (w) {
      throw UsageError("--w applies only to --mechanism rts");
    }
    if (distance) {
      throw UsageError("--distance applies only to --mechanism rts");
    }
    return MechanismSpec::make(kind, std::nullopt, std::nullopt);
  }
  if (!w) {
    throw UsageError("--mechanism rts requires --w");
  }
  return MechanismSpec::restricted_tournament(*w, distance ? parse_distance_kind(*distance) : DistanceKind::Genotypic);
}

int cmd_run(const RunFlags& f) {
  RunConfig cfg;
  cfg.n = f.n;
  cfg.mu = f.mu;
  cfg.mechanism = mechanism_from(f.mechanism, f.w, f.distance);
  cfg.fitness = parse_fitness_kind(f.fitness);
  cfg.budget_generations = f.budget;
  cfg.master_seed = f.seed;
  cfg.run_index = f.run_index;
  cfg.trace = parse_trace_policy(f.trace);
  cfg.validate();

  const RunResult result = run_single(cfg);
  if (!f.out.empty()) {
    const RunRecord rec{cfg, result};
    persist_runs(f.out, std::span<const RunRecord>(&rec, 1), cfg.master_seed);
  }
  if (!f.trace_out.empty()) {
    write_trace(f.trace_out, result.trace);
  }
  std::printf("%s n=%zu mu=%zu %s %s: %s after %llu generations, best fitness %lld (%.4f), optima zero=%s one=%s\n",
              std::string(to_string(cfg.fitness)).c_str(), cfg.n, cfg.mu, cfg.mechanism.label().c_str(),
              ("seed=" + std::to_string(cfg.master_seed)).c_str(), std::string(to_string(result.outcome)).c_str(),
              static_cast<unsigned long long>(result.generations_used),
              static_cast<long long>(result.best_fitness_final), result.best_normalized_fitness,
              result.found_zero_opt ? "yes" : "no", result.found_one_opt ? "yes" : "no");
  return kExitOk;
}

struct SweepFlags {
  std::size_t n = 100;
  std::vector<std::size_t> mu{2};
  std::string mechanism = "rts";
  std::vector<std::size_t> w;
  std::vector<std::string> distance;
  std::string fitness = "twomax";
  std::size_t runs = 10;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> budget;
  std::string out;
  std::string runs_out;
};

int cmd_sweep(const SweepFlags& f, const Common& common) {
  const MechanismKind kind = parse_mechanism_kind(f.mechanism);
  std::vector<MechanismSpec> specs;
  if (kind == MechanismKind::RestrictedTournament) {
    if (f.w.empty()) {
      throw UsageError("--mechanism rts requires --w");
    }
    const std::vector<std::string> distances = f.distance.empty() ? std::vector<std::string>{"geno"} : f.distance;
    for (const auto& d : distances) {
      for (auto w : f.w) {
        specs.push_back(MechanismSpec::restricted_tournament(w, parse_distance_kind(d)));
      }
    }
  } else {
    specs.push_back(mechanism_from(f.mechanism, f.w.empty() ? std::nullopt : std::optional{f.w.front()},
                                   f.distance.empty() ? std::nullopt : std::optional{f.distance.front()}));
  }
  std::vector<RunConfig> grid;
  for (const auto& spec : specs) {
    for (auto mu : f.mu) {
      RunConfig cfg;
      cfg.n = f.n;
      cfg.mu = mu;
      cfg.mechanism = spec;
      cfg.fitness = parse_fitness_kind(f.fitness);
      cfg.budget_generations = f.budget;
      cfg.master_seed = f.seed;
      cfg.trace = TracePolicy::None;
      cfg.validate();
      grid.push_back(cfg);
    }
  }
  const SweepResult sweep = run_sweep(grid, f.runs, common.exec());
  persist_sweep(f.out, sweep.summaries, f.seed);
  if (!f.runs_out.empty()) {
    persist_runs(f.runs_out, sweep.runs, f.seed);
  }
  for (const auto& s : sweep.summaries) {
    std::printf("mu=%zu %s: %zu/%zu successes\n", s.point.mu, s.point.mechanism.label().c_str(), s.successes, s.runs);
  }
  if (sweep.partial) {
    std::fprintf(stderr, "sweep aborted: %s\n", sweep.error.c_str());
    return kExitRuntime;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// fig1 / fig2
// ---------------------------------------------------------------------------

struct FigFlags {
  std::size_t runs = 100;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  bool small = false;
};

int cmd_fig1(const FigFlags& f, const Common& common) {
  const std::vector<std::size_t> ns = powers_of_two(32, f.small ? 1024 : 16384);
  const fs::path dir{f.out_dir};
  ensure_dir(dir);
  const auto study =
      best_fitness_study(ns, 32, MechanismSpec::probabilistic_crowding(), f.runs, f.seed, common.exec());
  const std::vector<std::string> comments{
      std::string("grid=") + (f.small ? "small (n capped at 1024)" : "full"), "n=" + join(ns),
      "mu=32 mechanism=pc fitness=twomax runs=" + std::to_string(f.runs), "master_seed=" + std::to_string(f.seed)};
  write_fitness_table(dir / "fig1_fitness.csv", study, comments);
  for (const auto& d : study) {
    std::printf("n=%zu median best normalized fitness %.5f\n", d.n, d.stats.median);
  }
  return kExitOk;
}

int cmd_fig2(const FigFlags& f, const Common& common) {
  const std::vector<std::size_t> mus = powers_of_two(2, f.small ? 128 : 1024);
  const std::vector<std::size_t> ws = powers_of_two(1, 128);
  const fs::path dir{f.out_dir};
  ensure_dir(dir);
  std::vector<RunConfig> grid;
  for (auto d : {DistanceKind::Genotypic, DistanceKind::Phenotypic}) {
    for (auto mu : mus) {
      for (auto w : ws) {
        RunConfig cfg;
        cfg.n = 100;
        cfg.mu = mu;
        cfg.mechanism = MechanismSpec::restricted_tournament(w, d);
        cfg.master_seed = f.seed;
        cfg.trace = TracePolicy::None;
        grid.push_back(cfg);
      }
    }
  }
  const SweepResult sweep = run_sweep(grid, f.runs, common.exec());
  const Metadata meta{{"grid", f.small ? "small" : "full"}};
  persist_sweep(dir / "fig2_sweep.csv", sweep.summaries, f.seed, meta);
  persist_runs(dir / "fig2_runs.csv", sweep.runs, f.seed, meta);
  const std::vector<std::string> comments{
      std::string("grid=") + (f.small ? "small (mu capped at 128)" : "full"),
      "n=100 fitness=twomax runs=" + std::to_string(f.runs), "master_seed=" + std::to_string(f.seed)};
  write_success_table(dir / "fig2_success_geno.csv", sweep.summaries, DistanceKind::Genotypic, comments);
  write_success_table(dir / "fig2_success_pheno.csv", sweep.summaries, DistanceKind::Phenotypic, comments);
  std::printf("%zu grid points, %zu runs, tables in %s\n", sweep.summaries.size(), sweep.runs.size(),
              dir.string().c_str());
  if (sweep.partial) {
    std::fprintf(stderr, "sweep aborted: %s\n", sweep.error.c_str());
    return kExitRuntime;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// oracle / verify
// ---------------------------------------------------------------------------

struct OracleFlags {
  std::string check;
  std::size_t n = 100;
  std::optional<std::size_t> k;
  std::size_t mu = 2;
  std::size_t w = 2;
  double sigma = 0;
  std::uint64_t trials = 1'000'000;
  std::uint64_t seed = 1;
  std::string name;
};

void print_report(const theory::BoundReport& r) {
  std::printf("%s: analytic=%s empirical=%s samples=%llu verdict=%s%s%s\n", r.name.c_str(),
              format_real(r.analytic_value).c_str(), format_real(r.empirical_value).c_str(),
              static_cast<unsigned long long>(r.sample_count), std::string(theory::to_string(r.verdict)).c_str(),
              r.note.empty() ? "" : " ", r.note.c_str());
}

int cmd_oracle(const OracleFlags& f) {
  if (f.check == "drift") {
    const std::size_t k = f.k.value_or(f.n / 2);
    if (k > f.n) {
      throw UsageError("--k must not exceed --n");
    }
    const auto drift = theory::exact_pc_drift(f.n, k);
    const double offspring = theory::exact_offspring_drift(f.n, k);
    std::printf("n=%zu k=%zu crowding drift=%s (discarded mass %s, %zu terms) offspring drift=%s\n", f.n, k,
                format_real(static_cast<double>(drift.value)).c_str(),
                format_real(static_cast<double>(drift.discarded_mass)).c_str(), drift.terms,
                format_real(offspring).c_str());
    theory::BoundReport r;
    r.name = "crowding_drift_upper";
    r.empirical_value = static_cast<double>(drift.value);
    const double delta = (2.0 * static_cast<double>(k) - static_cast<double>(f.n)) / static_cast<double>(f.n);
    if (2 * k <= f.n) {
      r.note = "upper bound needs k > n/2";
    } else {
      // Upper bound -delta/2 + (1 + delta^2)/n.
      r.analytic_value = -delta / 2.0 + (1.0 + delta * delta) / static_cast<double>(f.n);
      r.verdict = r.empirical_value <= r.analytic_value ? theory::Verdict::Consistent : theory::Verdict::Violated;
      r.note = "delta=" + format_real(delta);
    }
    print_report(r);
    return r.verdict == theory::Verdict::Violated ? kExitVerify : kExitOk;
  }
  if (f.check == "init-gap") {
    RandomStream rng{derive_seed(f.seed, 0)};
    const auto r = theory::init_gap_probability_mc(f.n, f.mu, f.sigma, f.trials, rng);
    print_report(r);
    return r.verdict == theory::Verdict::Violated ? kExitVerify : kExitOk;
  }
  if (f.check == "takeover") {
    const auto bound = theory::rts_takeover_bound(f.mu, f.w, f.n);
    theory::BoundReport r;
    r.name = "rts_takeover_lb";
    if (bound) {
      r.analytic_value = *bound;
      r.verdict = theory::Verdict::Consistent;
      r.note = "analytic only";
    } else {
      r.note = "needs mu >= 2, w >= 2 and 8 mu <= n";
    }
    print_report(r);
    return kExitOk;
  }
  if (f.check == "bounds") {
    if (f.name.empty()) {
      throw UsageError("--check bounds requires --name");
    }
    for (const auto& v : theory::theorem_bound(f.name, theory::BoundParams{f.mu, f.n})) {
      std::printf("%s = %s\n", v.label.c_str(), format_real(v.value).c_str());
    }
    return kExitOk;
  }
  throw UsageError("unknown --check '" + f.check + "'");
}

int cmd_verify(std::uint64_t seed, const std::vector<int>& only, const Common& common) {
  acceptance::Options opt;
  opt.master_seed = seed;
  opt.exec = common.exec();
  opt.on_result = [](const acceptance::CriterionResult& r) {
    std::printf("%s\n", acceptance::format_line(r).c_str());
    std::fflush(stdout);
  };
  const auto results = only.empty() ? acceptance::run_all(opt) : acceptance::run_selected(opt, only);
  std::size_t passed = 0;
  for (const auto& r : results) {
    passed += r.passed ? 1 : 0;
  }
  std::printf("%zu/%zu criteria passed\n", passed, results.size());
  return passed == results.size() ? kExitOk : kExitVerify;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Niching (mu+1) EA laboratory on OneMax and TwoMax"};
  app.name("nichelab");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  Common common;

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Run one configuration");
  run->add_option("--n", run_flags.n, "Bit-string length")->required();
  run->add_option("--mu", run_flags.mu, "Population size")->required();
  run->add_option("--mechanism", run_flags.mechanism, "pc, rts, dc or plain")->required();
  run->add_option("--w", run_flags.w, "Tournament window (rts only)");
  run->add_option("--distance", run_flags.distance, "geno or pheno (rts only, default geno)");
  run->add_option("--fitness", run_flags.fitness, "onemax or twomax");
  run->add_option("--seed", run_flags.seed, "Master seed");
  run->add_option("--run-index", run_flags.run_index, "Substream index under the master seed");
  run->add_option("--budget", run_flags.budget, "Generation budget (default ceil(10 mu n ln n))");
  run->add_option("--trace", run_flags.trace, "none, branch or full");
  run->add_option("--out", run_flags.out, "Results file for the run record (empty: none)");
  run->add_option("--trace-out", run_flags.trace_out, "Trace table path (empty: none)");

  SweepFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "Run a grid of population sizes and windows");
  sweep->add_option("--n", sweep_flags.n, "Bit-string length");
  sweep->add_option("--mu", sweep_flags.mu, "Population sizes")->delimiter(',');
  sweep->add_option("--mechanism", sweep_flags.mechanism, "pc, rts, dc or plain");
  sweep->add_option("--w", sweep_flags.w, "Tournament windows (rts only)")->delimiter(',');
  sweep->add_option("--distance", sweep_flags.distance, "Distances for rts: geno, pheno")->delimiter(',');
  sweep->add_option("--fitness", sweep_flags.fitness, "onemax or twomax");
  sweep->add_option("--runs", sweep_flags.runs, "Runs per grid point");
  sweep->add_option("--seed", sweep_flags.seed, "Master seed");
  sweep->add_option("--budget", sweep_flags.budget, "Generation budget (default ceil(10 mu n ln n))");
  sweep->add_option("--out", sweep_flags.out, "Sweep summary file")->required();
  sweep->add_option("--runs-out", sweep_flags.runs_out, "Per-run records file (empty: none)");
  add_workers(sweep, common);

  FigFlags fig1_flags;
  auto* fig1 = app.add_subcommand("fig1", "Best-fitness distribution of crowding, n = 32 .. 16384");
  fig1->add_option("--runs", fig1_flags.runs, "Runs per n");
  fig1->add_option("--seed", fig1_flags.seed, "Master seed");
  fig1->add_option("--out-dir", fig1_flags.out_dir, "Output directory");
  fig1->add_flag("--small", fig1_flags.small, "Cap n at 1024");
  add_workers(fig1, common);

  FigFlags fig2_flags;
  auto* fig2 = app.add_subcommand("fig2", "Tournament success counts over mu and w, n = 100");
  fig2->add_option("--runs", fig2_flags.runs, "Runs per grid point");
  fig2->add_option("--seed", fig2_flags.seed, "Master seed");
  fig2->add_option("--out-dir", fig2_flags.out_dir, "Output directory");
  fig2->add_flag("--small", fig2_flags.small, "Cap mu at 128");
  add_workers(fig2, common);

  OracleFlags oracle_flags;
  auto* oracle = app.add_subcommand("oracle", "Exact and Monte-Carlo bound checks");
  oracle->add_option("--check", oracle_flags.check, "drift, init-gap, takeover or bounds")
      ->required()
      ->check(CLI::IsMember({"drift", "init-gap", "takeover", "bounds"}));
  oracle->add_option("--n", oracle_flags.n, "Bit-string length");
  oracle->add_option("--k", oracle_flags.k, "Ones in the parent (drift; default n/2)");
  oracle->add_option("--mu", oracle_flags.mu, "Population size");
  oracle->add_option("--w", oracle_flags.w, "Tournament window (takeover)");
  oracle->add_option("--sigma", oracle_flags.sigma, "Gap half-width (init-gap)");
  oracle->add_option("--trials", oracle_flags.trials, "Monte-Carlo trials (init-gap)");
  oracle->add_option("--seed", oracle_flags.seed, "Master seed (init-gap)");
  oracle->add_option("--name", oracle_flags.name, "rts_success_lb, det_crowding_success_lb or climb_budget");

  std::uint64_t verify_seed = 11;
  std::vector<int> verify_only;
  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  verify->add_option("--seed", verify_seed, "Master seed");
  verify->add_option("--only", verify_only, "Criterion ids to run (default: all)")->delimiter(',');
  add_workers(verify, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run) {
      return cmd_run(run_flags);
    }
    if (*sweep) {
      return cmd_sweep(sweep_flags, common);
    }
    if (*fig1) {
      return cmd_fig1(fig1_flags, common);
    }
    if (*fig2) {
      return cmd_fig2(fig2_flags, common);
    }
    if (*oracle) {
      return cmd_oracle(oracle_flags);
    }
    if (*verify) {
      return cmd_verify(verify_seed, verify_only, common);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
