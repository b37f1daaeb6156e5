#include "nichelab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace nichelab {

std::string_view to_string(TracePolicy policy) {
  switch (policy) {
  case TracePolicy::None:
    return "none";
  case TracePolicy::BestFitnessPerBranch:
    return "branch";
  case TracePolicy::Full:
    return "full";
  }
  return "?";
}

TracePolicy parse_trace_policy(std::string_view text) {
  for (auto p : {TracePolicy::None, TracePolicy::BestFitnessPerBranch, TracePolicy::Full}) {
    if (text == to_string(p)) {
      return p;
    }
  }
  throw std::invalid_argument("unknown trace policy '" + std::string(text) + "'");
}

std::string_view to_string(Outcome outcome) {
  return outcome == Outcome::Success ? "success" : "failure";
}

std::uint64_t default_budget(std::size_t n, std::size_t mu) {
  const double raw = 10.0 * static_cast<double>(mu) * static_cast<double>(n) * std::log(static_cast<double>(n));
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(raw)));
}

std::uint64_t trace_interval(std::uint64_t budget) { return std::max<std::uint64_t>(1, budget / 10000); }

void RunConfig::validate() const {
  if (n == 0) {
    throw std::invalid_argument("run config: n must be positive");
  }
  if (mu == 0) {
    throw std::invalid_argument("run config: mu must be positive");
  }
  if (budget_generations && *budget_generations == 0) {
    throw std::invalid_argument("run config: budget must be at least 1 generation");
  }
}

std::string RunConfig::digest() const {
  const std::string canonical = "n=" + std::to_string(n) + ";mu=" + std::to_string(mu) +
                                ";mech=" + mechanism.label() + ";fitness=" + std::string(to_string(fitness)) +
                                ";budget=" + std::to_string(budget());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

TraceSample sample_population(const Population& pop, std::uint64_t generation) {
  TraceSample s;
  s.generation = generation;
  const std::size_t n = pop.length();
  s.best_overall = pop.best_fitness();
  for (const auto& m : pop.members()) {
    if (2 * m.ones < n) {
      s.best_zero_branch = std::max(s.best_zero_branch.value_or(m.fitness), m.fitness);
    } else if (2 * m.ones > n) {
      s.best_one_branch = std::max(s.best_one_branch.value_or(m.fitness), m.fitness);
    }
  }
  return s;
}

} // namespace

RunResult run_single(const RunConfig& cfg) {
  cfg.validate();
  RandomStream rng = RandomStream::substream(cfg.master_seed, cfg.run_index);
  Population pop = Population::random(cfg.n, cfg.mu, FitnessFunction{cfg.fitness}, rng);
  Stepper stepper{cfg.mechanism};

  const std::uint64_t budget = cfg.budget();
  const std::uint64_t interval = trace_interval(budget);

  RunResult result;
  result.init_evaluations = cfg.mu;
  result.config_digest = cfg.digest();
  result.peak_fitness = pop.best_fitness();
  if (cfg.trace != TracePolicy::None) {
    result.trace.push_back(sample_population(pop, 0));
  }

  std::uint64_t generation = 0;
  while (!pop.has_both_optima() && generation < budget) {
    const StepRecord rec = stepper.step(pop, rng);
    ++generation;
    if (rec.accepted) {
      result.peak_fitness = std::max(result.peak_fitness, rec.offspring_fitness);
    }
    if (cfg.trace == TracePolicy::Full ||
        (cfg.trace == TracePolicy::BestFitnessPerBranch && generation % interval == 0)) {
      result.trace.push_back(sample_population(pop, generation));
    }
  }
  if (cfg.trace != TracePolicy::None && result.trace.back().generation != generation) {
    result.trace.push_back(sample_population(pop, generation));
  }

  result.found_zero_opt = pop.zero_optimum_count() > 0;
  result.found_one_opt = pop.one_optimum_count() > 0;
  result.outcome = result.found_zero_opt && result.found_one_opt ? Outcome::Success : Outcome::Failure;
  result.generations_used = generation;
  result.evaluations_used = generation;
  result.best_fitness_final = pop.best_fitness();
  result.best_normalized_fitness =
      static_cast<double>(result.best_fitness_final) / static_cast<double>(cfg.n);
  return result;
}

std::size_t default_worker_count() {
  if (const char* env = std::getenv("NICHELAB_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) {
      return static_cast<std::size_t>(v);
    }
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

namespace {

struct BatchOutcome {
  std::vector<std::optional<RunResult>> results;
  bool failed = false;
  std::string error;
};

// Executes every config; result i belongs to config i regardless of which
// worker ran it. The first exception stops dispatch of further runs.
BatchOutcome execute_batch(std::span<const RunConfig> configs, const ExecutionOptions& exec) {
  BatchOutcome out;
  out.results.resize(configs.size());
  const std::size_t workers =
      std::min(std::max<std::size_t>(1, exec.workers == 0 ? default_worker_count() : exec.workers),
               std::max<std::size_t>(1, configs.size()));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex mutex;
  std::size_t finished = 0;

  auto work = [&] {
    while (!stop.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= configs.size()) {
        return;
      }
      try {
        out.results[i] = run_single(configs[i]);
      } catch (const std::exception& e) {
        std::lock_guard lock{mutex};
        if (!out.failed) {
          out.failed = true;
          out.error = "run " + std::to_string(configs[i].run_index) + " of " + configs[i].digest() +
                      " failed: " + e.what();
        }
        stop.store(true);
        return;
      }
      if (exec.progress) {
        std::lock_guard lock{mutex};
        exec.progress(++finished, configs.size());
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back(work);
    }
  }
  return out;
}

} // namespace

std::vector<SweepSummary> summarize(std::span<const RunRecord> runs) {
  std::vector<SweepSummary> summaries;
  std::vector<double> generation_sums;
  for (const auto& rec : runs) {
    RunConfig point = rec.config;
    point.run_index = 0;
    auto it = std::ranges::find_if(summaries, [&](const SweepSummary& s) { return s.point == point; });
    if (it == summaries.end()) {
      summaries.push_back(SweepSummary{point, 0, 0, std::nullopt});
      generation_sums.push_back(0.0);
      it = std::prev(summaries.end());
    }
    const auto idx = static_cast<std::size_t>(it - summaries.begin());
    ++it->runs;
    if (rec.result.outcome == Outcome::Success) {
      ++it->successes;
      generation_sums[idx] += static_cast<double>(rec.result.generations_used);
    }
  }
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    if (summaries[i].successes > 0) {
      summaries[i].mean_generations_on_success =
          generation_sums[i] / static_cast<double>(summaries[i].successes);
    }
  }
  return summaries;
}

SweepResult run_sweep(std::span<const RunConfig> grid, std::size_t runs_per_point, const ExecutionOptions& exec) {
  if (runs_per_point == 0) {
    throw std::invalid_argument("run_sweep: runs_per_point must be at least 1");
  }
  std::vector<RunConfig> configs;
  configs.reserve(grid.size() * runs_per_point);
  for (const auto& point : grid) {
    point.validate();
    for (std::size_t r = 0; r < runs_per_point; ++r) {
      RunConfig cfg = point;
      cfg.run_index = r;
      configs.push_back(cfg);
    }
  }

  BatchOutcome batch = execute_batch(configs, exec);

  SweepResult out;
  out.partial = batch.failed;
  out.error = batch.error;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (batch.results[i]) {
      out.runs.push_back(RunRecord{configs[i], std::move(*batch.results[i])});
    }
  }
  out.summaries = summarize(out.runs);
  return out;
}

BoxplotStats boxplot(std::vector<double> samples) {
  BoxplotStats s;
  if (samples.empty()) {
    return s;
  }
  std::ranges::sort(samples);
  s.count = samples.size();
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(samples.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, samples.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return samples[lo] + frac * (samples[hi] - samples[lo]);
  };
  s.min = samples.front();
  s.max = samples.back();
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  const double iqr = s.q3 - s.q1;
  const double low_fence = s.q1 - 1.5 * iqr;
  const double high_fence = s.q3 + 1.5 * iqr;
  s.whisker_low = s.max;
  s.whisker_high = s.min;
  double total = 0;
  for (double x : samples) {
    total += x;
    if (x < low_fence || x > high_fence) {
      s.outliers.push_back(x);
    } else {
      s.whisker_low = std::min(s.whisker_low, x);
      s.whisker_high = std::max(s.whisker_high, x);
    }
  }
  s.mean = total / static_cast<double>(samples.size());
  return s;
}

std::vector<FitnessDistribution> best_fitness_study(std::span<const std::size_t> n_values, std::size_t mu,
                                                    const MechanismSpec& mechanism, std::size_t runs,
                                                    std::uint64_t master_seed, const ExecutionOptions& exec) {
  std::vector<RunConfig> grid;
  for (auto n : n_values) {
    RunConfig cfg;
    cfg.n = n;
    cfg.mu = mu;
    cfg.mechanism = mechanism;
    cfg.fitness = FitnessKind::TwoMax;
    cfg.master_seed = master_seed;
    cfg.trace = TracePolicy::None;
    grid.push_back(cfg);
  }
  SweepResult sweep = run_sweep(grid, runs, exec);
  if (sweep.partial) {
    throw std::runtime_error("best_fitness_study aborted: " + sweep.error);
  }

  std::vector<FitnessDistribution> out;
  for (auto n : n_values) {
    FitnessDistribution d;
    d.n = n;
    for (const auto& rec : sweep.runs) {
      if (rec.config.n == n) {
        d.samples.push_back(rec.result.best_normalized_fitness);
      }
    }
    d.stats = boxplot(d.samples);
    out.push_back(std::move(d));
  }
  return out;
}

} // namespace nichelab
