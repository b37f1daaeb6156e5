#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nichelab/fitness.hpp"
#include "nichelab/mechanisms.hpp"

namespace nichelab {

inline constexpr std::string_view kArtifactVersion = "1.0.0";

enum class TracePolicy { None, BestFitnessPerBranch, Full };

std::string_view to_string(TracePolicy policy);
TracePolicy parse_trace_policy(std::string_view text);

/// ceil(10 mu n ln n), at least 1.
std::uint64_t default_budget(std::size_t n, std::size_t mu);

/// Thinning interval for per-branch traces: max(1, budget / 10^4).
std::uint64_t trace_interval(std::uint64_t budget);

struct RunConfig {
  std::size_t n = 100;
  std::size_t mu = 2;
  MechanismSpec mechanism = MechanismSpec::probabilistic_crowding();
  FitnessKind fitness = FitnessKind::TwoMax;
  /// Generation budget; default_budget(n, mu) when empty.
  std::optional<std::uint64_t> budget_generations;
  std::uint64_t master_seed = 1;
  std::uint64_t run_index = 0;
  TracePolicy trace = TracePolicy::BestFitnessPerBranch;

  std::uint64_t budget() const { return budget_generations.value_or(default_budget(n, mu)); }

  /// Throws std::invalid_argument on n == 0, mu == 0 or an explicit zero budget.
  void validate() const;

  /// 16 hex digits of FNV-1a over the scientific parameters
  /// "n=..;mu=..;mech=..;fitness=..;budget=..". Seeds, run index and trace
  /// policy are excluded, so all runs of one grid point share a digest.
  std::string digest() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

enum class Outcome { Success, Failure };

std::string_view to_string(Outcome outcome);

// Best fitness per TwoMax branch. Members with fewer than n/2 ones are on the
// zero branch, more than n/2 on the one branch; exactly n/2 counts for
// neither.
struct TraceSample {
  std::uint64_t generation = 0;
  std::optional<FitnessValue> best_zero_branch;
  std::optional<FitnessValue> best_one_branch;
  FitnessValue best_overall = 0;

  friend bool operator==(const TraceSample&, const TraceSample&) = default;
};

struct RunResult {
  Outcome outcome = Outcome::Failure;
  std::uint64_t generations_used = 0;
  /// One per generation; the mu initial evaluations are in init_evaluations.
  std::uint64_t evaluations_used = 0;
  std::uint64_t init_evaluations = 0;
  FitnessValue best_fitness_final = 0;
  double best_normalized_fitness = 0;
  /// Literal 0^n / 1^n present in the final population.
  bool found_zero_opt = false;
  bool found_one_opt = false;
  /// Highest fitness ever held by a population member.
  FitnessValue peak_fitness = 0;
  std::string config_digest;
  std::vector<TraceSample> trace;

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

/// One complete run: uniform initialization from the (master_seed,
/// run_index) substream, then one mechanism step per generation until the
/// population holds both 0^n and 1^n or the budget is spent.
RunResult run_single(const RunConfig& cfg);

struct RunRecord {
  RunConfig config;
  RunResult result;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct SweepSummary {
  /// Grid point; run_index is always 0 here.
  RunConfig point;
  std::size_t runs = 0;
  std::size_t successes = 0;
  std::optional<double> mean_generations_on_success;

  friend bool operator==(const SweepSummary&, const SweepSummary&) = default;
};

struct ExecutionOptions {
  /// 0 selects default_worker_count().
  std::size_t workers = 0;
  /// Called after each finished run with (finished, total). May be called
  /// from worker threads, serialized.
  std::function<void(std::size_t, std::size_t)> progress;
};

/// NICHELAB_WORKERS if set to a positive integer, else hardware concurrency.
std::size_t default_worker_count();

struct SweepResult {
  std::vector<SweepSummary> summaries;
  /// Sorted by (grid point position, run_index).
  std::vector<RunRecord> runs;
  /// Set when a run threw; summaries then cover only completed runs.
  bool partial = false;
  std::string error;
};

/// Runs each grid template runs_per_point times with run_index 0..runs-1.
/// Results do not depend on worker count or scheduling.
SweepResult run_sweep(std::span<const RunConfig> grid, std::size_t runs_per_point,
                      const ExecutionOptions& exec = {});

/// Recomputes summaries from per-run records, grouped by grid point in
/// first-appearance order.
std::vector<SweepSummary> summarize(std::span<const RunRecord> runs);

// Tukey boxplot statistics. Quartiles interpolate linearly between order
// statistics (position p (N - 1)); whiskers reach the most extreme samples
// within 1.5 IQR of the box.
struct BoxplotStats {
  std::size_t count = 0;
  double min = 0;
  double whisker_low = 0;
  double q1 = 0;
  double median = 0;
  double q3 = 0;
  double whisker_high = 0;
  double max = 0;
  double mean = 0;
  std::vector<double> outliers;
};

BoxplotStats boxplot(std::vector<double> samples);

struct FitnessDistribution {
  std::size_t n = 0;
  std::vector<double> samples; // best_normalized_fitness, by run_index
  BoxplotStats stats;
};

/// Best normalized fitness at termination for each n, runs per n, default
/// budget.
std::vector<FitnessDistribution> best_fitness_study(std::span<const std::size_t> n_values, std::size_t mu,
                                                    const MechanismSpec& mechanism, std::size_t runs,
                                                    std::uint64_t master_seed,
                                                    const ExecutionOptions& exec = {});

} // namespace nichelab
