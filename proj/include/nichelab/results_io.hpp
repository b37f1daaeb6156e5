#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nichelab/experiments.hpp"

namespace nichelab {

// Results files are line-oriented text:
//
//   #nichelab-results
//   #artifact_version=1.0.0
//   #schema_version=1
//   #kind=runs|sweep
//   #master_seed=<u64>
//   #<key>=<value>            (optional extra metadata, kept in order)
//   <comma-separated column header>
//   <one record per line>
//
// Column order is fixed per kind (see kRunColumns / kSweepColumns). Empty
// fields mean "absent" (w and distance for non-RTS mechanisms, the mean of
// a grid point without successes). Reals use the shortest representation
// that round-trips exactly. The budget column holds the effective budget; on
// load a value equal to default_budget(n, mu) becomes "no override". Per-run
// traces are not part of this format (see write_trace).

inline constexpr int kSchemaVersion = 1;

inline constexpr const char* kRunColumns =
    "n,mu,mechanism,w,distance,fitness,trace,budget,master_seed,run_index,outcome,generations_used,"
    "evaluations_used,init_evaluations,best_fitness_final,best_normalized_fitness,found_zero_opt,"
    "found_one_opt,peak_fitness,config_digest";

inline constexpr const char* kSweepColumns =
    "n,mu,mechanism,w,distance,fitness,trace,budget,master_seed,runs,successes,"
    "mean_generations_on_success,config_digest";

class ResultsError : public std::runtime_error {
public:
  enum class Kind { Io, Schema };

  ResultsError(Kind kind, std::filesystem::path path, const std::string& what)
      : std::runtime_error(path.string() + ": " + what), kind_{kind}, path_{std::move(path)} {}

  Kind kind() const noexcept { return kind_; }
  const std::filesystem::path& path() const noexcept { return path_; }

private:
  Kind kind_;
  std::filesystem::path path_;
};

using Metadata = std::vector<std::pair<std::string, std::string>>;

void persist_runs(const std::filesystem::path& path, std::span<const RunRecord> runs,
                  std::uint64_t master_seed, const Metadata& extra = {});
std::vector<RunRecord> load_runs(const std::filesystem::path& path);

void persist_sweep(const std::filesystem::path& path, std::span<const SweepSummary> sweep,
                   std::uint64_t master_seed, const Metadata& extra = {});
std::vector<SweepSummary> load_sweep(const std::filesystem::path& path);

/// Header metadata of a results file, in file order.
Metadata read_metadata(const std::filesystem::path& path);

// Plot-ready tables. Lines starting with '#' are comments carrying the
// grid label and seed.

/// Columns: n,runs,whisker_low,q1,median,q3,whisker_high,mean,outliers
/// (outliers separated by ';').
void write_fitness_table(const std::filesystem::path& path, std::span<const FitnessDistribution> study,
                         const std::vector<std::string>& comments);

/// Columns: mu,w<w1>,w<w2>,... with success counts, for one distance.
void write_success_table(const std::filesystem::path& path, std::span<const SweepSummary> sweep,
                         DistanceKind distance, const std::vector<std::string>& comments);

/// Columns: generation,best_zero_branch,best_one_branch,best_overall.
void write_trace(const std::filesystem::path& path, std::span<const TraceSample> trace);

/// Shortest round-trip decimal form.
std::string format_real(double value);

} // namespace nichelab
