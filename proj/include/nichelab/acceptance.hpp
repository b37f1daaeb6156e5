#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nichelab/experiments.hpp"

namespace nichelab::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

struct Options {
  std::uint64_t master_seed = 11;
  ExecutionOptions exec;
  /// Invoked as each criterion finishes.
  std::function<void(const CriterionResult&)> on_result;
};

CriterionResult pc_never_reaches_optimum(const Options& opt);   // 1
CriterionResult pc_fitness_concentrates(const Options& opt);    // 2
CriterionResult rts_large_window_succeeds(const Options& opt);  // 3
CriterionResult rts_small_window_fails(const Options& opt);     // 4
CriterionResult pc_drift_bound(const Options& opt);             // 5
CriterionResult offspring_drift_exact(const Options& opt);      // 6
CriterionResult init_gap_bound(const Options& opt);             // 7
CriterionResult dc_climb_budget(const Options& opt);            // 8
CriterionResult invariants_and_determinism(const Options& opt); // 9

/// Criteria 1..9 in order.
std::vector<CriterionResult> run_all(const Options& opt);

/// Runs only the listed criterion ids, in the given order.
std::vector<CriterionResult> run_selected(const Options& opt, const std::vector<int>& ids);

/// "[PASS] 3 <title> :: <detail> (12.3 s)".
std::string format_line(const CriterionResult& r);

} // namespace nichelab::acceptance
