#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "nichelab/random.hpp"

namespace nichelab::theory {

using Rational = boost::multiprecision::cpp_rational;

// ---------------------------------------------------------------------------
// One-step drift of a single probabilistic-crowding lineage on OneMax.
//
// A parent with k ones loses a of its ones and gains b of its zeros with
// probability Bin(k, 1/n)(a) * Bin(n-k, 1/n)(b). The offspring (k - a + b
// ones) survives with probability (k - a + b) / (2k - a + b), so
//
//   E[f(z) - f(x)] = sum_{a,b} P(a) P(b) (b - a) (k - a + b) / (2k - a + b).
//
// The a = b terms contribute nothing. The only zero denominator is
// k = a = b = 0, whose term is zero under the coin-flip rule.
//
// Numeric policy: the floating route sums in long double with Neumaier
// compensation and binomial terms from the ratio recurrence
// P(j+1) = P(j) (m - j) / ((j + 1)(n - 1)). The exact route uses
// arbitrary-precision rationals and is meant for n up to a few hundred.
// ---------------------------------------------------------------------------

struct DriftOptions {
  /// Drop terms with a + b > max_total_flips. 0 keeps every term.
  std::size_t max_total_flips = 40;
};

struct DriftValue {
  long double value = 0;
  /// Probability mass of the dropped terms, P(Bin(n, 1/n) > max_total_flips).
  long double discarded_mass = 0;
  std::size_t terms = 0;
};

DriftValue exact_pc_drift(std::size_t n, std::size_t k, DriftOptions options = {});

/// Same sum, no truncation, exact.
Rational exact_pc_drift_rational(std::size_t n, std::size_t k);

/// Expected fitness change of the offspring before survival selection,
/// (n - 2k) / n.
double exact_offspring_drift(std::size_t n, std::size_t k);
Rational exact_offspring_drift_rational(std::size_t n, std::size_t k);

struct DriftTable {
  std::size_t n = 0;
  std::vector<long double> entries; // index = ones-count k
  long double max_discarded_mass = 0;
};

DriftTable make_drift_table(std::size_t n, DriftOptions options = {});

/// P(Bin(trials, p) > threshold), summed term by term from the tail.
long double binomial_upper_tail(std::size_t trials, long double p, std::size_t threshold);

// ---------------------------------------------------------------------------
// Bound reports
// ---------------------------------------------------------------------------

enum class Verdict { Consistent, Violated, NotApplicable };

std::string_view to_string(Verdict v);

struct BoundReport {
  std::string name;
  double analytic_value = 0;
  double empirical_value = 0;
  std::uint64_t sample_count = 0;
  Verdict verdict = Verdict::NotApplicable;
  std::string note;

  friend bool operator==(const BoundReport&, const BoundReport&) = default;
};

/// One-sided z quantile used for the Monte-Carlo verdicts (99%).
inline constexpr double kZ99 = 2.3263478740408408;

// ---------------------------------------------------------------------------
// Initial-population gap: a uniform population of size mu contains one
// member with at most n/2 - sigma ones and a different member with at least
// n/2 + sigma ones.
// ---------------------------------------------------------------------------

/// 1 - 2 ((1 + 2 sigma sqrt(2/n)) / 2)^mu. May be negative (vacuous).
double init_gap_lower_bound(std::size_t n, std::size_t mu, double sigma);

/// Exact event probability from the Bin(n, 1/2) distribution of one member.
double init_gap_probability_exact(std::size_t n, std::size_t mu, double sigma);

/// Monte-Carlo estimate against init_gap_lower_bound. Consistent iff
/// estimate + kZ99 * standard_error >= bound.
BoundReport init_gap_probability_mc(std::size_t n, std::size_t mu, double sigma,
                                    std::uint64_t trials, RandomStream& rng);

// ---------------------------------------------------------------------------
// Takeover before escape under restricted tournaments with small windows:
//   prod_{i=1}^{mu-1} max(0, 1 - 4 mu / (i n ((mu - i)/mu)^w)).
// Defined for mu >= 2, w >= 2, 8 mu <= n; std::nullopt outside that regime.
// ---------------------------------------------------------------------------

std::optional<double> rts_takeover_bound(std::size_t mu, std::size_t w, std::size_t n);

// ---------------------------------------------------------------------------
// Closed-form success probabilities and budgets.
// ---------------------------------------------------------------------------

enum class LogBase { Two, Natural };

/// 1 - 2^(-mu' + 3), mu' = min(mu, log n) in the given base.
double rts_success_lower_bound(std::size_t mu, std::size_t n, LogBase base);

/// 1 - 2^(-mu + 1).
double det_crowding_success_lower_bound(std::size_t mu);

/// 2 e mu n ln n: generations after which a non-decreasing branch has
/// reached its optimum with probability at least 1 - 1/n.
double climb_budget(std::size_t mu, std::size_t n);

struct BoundParams {
  std::size_t mu = 0;
  std::size_t n = 0;
};

struct NamedValue {
  std::string label;
  double value = 0;
};

/// Evaluates a bound by name: "rts_success_lb" (two values, log base 2 and
/// natural), "det_crowding_success_lb", "climb_budget". Throws
/// std::invalid_argument for unknown names or missing parameters.
std::vector<NamedValue> theorem_bound(std::string_view name, const BoundParams& params);

inline constexpr std::string_view kBoundNames[] = {"rts_success_lb", "det_crowding_success_lb",
                                                   "climb_budget"};

} // namespace nichelab::theory
