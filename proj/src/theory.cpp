#include "nichelab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "nichelab/genome.hpp"

namespace nichelab::theory {

namespace {

using boost::multiprecision::cpp_int;

// Neumaier-compensated accumulator.
class CompensatedSum {
public:
  void add(long double x) {
    const long double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  long double value() const { return sum_ + comp_; }

private:
  long double sum_ = 0;
  long double comp_ = 0;
};

// P(j of m bits flip) at rate 1/n for j = 0..min(m, cap).
std::vector<long double> flip_count_pmf(std::size_t m, std::size_t n, std::size_t cap) {
  const std::size_t top = std::min(m, cap);
  std::vector<long double> pmf(top + 1, 0.0L);
  if (n == 1) {
    // Every bit flips.
    if (m <= cap) {
      pmf[m] = 1.0L;
    }
    return pmf;
  }
  const long double nn = static_cast<long double>(n);
  pmf[0] = std::exp(static_cast<long double>(m) * std::log1p(-1.0L / nn));
  for (std::size_t j = 0; j < top; ++j) {
    pmf[j + 1] = pmf[j] * static_cast<long double>(m - j) /
                 (static_cast<long double>(j + 1) * (nn - 1.0L));
  }
  return pmf;
}

cpp_int binomial(std::size_t m, std::size_t j) {
  cpp_int c = 1;
  for (std::size_t i = 0; i < j; ++i) {
    c *= (m - i);
    c /= (i + 1);
  }
  return c;
}

cpp_int int_pow(std::size_t base, std::size_t exp) {
  return boost::multiprecision::pow(cpp_int(base), static_cast<unsigned>(exp));
}

// log P(Bin(n, 1/2) = j).
long double log_half_binomial_pmf(std::size_t n, std::size_t j) {
  return std::lgamma(static_cast<long double>(n) + 1) - std::lgamma(static_cast<long double>(j) + 1) -
         std::lgamma(static_cast<long double>(n - j) + 1) - static_cast<long double>(n) * std::numbers::ln2_v<long double>;
}

struct GapCategories {
  long double only_low = 0;
  long double only_high = 0;
  long double both = 0; // n/2 - sigma >= ones >= n/2 + sigma, only when sigma == 0 and n even
  long double neither = 0;
};

bool is_low(std::size_t ones, std::size_t n, double sigma) {
  return 2.0 * static_cast<double>(ones) <= static_cast<double>(n) - 2.0 * sigma;
}

bool is_high(std::size_t ones, std::size_t n, double sigma) {
  return 2.0 * static_cast<double>(ones) >= static_cast<double>(n) + 2.0 * sigma;
}

GapCategories gap_categories(std::size_t n, double sigma) {
  GapCategories c;
  CompensatedSum low, high, both, neither;
  for (std::size_t j = 0; j <= n; ++j) {
    const long double p = std::exp(log_half_binomial_pmf(n, j));
    const bool l = is_low(j, n, sigma);
    const bool h = is_high(j, n, sigma);
    if (l && h) {
      both.add(p);
    } else if (l) {
      low.add(p);
    } else if (h) {
      high.add(p);
    } else {
      neither.add(p);
    }
  }
  c.only_low = low.value();
  c.only_high = high.value();
  c.both = both.value();
  c.neither = neither.value();
  return c;
}

void require_sigma(std::size_t n, double sigma) {
  if (sigma < 0 || 2.0 * sigma > static_cast<double>(n)) {
    throw std::invalid_argument("sigma must lie in [0, n/2]");
  }
}

} // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
  case Verdict::Consistent:
    return "consistent";
  case Verdict::Violated:
    return "violated";
  case Verdict::NotApplicable:
    return "not applicable";
  }
  return "?";
}

DriftValue exact_pc_drift(std::size_t n, std::size_t k, DriftOptions options) {
  if (n == 0 || k > n) {
    throw std::invalid_argument("exact_pc_drift: need n >= 1 and 0 <= k <= n");
  }
  const std::size_t cap = options.max_total_flips == 0 ? n : std::min(options.max_total_flips, n);
  const auto lose = flip_count_pmf(k, n, cap);
  const auto gain = flip_count_pmf(n - k, n, cap);

  DriftValue out;
  CompensatedSum sum;
  const auto kk = static_cast<long double>(k);
  for (std::size_t a = 0; a < lose.size(); ++a) {
    for (std::size_t b = 0; b < gain.size() && a + b <= cap; ++b) {
      ++out.terms;
      if (a == b) {
        continue;
      }
      const long double d = static_cast<long double>(b) - static_cast<long double>(a);
      const long double fy = kk + d;
      sum.add(lose[a] * gain[b] * d * fy / (kk + fy));
    }
  }
  out.value = sum.value();
  out.discarded_mass = cap >= n ? 0.0L : binomial_upper_tail(n, 1.0L / static_cast<long double>(n), cap);
  return out;
}

Rational exact_pc_drift_rational(std::size_t n, std::size_t k) {
  if (n == 0 || k > n) {
    throw std::invalid_argument("exact_pc_drift_rational: need n >= 1 and 0 <= k <= n");
  }
  // P(a) P(b) = C(k,a) C(n-k,b) (n-1)^(n-a-b) / n^n. Group integer
  // numerators by the survival denominator s = 2k - a + b.
  std::vector<cpp_int> by_denominator(2 * n + 1, 0);
  std::vector<cpp_int> lose(k + 1), gain(n - k + 1), keep_pow(n + 1);
  for (std::size_t a = 0; a <= k; ++a) lose[a] = binomial(k, a);
  for (std::size_t b = 0; b <= n - k; ++b) gain[b] = binomial(n - k, b);
  for (std::size_t e = 0; e <= n; ++e) keep_pow[e] = int_pow(n - 1, e);

  for (std::size_t a = 0; a <= k; ++a) {
    for (std::size_t b = 0; b <= n - k; ++b) {
      if (a == b) {
        continue;
      }
      const long long d = static_cast<long long>(b) - static_cast<long long>(a);
      const long long fy = static_cast<long long>(k) + d;
      const std::size_t s = 2 * k + b - a;
      by_denominator[s] += lose[a] * gain[b] * keep_pow[n - a - b] * d * fy;
    }
  }
  Rational total = 0;
  for (std::size_t s = 1; s < by_denominator.size(); ++s) {
    if (by_denominator[s] != 0) {
      total += Rational(by_denominator[s], cpp_int(s));
    }
  }
  return total / Rational(int_pow(n, n));
}

double exact_offspring_drift(std::size_t n, std::size_t k) {
  if (n == 0 || k > n) {
    throw std::invalid_argument("exact_offspring_drift: need n >= 1 and 0 <= k <= n");
  }
  return (static_cast<double>(n) - 2.0 * static_cast<double>(k)) / static_cast<double>(n);
}

Rational exact_offspring_drift_rational(std::size_t n, std::size_t k) {
  if (n == 0 || k > n) {
    throw std::invalid_argument("exact_offspring_drift_rational: need n >= 1 and 0 <= k <= n");
  }
  return Rational(static_cast<long long>(n) - 2 * static_cast<long long>(k), static_cast<long long>(n));
}

DriftTable make_drift_table(std::size_t n, DriftOptions options) {
  DriftTable table;
  table.n = n;
  table.entries.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const auto v = exact_pc_drift(n, k, options);
    table.entries.push_back(v.value);
    table.max_discarded_mass = std::max(table.max_discarded_mass, v.discarded_mass);
  }
  return table;
}

long double binomial_upper_tail(std::size_t trials, long double p, std::size_t threshold) {
  if (threshold >= trials) {
    return 0.0L;
  }
  if (p >= 1.0L) {
    return 1.0L;
  }
  const auto nn = static_cast<long double>(trials);
  const long double log_p = std::log(p);
  const long double log_q = std::log1p(-p);
  CompensatedSum sum;
  for (std::size_t j = threshold + 1; j <= trials; ++j) {
    const auto jj = static_cast<long double>(j);
    const long double log_term = std::lgamma(nn + 1) - std::lgamma(jj + 1) - std::lgamma(nn - jj + 1) +
                                 jj * log_p + (nn - jj) * log_q;
    const long double term = std::exp(log_term);
    sum.add(term);
    if (jj > nn * p && term < sum.value() * 1e-30L) {
      break;
    }
  }
  return sum.value();
}

double init_gap_lower_bound(std::size_t n, std::size_t mu, double sigma) {
  const double inside = 2.0 * sigma * std::sqrt(2.0 / static_cast<double>(n));
  return 1.0 - 2.0 * std::pow((1.0 + inside) / 2.0, static_cast<double>(mu));
}

double init_gap_probability_exact(std::size_t n, std::size_t mu, double sigma) {
  require_sigma(n, sigma);
  if (mu < 2) {
    return 0.0;
  }
  const auto c = gap_categories(n, sigma);
  const auto m = static_cast<long double>(mu);
  // Fails iff no member is low, or none is high, or the only qualifying
  // member is a single one sitting in both sets.
  const long double fail = std::pow(c.only_high + c.neither, m) + std::pow(c.only_low + c.neither, m) -
                           std::pow(c.neither, m) + m * c.both * std::pow(c.neither, m - 1);
  return static_cast<double>(std::clamp(1.0L - fail, 0.0L, 1.0L));
}

BoundReport init_gap_probability_mc(std::size_t n, std::size_t mu, double sigma,
                                    std::uint64_t trials, RandomStream& rng) {
  require_sigma(n, sigma);
  if (trials == 0) {
    throw std::invalid_argument("init_gap_probability_mc: trials must be positive");
  }
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::size_t low = 0;
    std::size_t high = 0;
    std::size_t both = 0;
    for (std::size_t i = 0; i < mu; ++i) {
      const auto ones = uniform_random_genome(n, rng).ones_count();
      const bool l = is_low(ones, n, sigma);
      const bool h = is_high(ones, n, sigma);
      low += l ? 1 : 0;
      high += h ? 1 : 0;
      both += (l && h) ? 1 : 0;
    }
    // Needs two distinct members: one low, one high.
    const bool event = low > 0 && high > 0 && !(low == 1 && high == 1 && both == 1);
    hits += event ? 1 : 0;
  }

  BoundReport r;
  r.name = "init_gap";
  r.analytic_value = init_gap_lower_bound(n, mu, sigma);
  r.empirical_value = static_cast<double>(hits) / static_cast<double>(trials);
  r.sample_count = trials;
  const double se = std::sqrt(r.empirical_value * (1.0 - r.empirical_value) / static_cast<double>(trials));
  r.verdict = r.empirical_value + kZ99 * se >= r.analytic_value ? Verdict::Consistent : Verdict::Violated;
  std::ostringstream note;
  note.precision(10);
  note << "n=" << n << " mu=" << mu << " sigma=" << sigma << " se=" << se
       << " exact=" << init_gap_probability_exact(n, mu, sigma);
  r.note = note.str();
  return r;
}

std::optional<double> rts_takeover_bound(std::size_t mu, std::size_t w, std::size_t n) {
  if (mu < 2 || w < 2 || 8 * mu > n) {
    return std::nullopt;
  }
  const double m = static_cast<double>(mu);
  double product = 1.0;
  for (std::size_t i = 1; i < mu; ++i) {
    const double share = std::pow((m - static_cast<double>(i)) / m, static_cast<double>(w));
    const double factor = 1.0 - 4.0 * m / (static_cast<double>(i) * static_cast<double>(n) * share);
    product *= std::max(0.0, factor);
  }
  return product;
}

double rts_success_lower_bound(std::size_t mu, std::size_t n, LogBase base) {
  const double log_n = base == LogBase::Two ? std::log2(static_cast<double>(n)) : std::log(static_cast<double>(n));
  const double mu_eff = std::min(static_cast<double>(mu), log_n);
  return 1.0 - std::exp2(-mu_eff + 3.0);
}

double det_crowding_success_lower_bound(std::size_t mu) {
  return 1.0 - std::exp2(-static_cast<double>(mu) + 1.0);
}

double climb_budget(std::size_t mu, std::size_t n) {
  return 2.0 * std::numbers::e * static_cast<double>(mu) * static_cast<double>(n) * std::log(static_cast<double>(n));
}

std::vector<NamedValue> theorem_bound(std::string_view name, const BoundParams& params) {
  if (std::ranges::find(kBoundNames, name) == std::ranges::end(kBoundNames)) {
    throw std::invalid_argument("unknown bound '" + std::string(name) + "'");
  }
  if (params.mu == 0) {
    throw std::invalid_argument("bound '" + std::string(name) + "' needs mu >= 1");
  }
  if (name == "det_crowding_success_lb") {
    return {{"det_crowding_success_lb", det_crowding_success_lower_bound(params.mu)}};
  }
  if (params.n < 2) {
    throw std::invalid_argument("bound '" + std::string(name) + "' needs n >= 2");
  }
  if (name == "rts_success_lb") {
    return {{"rts_success_lb[log2]", rts_success_lower_bound(params.mu, params.n, LogBase::Two)},
            {"rts_success_lb[ln]", rts_success_lower_bound(params.mu, params.n, LogBase::Natural)}};
  }
  if (name == "climb_budget") {
    return {{"climb_budget", climb_budget(params.mu, params.n)}};
  }
  throw std::invalid_argument("unknown bound '" + std::string(name) + "'");
}

} // namespace nichelab::theory
