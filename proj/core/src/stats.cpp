#include "ktae/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ktae::stats {
namespace {

constexpr std::int64_t kSharedTableSize = 16384;
// Relative tolerance when deciding whether another table is "as extreme" as
// the observed one in the two-sided sum.
constexpr double kTieTolerance = 1e-7;

void check_table(const ContingencyTable& t) {
  if (!t.valid()) {
    throw Error(Errc::DomainError, "contingency table has a negative cell");
  }
}

bool has_empty_margin(const ContingencyTable& t) {
  return t.containing() == 0 || t.omitting() == 0 || t.correct() == 0 || t.incorrect() == 0;
}

double clamp_probability(double p) {
  if (!(p > 0.0)) return std::numeric_limits<double>::denorm_min();
  return std::min(p, 1.0);
}

// Cell sums are grouped in pairs that map onto each other when the correct
// and incorrect columns are swapped. Floating-point addition is commutative,
// so the swapped table evaluates to the identical bit pattern.
double log_point_prob(const ContingencyTable& t, const LogGammaTable& lg) {
  const double margins = (lg.log_factorial(t.a + t.b) + lg.log_factorial(t.c + t.d)) +
                         (lg.log_factorial(t.a + t.c) + lg.log_factorial(t.b + t.d));
  const double cells = (lg.log_factorial(t.a) + lg.log_factorial(t.b)) +
                       (lg.log_factorial(t.c) + lg.log_factorial(t.d)) +
                       lg.log_factorial(t.total());
  return margins - cells;
}

double plogp_term(std::int64_t k, std::int64_t n) {
  if (k == 0 || k == n) return 0.0;
  const double q = static_cast<double>(k) / static_cast<double>(n);
  return -q * std::log2(q);
}

}  // namespace

LogGammaTable::LogGammaTable(std::int64_t max_n) {
  if (max_n < 1) max_n = 1;
  cache_.resize(static_cast<std::size_t>(max_n) + 1);
  cache_[0] = 0.0;
  cache_[1] = 0.0;
  for (std::int64_t n = 2; n <= max_n; ++n) {
    cache_[static_cast<std::size_t>(n)] = std::lgamma(static_cast<double>(n) + 1.0);
  }
}

double LogGammaTable::log_factorial(std::int64_t n) const {
  if (n < 0) throw Error(Errc::DomainError, "log_factorial of negative argument");
  if (n < static_cast<std::int64_t>(cache_.size())) return cache_[static_cast<std::size_t>(n)];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double LogGammaTable::log_binomial(std::int64_t n, std::int64_t k) const {
  if (k < 0 || k > n) throw Error(Errc::DomainError, "log_binomial with k outside [0, n]");
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

LogGammaTable LogGammaTable::perturbed(std::int64_t n, double delta) const {
  LogGammaTable copy = *this;
  if (n >= 0 && n < static_cast<std::int64_t>(copy.cache_.size())) {
    copy.cache_[static_cast<std::size_t>(n)] += delta;
  }
  return copy;
}

const LogGammaTable& LogGammaTable::shared() {
  static const LogGammaTable table(kSharedTableSize);
  return table;
}

double fisher_point_prob(const ContingencyTable& table, const LogGammaTable& lgamma) {
  check_table(table);
  if (table.total() == 0 || has_empty_margin(table)) return 1.0;
  return clamp_probability(std::exp(log_point_prob(table, lgamma)));
}

double fisher_two_sided(const ContingencyTable& table, const LogGammaTable& lgamma) {
  check_table(table);
  if (table.total() == 0 || has_empty_margin(table)) return 1.0;

  const std::int64_t row1 = table.containing();
  const std::int64_t row2 = table.omitting();
  const std::int64_t col1 = table.correct();
  const double observed = log_point_prob(table, lgamma);
  const double cutoff = observed + std::log1p(kTieTolerance);

  double sum = 0.0;
  const std::int64_t lo = std::max<std::int64_t>(0, col1 - row2);
  const std::int64_t hi = std::min(row1, col1);
  for (std::int64_t a = lo; a <= hi; ++a) {
    const ContingencyTable t{a, row1 - a, col1 - a, row2 - col1 + a};
    const double lp = log_point_prob(t, lgamma);
    if (lp <= cutoff) sum += std::exp(lp);
  }
  return clamp_probability(sum);
}

double fisher_p(const ContingencyTable& table, FisherMode mode, const LogGammaTable& lgamma) {
  return mode == FisherMode::point ? fisher_point_prob(table, lgamma)
                                   : fisher_two_sided(table, lgamma);
}

double fisher_score(double p) {
  if (!(p > 0.0) || p > 1.0 + 1e-12) {
    throw Error(Errc::DomainError, "fisher_score requires p in (0, 1], got " + std::to_string(p));
  }
  if (std::abs(p - 1.0) <= 1e-12) return 0.0;
  return std::exp(-2.0 * p);
}

double binary_entropy(std::int64_t first, std::int64_t second) {
  const std::int64_t n = first + second;
  if (n <= 0) return 0.0;
  return plogp_term(first, n) + plogp_term(second, n);
}

double entropy_y(const ContingencyTable& table) {
  check_table(table);
  return binary_entropy(table.correct(), table.incorrect());
}

double cond_entropy(const ContingencyTable& table) {
  check_table(table);
  const std::int64_t n = table.total();
  if (n == 0) return 0.0;
  double h = 0.0;
  if (table.containing() > 0) {
    h += static_cast<double>(table.containing()) / static_cast<double>(n) *
         binary_entropy(table.a, table.b);
  }
  if (table.omitting() > 0) {
    h += static_cast<double>(table.omitting()) / static_cast<double>(n) *
         binary_entropy(table.c, table.d);
  }
  return h;
}

double info_gain(const ContingencyTable& table) {
  const double h = entropy_y(table);
  return std::clamp(h - cond_entropy(table), 0.0, h);
}

}  // namespace ktae::stats
