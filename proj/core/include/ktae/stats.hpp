#pragma once

#include <cstdint>
#include <vector>

#include "ktae/config.hpp"
#include "ktae/core.hpp"

namespace ktae::stats {

/// Precomputed ln(n!) = lnGamma(n + 1) for n in [0, max_n]. Arguments past
/// the cache fall back to std::lgamma.
class LogGammaTable {
 public:
  explicit LogGammaTable(std::int64_t max_n);

  std::int64_t max_n() const noexcept { return static_cast<std::int64_t>(cache_.size()) - 1; }

  /// ln(n!)
  double log_factorial(std::int64_t n) const;

  /// ln C(n, k)
  double log_binomial(std::int64_t n, std::int64_t k) const;

  /// Returns a copy whose ln(n!) entry is shifted by `delta`. Used to check
  /// that the oracle harness catches a corrupted table.
  LogGammaTable perturbed(std::int64_t n, double delta) const;

  /// Process-wide table covering every group size the engine is expected to see.
  static const LogGammaTable& shared();

 private:
  std::vector<double> cache_;
};

/// Hypergeometric point probability of the observed table given its margins,
/// C(a+b, a) C(c+d, c) / C(N, a+c), evaluated in log space. Result in (0, 1];
/// any table with an empty margin has probability exactly 1.
double fisher_point_prob(const ContingencyTable& table,
                         const LogGammaTable& lgamma = LogGammaTable::shared());

/// Two-sided p-value: total probability of all same-margin tables no more
/// likely than the observed one (relative tie tolerance 1e-7).
double fisher_two_sided(const ContingencyTable& table,
                        const LogGammaTable& lgamma = LogGammaTable::shared());

double fisher_p(const ContingencyTable& table, FisherMode mode,
                const LogGammaTable& lgamma = LogGammaTable::shared());

/// 0 when p is 1, otherwise exp(-2p). Throws Error{DomainError} outside (0, 1].
double fisher_score(double p);

/// Binary entropy in bits of a two-way split of counts, with 0 log 0 = 0.
double binary_entropy(std::int64_t first, std::int64_t second);

double entropy_y(const ContingencyTable& table);
double cond_entropy(const ContingencyTable& table);
double info_gain(const ContingencyTable& table);

}  // namespace ktae::stats
