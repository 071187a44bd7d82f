#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "ktae/core.hpp"
#include "ktae/stats.hpp"

namespace ktae::oracle {

using BigInt = boost::multiprecision::cpp_int;

/// Exact fraction in lowest terms with a positive denominator.
class ExactRational {
 public:
  ExactRational() = default;
  ExactRational(BigInt numerator, BigInt denominator);
  ExactRational(std::int64_t value) : num_(value) {}  // NOLINT(google-explicit-constructor)

  const BigInt& numerator() const noexcept { return num_; }
  const BigInt& denominator() const noexcept { return den_; }

  /// Nearest double, accurate to a few ulps for any magnitude representable.
  double to_double() const;
  std::string to_string() const;

  friend ExactRational operator+(const ExactRational& x, const ExactRational& y);
  friend ExactRational operator-(const ExactRational& x, const ExactRational& y);
  friend ExactRational operator*(const ExactRational& x, const ExactRational& y);
  friend ExactRational operator/(const ExactRational& x, const ExactRational& y);
  ExactRational& operator+=(const ExactRational& other) { return *this = *this + other; }

  friend bool operator==(const ExactRational& x, const ExactRational& y) {
    return x.num_ == y.num_ && x.den_ == y.den_;
  }
  friend bool operator<(const ExactRational& x, const ExactRational& y) {
    return x.num_ * y.den_ < y.num_ * x.den_;
  }
  friend bool operator<=(const ExactRational& x, const ExactRational& y) { return !(y < x); }

 private:
  void normalize();

  BigInt num_ = 0;
  BigInt den_ = 1;
};

inline constexpr std::int64_t kMaxOracleN = 64;

BigInt factorial(std::int64_t n);

/// (a+b)! (c+d)! (a+c)! (b+d)! / (a! b! c! d! N!) exactly. Throws Error{Overflow}
/// when N exceeds kMaxOracleN.
ExactRational fisher_exact_rational(const ContingencyTable& table);

/// Sum of the exact point probabilities of every same-margin table whose
/// probability does not exceed the observed one.
ExactRational fisher_two_sided_enum(const ContingencyTable& table);

/// Builds the table by scanning every rollout for the token from scratch.
ContingencyTable brute_force_stats(const ValidatedGroup& group, TokenId token);

struct OracleCheckResult {
  std::int64_t tables_checked = 0;
  double worst_relative_error = 0.0;
  ContingencyTable worst_table;
  // First table whose error exceeds the tolerance, if any.
  std::optional<ContingencyTable> counterexample;
  double counterexample_error = 0.0;

  bool passed() const noexcept { return !counterexample.has_value(); }
};

inline constexpr double kOracleTolerance = 1e-9;

/// Compares the log-space Fisher point probability against the exact oracle
/// for every table with 1 <= N <= max_n.
OracleCheckResult run_oracle_check(std::int64_t max_n,
                                   const stats::LogGammaTable& lgamma = stats::LogGammaTable::shared(),
                                   double tolerance = kOracleTolerance);

}  // namespace ktae::oracle
