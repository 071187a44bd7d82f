#include "ktae/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace ktae::oracle {
namespace {

namespace mp = boost::multiprecision;

const std::vector<BigInt>& factorials() {
  static const std::vector<BigInt> table = [] {
    std::vector<BigInt> f(kMaxOracleN + 1);
    f[0] = 1;
    for (std::int64_t n = 1; n <= kMaxOracleN; ++n) f[n] = f[n - 1] * n;
    return f;
  }();
  return table;
}

void check_bound(const ContingencyTable& t) {
  if (!t.valid()) throw Error(Errc::DomainError, "contingency table has a negative cell");
  if (t.total() > kMaxOracleN) {
    throw Error(Errc::Overflow, "oracle supports N <= " + std::to_string(kMaxOracleN) +
                                    ", got N = " + std::to_string(t.total()));
  }
}

}  // namespace

ExactRational::ExactRational(BigInt numerator, BigInt denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
  normalize();
}

void ExactRational::normalize() {
  if (den_ == 0) throw Error(Errc::DomainError, "rational with zero denominator");
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  if (num_ == 0) {
    den_ = 1;
    return;
  }
  const BigInt g = mp::gcd(mp::abs(num_), den_);
  if (g != 1) {
    num_ /= g;
    den_ /= g;
  }
}

double ExactRational::to_double() const {
  if (num_ == 0) return 0.0;
  const bool negative = num_ < 0;
  const BigInt n = mp::abs(num_);
  // Scale so the integer quotient lands in [2^62, 2^64): truncation then
  // costs at most 2^-62 relative, and the u64 -> double step rounds once.
  const auto shift = static_cast<long>(63 + mp::msb(den_)) - static_cast<long>(mp::msb(n));
  const BigInt q = shift >= 0 ? BigInt(n << shift) / den_ : n / BigInt(den_ << -shift);
  const double value =
      std::ldexp(static_cast<double>(q.convert_to<unsigned long long>()), static_cast<int>(-shift));
  return negative ? -value : value;
}

std::string ExactRational::to_string() const { return num_.str() + "/" + den_.str(); }

ExactRational operator+(const ExactRational& x, const ExactRational& y) {
  return {x.num_ * y.den_ + y.num_ * x.den_, x.den_ * y.den_};
}

ExactRational operator-(const ExactRational& x, const ExactRational& y) {
  return {x.num_ * y.den_ - y.num_ * x.den_, x.den_ * y.den_};
}

ExactRational operator*(const ExactRational& x, const ExactRational& y) {
  return {x.num_ * y.num_, x.den_ * y.den_};
}

ExactRational operator/(const ExactRational& x, const ExactRational& y) {
  return {x.num_ * y.den_, x.den_ * y.num_};
}

BigInt factorial(std::int64_t n) {
  if (n < 0 || n > kMaxOracleN) {
    throw Error(Errc::Overflow, "factorial argument outside [0, " + std::to_string(kMaxOracleN) + "]");
  }
  return factorials()[static_cast<std::size_t>(n)];
}

ExactRational fisher_exact_rational(const ContingencyTable& t) {
  check_bound(t);
  const auto& f = factorials();
  BigInt num = f[t.a + t.b] * f[t.c + t.d] * f[t.a + t.c] * f[t.b + t.d];
  BigInt den = f[t.a] * f[t.b] * f[t.c] * f[t.d] * f[t.total()];
  return {std::move(num), std::move(den)};
}

ExactRational fisher_two_sided_enum(const ContingencyTable& t) {
  check_bound(t);
  const ExactRational observed = fisher_exact_rational(t);
  const std::int64_t row1 = t.a + t.b;
  const std::int64_t row2 = t.c + t.d;
  const std::int64_t col1 = t.a + t.c;
  ExactRational sum;
  for (std::int64_t a = std::max<std::int64_t>(0, col1 - row2); a <= std::min(row1, col1); ++a) {
    const ExactRational p = fisher_exact_rational({a, row1 - a, col1 - a, row2 - col1 + a});
    if (p <= observed) sum += p;
  }
  return sum;
}

ContingencyTable brute_force_stats(const ValidatedGroup& group, TokenId token) {
  ContingencyTable t;
  for (std::size_t i = 0; i < group.size(); ++i) {
    const auto& tokens = group.rollout(i).tokens;
    bool contains = false;
    for (TokenId x : tokens) {
      if (x == token) {
        contains = true;
        break;
      }
    }
    if (group.is_correct(i)) {
      ++(contains ? t.a : t.c);
    } else {
      ++(contains ? t.b : t.d);
    }
  }
  return t;
}

OracleCheckResult run_oracle_check(std::int64_t max_n, const stats::LogGammaTable& lgamma,
                                   double tolerance) {
  if (max_n > kMaxOracleN) {
    throw Error(Errc::Overflow, "--max-n must be <= " + std::to_string(kMaxOracleN));
  }
  OracleCheckResult result;
  for (std::int64_t n = 1; n <= max_n; ++n) {
    for (std::int64_t a = 0; a <= n; ++a) {
      for (std::int64_t b = 0; a + b <= n; ++b) {
        for (std::int64_t c = 0; a + b + c <= n; ++c) {
          const ContingencyTable t{a, b, c, n - a - b - c};
          const double exact = fisher_exact_rational(t).to_double();
          const double fast = stats::fisher_point_prob(t, lgamma);
          const double err = std::abs(fast - exact) / exact;
          ++result.tables_checked;
          if (err > result.worst_relative_error || std::isnan(err)) {
            result.worst_relative_error = err;
            result.worst_table = t;
          }
          if (!(err <= tolerance)) {
            result.counterexample = t;
            result.counterexample_error = err;
            return result;
          }
        }
      }
    }
  }
  return result;
}

}  // namespace ktae::oracle
