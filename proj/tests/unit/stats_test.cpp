#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "ktae/oracle.hpp"
#include "ktae/stats.hpp"
#include "test_util.hpp"

using namespace ktae;
using namespace ktae::stats;

// Frozen values below were computed independently with exact integer
// factorials and 30-digit mpmath evaluation.
constexpr double kH075 = 0.811278124459132863909695792039;
constexpr double kExpMinus2Over70 = 0.971832875032981105112825270057;

TEST_CASE("log-gamma table") {
  const LogGammaTable t(64);
  CHECK(t.log_factorial(0) == 0.0);
  CHECK(t.log_factorial(1) == 0.0);
  for (std::int64_t n = 2; n <= 64; ++n) {
    CHECK(t.log_factorial(n) >= t.log_factorial(n - 1));
  }
  CHECK(t.log_factorial(10) == doctest::Approx(std::log(3628800.0)).epsilon(1e-14));
  // Past the cache the value still comes from lgamma.
  CHECK(t.log_factorial(100) == doctest::Approx(std::lgamma(101.0)).epsilon(1e-14));
  CHECK(t.log_binomial(8, 4) == doctest::Approx(std::log(70.0)).epsilon(1e-14));
}

TEST_CASE("fisher_point_prob examples") {
  CHECK(fisher_point_prob({12, 4, 0, 0}) == 1.0);
  CHECK(fisher_point_prob({0, 0, 12, 4}) == 1.0);
  CHECK(fisher_point_prob({4, 0, 0, 4}) == doctest::Approx(1.0 / 70.0).epsilon(1e-12));
  CHECK(fisher_point_prob({3, 1, 1, 3}) == doctest::Approx(16.0 / 70.0).epsilon(1e-12));
  CHECK(fisher_point_prob({12, 0, 0, 4}) == doctest::Approx(1.0 / 1820.0).epsilon(1e-12));
  CHECK(fisher_point_prob({5, 1, 7, 3}) == doctest::Approx(36.0 / 91.0).epsilon(1e-12));
  CHECK(fisher_point_prob({7, 2, 5, 2}) == doctest::Approx(27.0 / 65.0).epsilon(1e-12));
}

TEST_CASE("fisher_point_prob rejects negative cells") {
  CHECK_THROWS_AS(fisher_point_prob({-1, 2, 3, 4}), Error);
}

TEST_CASE("two-sided p-value") {
  CHECK(fisher_two_sided({2, 2, 2, 2}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fisher_two_sided({4, 0, 0, 4}) == doctest::Approx(1.0 / 35.0).epsilon(1e-12));
  CHECK(fisher_two_sided({3, 1, 1, 3}) == doctest::Approx(17.0 / 35.0).epsilon(1e-12));
  CHECK(fisher_p({3, 1, 1, 3}, FisherMode::point) == doctest::Approx(16.0 / 70.0));
  CHECK(fisher_p({3, 1, 1, 3}, FisherMode::two_sided) == doctest::Approx(17.0 / 35.0));
}

TEST_CASE("two-sided p-value agrees with exact enumeration for N <= 16") {
  for (std::int64_t n = 1; n <= 16; ++n) {
    for (std::int64_t a = 0; a <= n; ++a) {
      for (std::int64_t b = 0; a + b <= n; ++b) {
        for (std::int64_t c = 0; a + b + c <= n; ++c) {
          const ContingencyTable t{a, b, c, n - a - b - c};
          const double exact = oracle::fisher_two_sided_enum(t).to_double();
          REQUIRE(std::abs(fisher_two_sided(t) - exact) <= 1e-9 * exact);
        }
      }
    }
  }
}

TEST_CASE("fisher_score transform") {
  CHECK(fisher_score(1.0) == 0.0);
  CHECK(fisher_score(1.0 - 1e-13) == 0.0);
  CHECK(fisher_score(1.0 / 70.0) == doctest::Approx(kExpMinus2Over70).epsilon(1e-14));
  CHECK(fisher_score(1e-12) >= 1.0 - 1e-11);
  CHECK(fisher_score(0.5) == doctest::Approx(std::exp(-1.0)));
  CHECK_THROWS_AS(fisher_score(0.0), Error);
  CHECK_THROWS_AS(fisher_score(-0.1), Error);
  CHECK_THROWS_AS(fisher_score(1.1), Error);
  CHECK_THROWS_AS(fisher_score(std::numeric_limits<double>::quiet_NaN()), Error);

  // Range is {0} union (e^-2, 1).
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> p(1e-300, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double f = fisher_score(p(rng));
    CHECK((f == 0.0 || (f > std::exp(-2.0) && f < 1.0)));
  }
}

TEST_CASE("entropy examples") {
  CHECK(entropy_y({2, 2, 2, 2}) == 1.0);
  CHECK(entropy_y({4, 0, 4, 0}) == 0.0);
  CHECK(entropy_y({3, 1, 3, 1}) == doctest::Approx(kH075).epsilon(1e-14));

  CHECK(cond_entropy({4, 0, 0, 4}) == 0.0);
  CHECK(cond_entropy({2, 2, 2, 2}) == 1.0);
  CHECK(cond_entropy({3, 1, 1, 3}) == doctest::Approx(kH075).epsilon(1e-14));

  CHECK(info_gain({4, 0, 0, 4}) == 1.0);
  CHECK(info_gain({2, 2, 2, 2}) == 0.0);
  CHECK(info_gain({3, 1, 1, 3}) == doctest::Approx(1.0 - kH075).epsilon(1e-13));
}

TEST_CASE("degenerate columns give p = 1 and IG = 0") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> cell(0, 40);
  for (int i = 0; i < 2000; ++i) {
    const std::int64_t x = cell(rng), y = cell(rng);
    if (x + y == 0) continue;
    const ContingencyTable in_all{x, y, 0, 0};
    const ContingencyTable in_none{0, 0, x, y};
    CHECK(fisher_point_prob(in_all) == 1.0);
    CHECK(fisher_point_prob(in_none) == 1.0);
    CHECK(info_gain(in_all) == 0.0);
    CHECK(info_gain(in_none) == 0.0);
    CHECK(fisher_score(fisher_point_prob(in_all)) == 0.0);
  }
}

TEST_CASE("column swap leaves p and IG unchanged") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 20000; ++i) {
    const ContingencyTable t = ktae::testing::random_table(rng, 64);
    CHECK(std::abs(fisher_point_prob(t) - fisher_point_prob(t.swapped())) <= 1e-12);
    CHECK(std::abs(fisher_two_sided(t) - fisher_two_sided(t.swapped())) <= 1e-12);
    CHECK(std::abs(info_gain(t) - info_gain(t.swapped())) <= 1e-12);
  }
}

TEST_CASE("bounds over random tables") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 20000; ++i) {
    const ContingencyTable t = ktae::testing::random_table(rng, 200);
    const double p = fisher_point_prob(t);
    CHECK(p > 0.0);
    CHECK(p <= 1.0);
    const double p2 = fisher_two_sided(t);
    CHECK(p2 >= p * (1 - 1e-9));
    CHECK(p2 <= 1.0);
    const double h = entropy_y(t);
    const double ig = info_gain(t);
    CHECK(ig >= 0.0);
    CHECK(ig <= h);
    CHECK(h <= 1.0);
  }
}

TEST_CASE("extreme tables stay strictly positive") {
  // ln p is about -1.4e4 here, far below the double range.
  const double p = fisher_point_prob({10000, 0, 0, 10000});
  CHECK(p > 0.0);
  CHECK(fisher_score(p) == doctest::Approx(1.0));
}
