#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <momfix/momfix.hpp>

using namespace momfix;
using Catch::Matchers::WithinAbs;

namespace {
const double golden = 0.5 * (std::sqrt(5.0) + 1.0);  // 1.618...
}

TEST_CASE("moment prefix closed forms", "[seqcore]") {
  auto m = fixed_point_moments(4);
  REQUIRE(m[0] == 1.0);
  REQUIRE_THAT(m[1], WithinAbs(0.5 * (std::sqrt(5.0) - 1.0), 1e-15));
  // positive root of 16 x^4 + 8 x^3 (sqrt5+1) - ... collapses to this radical
  REQUIRE_THAT(m[2], WithinAbs(0.25 * (std::sqrt(22.0 + 2.0 * std::sqrt(5.0)) -
                                       std::sqrt(5.0) - 1.0),
                               1e-15));
  REQUIRE(m[1] > m[2]);
  REQUIRE(m[2] > m[3]);
}

TEST_CASE("defining identity m_n * partial_sum = 1", "[seqcore]") {
  const std::size_t n_max = 10000;
  auto m = fixed_point_moments(n_max);
  double sum = 0.0, comp = 0.0;
  for (std::size_t n = 0; n <= n_max; ++n) {
    double y = m[n] - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    REQUIRE_THAT(m[n] * sum, WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("reciprocal sequence", "[seqcore]") {
  auto lam = lambda_sequence(40);
  auto m = fixed_point_moments(40);
  REQUIRE(lam[0] == 0.0);
  REQUIRE(lam[1] == 1.0);
  REQUIRE_THAT(lam[2], WithinAbs(golden, 1e-15));
  for (std::size_t n = 0; n < 40; ++n)
    REQUIRE_THAT(lam[n + 1] * m[n], WithinAbs(1.0, 1e-13));
  // each step inverts psi on the positive branch
  for (std::size_t n = 1; n <= 39; ++n)
    REQUIRE_THAT(psi(lam[n + 1]), WithinAbs(lam[n], 1e-13));
}

TEST_CASE("step preconditions", "[seqcore]") {
  REQUIRE_THROWS_AS(phi_step(0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(phi_step(-1.0), std::invalid_argument);
  REQUIRE_THAT(lambda_step(0.0), WithinAbs(1.0, 0.0));
}

TEST_CASE("angle conjugation tracks the moments", "[seqcore]") {
  REQUIRE_THAT(g_iterate(0), WithinAbs(std::atan(1.0), 0.0));
  auto m = fixed_point_moments(20);
  double prev = std::atan(1.0) + 1e-12;
  for (std::size_t n = 0; n <= 20; ++n) {
    double h = g_iterate(n);
    REQUIRE(h > 0.0);
    REQUIRE(h < prev);  // strictly decreasing inside (0, pi/4]
    REQUIRE_THAT(std::tan(h), WithinAbs(m[n], 1e-14));
    prev = h;
  }
}

TEST_CASE("seeded reciprocal orbit", "[seqcore]") {
  auto seeded = lambda_seeded(0.0, 10);
  auto lam = lambda_sequence(10);
  for (std::size_t l = 0; l <= 10; ++l) REQUIRE(seeded.values[l] == lam[l]);
  auto from_neg = lambda_seeded(-2.5, 3);
  REQUIRE(from_neg.values[0] == -2.5);
  for (std::size_t l = 0; l < 3; ++l)
    REQUIRE_THAT(psi(from_neg.values[l + 1]), WithinAbs(from_neg.values[l], 1e-13));
}

TEST_CASE("asymptotic diagnostics", "[seqcore]") {
  REQUIRE_THROWS_AS(asymptotic_report(1), std::invalid_argument);
  auto rep = asymptotic_report(1000);
  auto lam = lambda_sequence(1001);
  REQUIRE_THAT(rep.lambda_n, WithinAbs(lam[1000], 1e-12));
  REQUIRE_THAT(rep.m_n * lam[1001], WithinAbs(1.0, 1e-12));
  REQUIRE_THAT(rep.log_ratio * std::log(1000.0),
               WithinAbs(rep.lambda_sq_minus_2n, 1e-12));
  REQUIRE_THAT(rep.m_scaled, WithinAbs(rep.m_n * std::sqrt(2000.0), 1e-15));
  // lambda_n^2 grows like 2n: consecutive square gap near 2
  REQUIRE_THAT(rep.sq_gap, WithinAbs(2.0, 1e-3));
  auto rep6 = asymptotic_report(1000000);
  REQUIRE_THAT(rep6.m_scaled, WithinAbs(1.0, 1e-4));
  REQUIRE_THAT(rep6.sq_gap, WithinAbs(2.0, 1e-5));
}
