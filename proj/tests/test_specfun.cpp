#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include <momfix/momfix.hpp>

using namespace momfix;
using Catch::Matchers::WithinAbs;

namespace {
constexpr double pi = 3.14159265358979323846;
}

TEST_CASE("digamma at classical points", "[specfun]") {
  REQUIRE_THAT(digamma(1.0), WithinAbs(-euler_gamma, 1e-14));
  REQUIRE_THAT(digamma(2.0), WithinAbs(1.0 - euler_gamma, 1e-14));
  REQUIRE_THAT(digamma(0.5), WithinAbs(-euler_gamma - 2.0 * std::log(2.0), 1e-13));
  // psi(n+1) = H_n - gamma
  for (int n : {1, 3, 10, 25})
    REQUIRE_THAT(digamma(n + 1.0),
                 WithinAbs(harmonic(static_cast<std::uint64_t>(n)) - euler_gamma, 1e-12));
}

TEST_CASE("digamma recurrence and poles", "[specfun]") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ux(0.05, 40.0);
  for (int i = 0; i < 200; ++i) {
    double x = ux(rng);
    REQUIRE_THAT(digamma(x + 1.0) - digamma(x), WithinAbs(1.0 / x, 1e-12));
  }
  REQUIRE_THROWS_AS(digamma(0.0), pole_error);
  REQUIRE_THROWS_AS(digamma(-3.0), pole_error);
  REQUIRE_NOTHROW(digamma(-2.5));
}

TEST_CASE("trigamma values and recurrence", "[specfun]") {
  REQUIRE_THAT(trigamma(1.0), WithinAbs(pi * pi / 6.0, 1e-13));
  REQUIRE_THAT(trigamma(0.5), WithinAbs(pi * pi / 2.0, 1e-12));
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> ux(0.1, 30.0);
  for (int i = 0; i < 200; ++i) {
    double x = ux(rng);
    REQUIRE_THAT(trigamma(x) - trigamma(x + 1.0), WithinAbs(1.0 / (x * x), 1e-11));
  }
  REQUIRE_THROWS_AS(trigamma(-1.0), pole_error);
}

TEST_CASE("complex digamma agrees with real axis and conjugates", "[specfun]") {
  for (double x : {0.3, 1.0, 3.7, 12.0}) {
    std::complex<double> w = digamma(std::complex<double>(x, 0.0));
    REQUIRE_THAT(w.real(), WithinAbs(digamma(x), 1e-12));
    REQUIRE_THAT(w.imag(), WithinAbs(0.0, 1e-13));
  }
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> ur(-0.9, 10.0), ui(0.05, 8.0);
  for (int i = 0; i < 100; ++i) {
    std::complex<double> z(ur(rng), ui(rng));
    std::complex<double> a = digamma(z), b = digamma(std::conj(z));
    REQUIRE_THAT(std::abs(b - std::conj(a)), WithinAbs(0.0, 1e-12));
    // recurrence psi(z+1) = psi(z) + 1/z
    std::complex<double> r = digamma(z + 1.0) - a - 1.0 / z;
    REQUIRE_THAT(std::abs(r), WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("shifted hurwitz zeta", "[specfun]") {
  REQUIRE_THAT(hurwitz_zeta_shifted(2, 0.0), WithinAbs(pi * pi / 6.0, 1e-13));
  REQUIRE_THAT(hurwitz_zeta_shifted(3, 0.0), WithinAbs(1.2020569031595943, 1e-13));
  REQUIRE_THAT(hurwitz_zeta_shifted(2, 1.0), WithinAbs(pi * pi / 6.0 - 1.0, 1e-13));
  // contraction identity: Z(s,a) = (1+a)^{-s} + Z(s, a+1)
  std::mt19937 rng(10);
  std::uniform_real_distribution<double> ua(-0.7, 5.0);
  for (int i = 0; i < 100; ++i) {
    double a = ua(rng);
    for (int s : {2, 3, 5}) {
      double lhs = hurwitz_zeta_shifted(s, a);
      double rhs = std::pow(1.0 + a, -s) + hurwitz_zeta_shifted(s, a + 1.0);
      REQUIRE_THAT(lhs, WithinAbs(rhs, 1e-12));
    }
  }
  REQUIRE_THROWS_AS(hurwitz_zeta_shifted(1, 0.5), std::invalid_argument);
  REQUIRE_THROWS_AS(hurwitz_zeta_shifted(2, -1.0), std::invalid_argument);
}

TEST_CASE("harmonic numbers", "[specfun]") {
  REQUIRE(harmonic(0) == 0.0);
  REQUIRE(harmonic(1) == 1.0);
  REQUIRE_THAT(harmonic(5), WithinAbs(137.0 / 60.0, 1e-15));
  REQUIRE_THAT(harmonic(100), WithinAbs(5.1873775176396206, 1e-13));
}

TEST_CASE("uniform-measure bernstein transform", "[specfun]") {
  REQUIRE_THAT(bernstein_uniform(0.0), WithinAbs(0.0, 1e-15));
  REQUIRE_THAT(bernstein_uniform(1.0), WithinAbs(1.0, 1e-14));
  for (int n : {2, 3, 7})
    REQUIRE_THAT(bernstein_uniform(n),
                 WithinAbs(harmonic(static_cast<std::uint64_t>(n)), 1e-13));
  // its unique zero in (-2,-1), frozen from a bracketed bisection oracle
  const double root = -1.5673537531016553;
  REQUIRE_THAT(bernstein_uniform(root), WithinAbs(0.0, 1e-12));
  REQUIRE(bernstein_uniform(root - 1e-6) < 0.0);
  REQUIRE(bernstein_uniform(root + 1e-6) > 0.0);
}
