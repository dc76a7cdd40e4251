#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include <momfix/momfix.hpp>

using namespace momfix;
using Catch::Matchers::WithinAbs;

TEST_CASE("t_map on elementary sequences", "[transform]") {
  std::vector<double> ones(21, 1.0);
  auto b = t_map(ones);
  for (std::size_t n = 0; n <= 20; ++n) REQUIRE(b[n] == 1.0 / (n + 1.0));

  std::vector<double> unif(21);
  for (std::size_t n = 0; n <= 20; ++n) unif[n] = 1.0 / (n + 1.0);
  auto c = t_map(unif);
  for (std::size_t n = 0; n <= 20; ++n)
    REQUIRE_THAT(c[n], WithinAbs(1.0 / harmonic(n + 1), 1e-15));

  REQUIRE_THROWS_AS(t_map(std::vector<double>{}), std::invalid_argument);
  REQUIRE_THROWS_AS(t_map(std::vector<double>{0.5, 0.1}), std::invalid_argument);
}

TEST_CASE("t_inverse inverts t_map", "[transform]") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> a(30);
  a[0] = 1.0;
  for (std::size_t n = 1; n < 30; ++n) a[n] = u(rng);
  auto c = t_inverse(t_map(a));
  for (std::size_t n = 0; n < 30; ++n) REQUIRE_THAT(c[n], WithinAbs(a[n], 1e-12));
  REQUIRE_THROWS_AS(t_inverse(std::vector<double>{}), std::invalid_argument);
  REQUIRE_THROWS_AS(t_inverse(std::vector<double>{1.0, -0.2}), std::invalid_argument);
}

TEST_CASE("t_map reverses componentwise order", "[transform]") {
  std::vector<double> a(25), b(25);
  for (std::size_t n = 0; n < 25; ++n) {
    a[n] = std::pow(0.4, static_cast<double>(n));
    b[n] = 0.5 * (std::pow(0.4, static_cast<double>(n)) +
                  std::pow(0.9, static_cast<double>(n)));
  }
  auto ta = t_map(a), tb = t_map(b);
  for (std::size_t n = 0; n < 25; ++n) {
    REQUIRE(a[n] <= b[n]);
    REQUIRE(ta[n] >= tb[n]);
  }
}

TEST_CASE("fixed point is fixed", "[transform]") {
  auto m = fixed_point_moments(60);
  auto b = t_map(m);
  for (std::size_t n = 0; n <= 60; ++n) REQUIRE_THAT(b[n], WithinAbs(m[n], 1e-11));
}

TEST_CASE("trajectory from the point mass at 1", "[transform]") {
  std::vector<double> delta0(9, 0.0);
  delta0[0] = 1.0;
  auto traj = iterate_t(delta0, 3);
  REQUIRE(traj.size() == 3);
  for (double v : traj[0]) REQUIRE(v == 1.0);
  for (std::size_t n = 0; n < 9; ++n) REQUIRE(traj[1][n] == 1.0 / (n + 1.0));
  for (std::size_t n = 0; n < 9; ++n)
    REQUIRE_THAT(traj[2][n], WithinAbs(1.0 / harmonic(n + 1), 1e-14));
  REQUIRE_THROWS_AS(iterate_t(delta0, 0), std::invalid_argument);
}

TEST_CASE("uniform spectral measure", "[transform]") {
  auto mu = uniform_measure();
  REQUIRE(mu.rho0 == 1.0);
  REQUIRE(mu.p_max() == 0);
  REQUIRE(spectral_mass(mu) == 1.0);
  for (double z : {-0.5, 0.5, 1.0, 7.3})
    REQUIRE_THAT(bernstein_spectral(mu, z), WithinAbs(bernstein_uniform(z), 1e-13));
  for (std::size_t n = 0; n <= 10; ++n)
    REQUIRE(moments_of_spectral(mu, n) == 1.0 / (n + 1.0));
}

TEST_CASE("one transform step from uniform", "[transform]") {
  auto mu3 = that_step(uniform_measure(), 12);
  REQUIRE(mu3.p_max() == 12);
  for (std::size_t p = 1; p <= 12; ++p) {
    REQUIRE(mu3.shells[p - 1].size() == 1);
    const auto& a = mu3.shells[p - 1][0];
    REQUIRE(a.xi > -(static_cast<double>(p) + 1.0));
    REQUIRE(a.xi < -static_cast<double>(p));
    REQUIRE(a.rho > 0.0);
  }
  // frozen against an independent bracketed-bisection + Newton oracle
  REQUIRE_THAT(mu3.shells[0][0].xi, WithinAbs(-1.5673537531016553, 1e-10));
  REQUIRE_THAT(mu3.shells[0][0].rho, WithinAbs(0.105898229747425, 1e-10));
  REQUIRE_THAT(mu3.shells[11][0].xi, WithinAbs(-12.746992117998160, 1e-8));
  REQUIRE_THAT(mu3.shells[11][0].rho, WithinAbs(0.051836329314856, 1e-8));
  // every atom is a zero of the input transform, weight = 1/derivative
  for (const auto& shell : mu3.shells) {
    REQUIRE_THAT(bernstein_uniform(shell[0].xi), WithinAbs(0.0, 1e-12));
    REQUIRE_THAT(shell[0].rho * trigamma(1.0 + shell[0].xi), WithinAbs(1.0, 1e-11));
  }
  REQUIRE_THAT(spectral_mass(mu3), WithinAbs(1.0 - mu3.tail_deficit, 1e-12));
  REQUIRE(mu3.tail_deficit > 0.0);
  REQUIRE(mu3.tail_deficit < 0.5);
  REQUIRE_THROWS_AS(that_step(uniform_measure(), 0), std::invalid_argument);
}

TEST_CASE("shell pole bookkeeping on composed steps", "[transform]") {
  auto mu3 = that_step(uniform_measure(), 6);
  auto mu4 = that_step(mu3, 6);
  // shell p of the image interlaces {-p} with every shallower input atom
  // shifted down, so its count is 1 + sum of the shallower input counts
  for (std::size_t p = 1; p <= 6; ++p) REQUIRE(mu4.shells[p - 1].size() == p);
  auto mu5 = that_step(mu4, 4);
  std::vector<std::size_t> expect{1, 2, 4, 7};
  for (std::size_t p = 1; p <= 4; ++p)
    REQUIRE(mu5.shells[p - 1].size() == expect[p - 1]);
  for (std::size_t p = 1; p <= 4; ++p) {
    const auto& sh = mu5.shells[p - 1];
    for (std::size_t i = 0; i + 1 < sh.size(); ++i) REQUIRE(sh[i].xi < sh[i + 1].xi);
    for (const auto& a : sh) {
      REQUIRE(a.xi > -(static_cast<double>(p) + 1.0));
      REQUIRE(a.xi < -static_cast<double>(p));
      REQUIRE(a.rho > 0.0);
    }
  }
}

TEST_CASE("image moments through the duality", "[transform]") {
  auto mu = uniform_measure();
  for (std::size_t n = 0; n <= 20; ++n)
    REQUIRE_THAT(moments_of_image(mu, n),
                 WithinAbs(1.0 / harmonic(n + 1), 1e-14));
}

TEST_CASE("shell poles are sorted and complete", "[transform]") {
  auto mu3 = that_step(uniform_measure(), 4);
  auto poles = shell_poles(mu3, 2);
  // {-2} plus the shell-1 atom shifted by 1
  REQUIRE(poles.size() == 2);
  REQUIRE(poles[0] < poles[1]);
  REQUIRE_THAT(poles[0], WithinAbs(mu3.shells[0][0].xi - 1.0, 1e-15));
  REQUIRE(poles[1] == -2.0);
}
