#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>

#include <momfix/momfix.hpp>

using namespace momfix;
using Catch::Matchers::WithinAbs;

namespace {
const double golden = 0.5 * (std::sqrt(5.0) + 1.0);
}

TEST_CASE("psi point values and pole", "[psidyn]") {
  REQUIRE(psi(1.0) == 0.0);
  REQUIRE(psi(-1.0) == 0.0);
  REQUIRE_THAT(psi(golden), WithinAbs(1.0, 1e-15));
  REQUIRE_THAT(psi(2.0), WithinAbs(1.5, 0.0));
  REQUIRE_THROWS_AS(psi(0.0), pole_error);
  REQUIRE_THROWS_AS(psi_prime(0.0), pole_error);
  REQUIRE_THAT(psi_prime(2.0), WithinAbs(1.25, 0.0));
}

TEST_CASE("iterated psi", "[psidyn]") {
  REQUIRE(psi_iter(3.0, 0) == 3.0);
  double w = 3.0;
  w -= 1.0 / w;
  w -= 1.0 / w;
  REQUIRE(psi_iter(3.0, 2) == w);
  // orbit of 1 hits the pole after one step
  REQUIRE_THROWS_AS(psi_iter(1.0, 2), pole_error);
}

TEST_CASE("preimage pairs", "[psidyn]") {
  auto z = preimage_pair(0.0);
  REQUIRE(z.first == -1.0);
  REQUIRE(z.second == 1.0);
  for (double y : {-5.5, -0.37, 0.0, 0.37, 5.5}) {
    auto pr = preimage_pair(y);
    REQUIRE(pr.first < 0.0);
    REQUIRE(pr.second > 0.0);
    REQUIRE_THAT(psi(pr.first), WithinAbs(y, 1e-14));
    REQUIRE_THAT(psi(pr.second), WithinAbs(y, 1e-14));
    REQUIRE_THAT(pr.first * pr.second, WithinAbs(-1.0, 1e-15));
  }
}

TEST_CASE("level sets of zero", "[psidyn]") {
  REQUIRE(level_set(0) == std::vector<double>{0.0});
  auto y1 = level_set(1);
  REQUIRE(y1.size() == 2);
  REQUIRE(y1[0] == -1.0);
  REQUIRE(y1[1] == 1.0);

  auto y2 = level_set(2);
  REQUIRE(y2.size() == 4);
  REQUIRE_THAT(y2[0], WithinAbs(-golden, 1e-14));
  REQUIRE_THAT(y2[1], WithinAbs(-1.0 / golden, 1e-14));
  REQUIRE_THAT(y2[2], WithinAbs(1.0 / golden, 1e-14));
  REQUIRE_THAT(y2[3], WithinAbs(golden, 1e-14));

  for (std::size_t n = 1; n <= 10; ++n) {
    auto y = level_set(n);
    auto prev = level_set(n - 1);
    REQUIRE(y.size() == (std::size_t{1} << n));
    for (std::size_t i = 0; i + 1 < y.size(); ++i) REQUIRE(y[i] < y[i + 1]);
    // odd symmetry
    for (std::size_t i = 0; i < y.size(); ++i)
      REQUIRE_THAT(y[i], WithinAbs(-y[y.size() - 1 - i], 1e-12));
    // psi maps Y_n onto Y_{n-1}, two-to-one
    for (std::size_t i = 0; i < y.size(); ++i) {
      double img = psi(y[i]);
      double best = 1e300;
      for (double q : prev) best = std::min(best, std::fabs(img - q));
      REQUIRE_THAT(best, WithinAbs(0.0, 1e-11));
    }
  }
  REQUIRE_THROWS_AS(level_set(23), std::invalid_argument);
}

TEST_CASE("residue index", "[psidyn]") {
  for (std::size_t l = 0; l <= 6; ++l) {
    std::size_t m = std::size_t{1} << l;
    for (std::size_t k = 1; k <= 64; ++k) {
      std::size_t r = residue_index(k, l);
      REQUIRE(r >= 1);
      REQUIRE(r <= m);
      REQUIRE((k - r) % m == 0);
    }
    REQUIRE(residue_index(m, l) == m);
    REQUIRE(residue_index(m + 1, l) == 1);
  }
  for (std::size_t k = 1; k <= 4; ++k) REQUIRE(residue_index(k, 2) == k);
}
