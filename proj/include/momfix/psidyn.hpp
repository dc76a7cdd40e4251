#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace momfix {

// The rational map psi(z) = z - 1/z.
inline double psi(double z) {
  if (z == 0.0) throw pole_error("psi: argument is the pole at zero");
  return z - 1.0 / z;
}

// psi'(z) = 1 + 1/z^2.
inline double psi_prime(double z) {
  if (z == 0.0) throw pole_error("psi_prime: argument is the pole at zero");
  return 1.0 + 1.0 / (z * z);
}

// n-fold composition of psi; n = 0 is the identity.  An intermediate value
// within 1e-14 of zero aborts: past that the binary64 orbit is meaningless.
inline double psi_iter(double z, std::size_t n) {
  double w = z;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(w) < 1e-14)
      throw pole_error("psi_iter: pole encountered at step " + std::to_string(i));
    w -= 1.0 / w;
  }
  return w;
}

// The two preimages of y under psi, negative root first.  The larger-magnitude
// root is computed directly and the other through the root product -1, so
// neither suffers cancellation.
inline std::pair<double, double> preimage_pair(double y) {
  double s = std::sqrt(y * y + 4.0);
  if (y >= 0.0) {
    double pos = 0.5 * (y + s);
    return {-1.0 / pos, pos};
  }
  double neg = 0.5 * (y - s);
  return {neg, -1.0 / neg};
}

// Y_n: the 2^n preimages of 0 under the n-fold composition, sorted
// increasingly.  Both preimage branches are monotone in y and all negative
// preimages precede all positive ones, so the two mapped halves concatenate
// already sorted.
inline std::vector<double> level_set(std::size_t n) {
  constexpr std::size_t cap = 22;
  if (n > cap)
    throw std::invalid_argument("level_set: n exceeds cap " + std::to_string(cap));
  std::vector<double> pts{0.0};
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> next(pts.size() * 2);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      auto pr = preimage_pair(pts[i]);
      next[i] = pr.first;
      next[pts.size() + i] = pr.second;
    }
    pts = std::move(next);
  }
  return pts;
}

// r(k, l): the representative of k modulo 2^l lying in {1, ..., 2^l}.
inline std::size_t residue_index(std::size_t k, std::size_t l) {
  std::uint64_t m = std::uint64_t{1} << l;
  return static_cast<std::size_t>((k + m - 1) % m) + 1;
}

}  // namespace momfix
