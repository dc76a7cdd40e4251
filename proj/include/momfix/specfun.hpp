#pragma once

// Digamma, trigamma, a shifted Hurwitz zeta, and harmonic numbers.
// Real arguments only; accuracy target is ~1e-12 absolute for arguments
// within a few hundred units of the origin, which is the regime every
// caller in this library operates in.

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>

#include "momfix/errors.hpp"

namespace momfix {

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

namespace detail {

// asymptotic tail of psi(x): -sum B_{2k}/(2k x^{2k}), coefficients of x^{-2k}
inline constexpr double psi_asym[7] = {
    -1.0 / 12.0,        1.0 / 120.0,  -1.0 / 252.0,     1.0 / 240.0,
    -1.0 / 132.0,       691.0 / 32760.0, -1.0 / 12.0};

// asymptotic tail of psi'(x): sum B_{2k} x^{-2k-1}, coefficients of x^{-2k-1}
inline constexpr double psi1_asym[7] = {
    1.0 / 6.0,  -1.0 / 30.0, 1.0 / 42.0,      -1.0 / 30.0,
    5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0};

inline bool near_nonpositive_integer(double x, double tol) {
  if (x > 0.5) return false;
  const double r = std::nearbyint(x);
  return r <= 0.0 && std::fabs(x - r) <= tol;
}

} // namespace detail

// psi(x) = d/dx log Gamma(x).  Upward recurrence to x >= 10, then the
// Bernoulli asymptotic series through x^-14.  Poles at 0, -1, -2, ...
inline double digamma(double x) {
  if (!std::isfinite(x))
    throw std::invalid_argument("digamma: argument must be finite");
  if (detail::near_nonpositive_integer(x, 1e-13))
    throw pole_error("digamma: argument within 1e-13 of a pole at " +
                     std::to_string(std::nearbyint(x)));
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double z = 1.0 / (x * x);
  double tail = 0.0;
  for (int k = 6; k >= 0; --k) tail = (tail + detail::psi_asym[k]) * z;
  return acc + std::log(x) - 0.5 / x + tail;
}

// psi'(x).  Same scheme: recurrence psi'(x) = psi'(x+1) + 1/x^2 up to
// x >= 10, then 1/x + 1/(2x^2) + sum B_{2k} x^{-2k-1}.
inline double trigamma(double x) {
  if (!std::isfinite(x))
    throw std::invalid_argument("trigamma: argument must be finite");
  if (detail::near_nonpositive_integer(x, 1e-13))
    throw pole_error("trigamma: argument within 1e-13 of a pole at " +
                     std::to_string(std::nearbyint(x)));
  double acc = 0.0;
  while (x < 10.0) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  const double z = 1.0 / (x * x);
  double tail = 0.0;
  for (int k = 6; k >= 0; --k) tail = (tail + detail::psi1_asym[k]) * z;
  return acc + 1.0 / x + 0.5 * z + tail / x;
}

// Complex digamma, needed for meromorphic evaluation off the real axis.
// Recurrence until |w| is comfortably inside the asymptotic regime.
inline std::complex<double> digamma(std::complex<double> z) {
  if (z.imag() == 0.0) return {digamma(z.real()), 0.0};
  std::complex<double> acc = 0.0;
  while (z.real() < 12.0 && std::fabs(z.imag()) < 12.0) {
    acc -= 1.0 / z;
    z += 1.0;
  }
  const std::complex<double> w = 1.0 / (z * z);
  std::complex<double> tail = 0.0;
  for (int k = 6; k >= 0; --k) tail = (tail + detail::psi_asym[k]) * w;
  return acc + std::log(z) - 0.5 / z + tail;
}

// zeta_shift(s, a) = sum_{n>=1} (n+a)^{-s} for integer s >= 2 and a > -1.
// Note the sum starts at n = 1: zeta_shift(s, 0) = zeta(s).
// Direct summation while terms matter, Euler-Maclaurin for the rest.
inline double hurwitz_zeta_shifted(int s, double a) {
  if (s < 2)
    throw std::invalid_argument("hurwitz_zeta_shifted: order must be >= 2");
  if (!(a > -1.0))
    throw std::invalid_argument("hurwitz_zeta_shifted: shift must be > -1");
  const int N = 48;
  double sum = 0.0, comp = 0.0; // Kahan
  for (int n = 1; n < N; ++n) {
    const double term = std::pow(n + a, -s);
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    if (term < 1e-18 * (sum + 1.0)) return sum;
  }
  const double u = N + a;
  const double gu = std::pow(u, -s);
  // integral + g/2 + s/(12 u^{s+1}) - s(s+1)(s+2)/(720 u^{s+3}) + ...
  double tail = u * gu / (s - 1) + 0.5 * gu;
  const double su = static_cast<double>(s);
  tail += gu / u * su / 12.0;
  tail -= gu / (u * u * u) * su * (su + 1) * (su + 2) / 720.0;
  tail += gu / (u * u * u * u * u) * su * (su + 1) * (su + 2) * (su + 3) *
          (su + 4) / 30240.0;
  return sum + tail;
}

// H_p = 1 + 1/2 + ... + 1/p, compensated.
inline double harmonic(std::uint64_t p) {
  double sum = 0.0, comp = 0.0;
  for (std::uint64_t k = 1; k <= p; ++k) {
    const double y = 1.0 / static_cast<double>(k) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

// B(uniform)(z) = psi(z+1) + gamma; equals H_z at nonnegative integers.
inline double bernstein_uniform(double z) { return digamma(z + 1.0) + euler_gamma; }

} // namespace momfix
