#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace momfix {

// One step of the moment recursion: the positive root of x^2 + x/m - 1 = 0,
// written as 2m/(1 + sqrt(1 + 4m^2)) so no cancellation occurs for small m.
inline double phi_step(double m) {
  if (!(m > 0.0))
    throw std::invalid_argument("phi_step: argument must be positive");
  return 2.0 * m / (1.0 + std::sqrt(1.0 + 4.0 * m * m));
}

// One step of the reciprocal recursion: positive root of y^2 - x*y - 1 = 0.
inline double lambda_step(double x) {
  return 0.5 * (x + std::sqrt(x * x + 4.0));
}

// Angle form of phi_step: g_step(x) = arctan(2 tan x)/2 maps (0, pi/4] into
// itself and conjugates the moment recursion through tan.
inline double g_step(double x) { return 0.5 * std::atan(2.0 * std::tan(x)); }

// Prefix (m_0, ..., m_{n_max}) of the fixed-point moment sequence:
// m_0 = 1, m_{n+1} = phi_step(m_n).
inline std::vector<double> fixed_point_moments(std::size_t n_max) {
  std::vector<double> m(n_max + 1);
  m[0] = 1.0;
  for (std::size_t n = 0; n < n_max; ++n) m[n + 1] = phi_step(m[n]);
  return m;
}

// Prefix (lambda_0, ..., lambda_{n_max}) of the reciprocal sequence:
// lambda_0 = 0, lambda_{n+1} = lambda_step(lambda_n) = 1/m_n.
inline std::vector<double> lambda_sequence(std::size_t n_max) {
  std::vector<double> lam(n_max + 1);
  lam[0] = 0.0;
  for (std::size_t n = 0; n < n_max; ++n) lam[n + 1] = lambda_step(lam[n]);
  return lam;
}

// Seeded reciprocal sequence lambda_n(s): lambda_0(s) = s and each successor
// is the positive preimage of its predecessor under z - 1/z.
struct lambda_seed {
  double seed = 0.0;
  std::vector<double> values;  // values[l] = lambda_l(seed)
};

inline lambda_seed lambda_seeded(double s, std::size_t n) {
  lambda_seed out;
  out.seed = s;
  out.values.resize(n + 1);
  out.values[0] = s;
  for (std::size_t l = 0; l < n; ++l) out.values[l + 1] = lambda_step(out.values[l]);
  return out;
}

// h_n = g_step iterated n times from pi/4; tan(h_n) tracks m_n.
inline double g_iterate(std::size_t n) {
  double x = std::atan(1.0);  // pi/4
  for (std::size_t i = 0; i < n; ++i) x = g_step(x);
  return x;
}

// Large-n diagnostics of the two sequences at index n.
struct asymptotics {
  std::size_t n = 0;
  double lambda_n = 0.0;
  double m_n = 0.0;
  double lambda_sq_minus_2n = 0.0;  // lambda_n^2 - 2n
  double log_ratio = 0.0;           // (lambda_n^2 - 2n)/ln n
  double m_scaled = 0.0;            // m_n * sqrt(2n)
  double sq_gap = 0.0;              // lambda_{n+1}^2 - lambda_n^2
};

inline asymptotics asymptotic_report(std::size_t n) {
  if (n < 2) throw std::invalid_argument("asymptotic_report: n must be >= 2");
  double lam = 0.0;
  for (std::size_t l = 0; l < n; ++l) lam = lambda_step(lam);
  asymptotics rep;
  rep.n = n;
  rep.lambda_n = lam;
  rep.m_n = 1.0 / lambda_step(lam);
  rep.lambda_sq_minus_2n = lam * lam - 2.0 * static_cast<double>(n);
  rep.log_ratio = rep.lambda_sq_minus_2n / std::log(static_cast<double>(n));
  rep.m_scaled = rep.m_n * std::sqrt(2.0 * static_cast<double>(n));
  double next = lambda_step(lam);
  rep.sq_gap = next * next - lam * lam;
  return rep;
}

}  // namespace momfix
