#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"
#include "ledger.hpp"
#include "psidyn.hpp"
#include "seqcore.hpp"
#include "specfun.hpp"
#include "transform.hpp"

namespace momfix {

enum class eval_method {
  iterate_formula,
  forward_recursion,
  psi_extension,
  spectral_partial_fraction,
};

struct eval_result {
  double value = 0.0;
  double abs_err_est = 0.0;
  eval_method method = eval_method::iterate_formula;
};

// The three lambda values around a fixed depth n — the shared state for
// repeated iterate-formula evaluations (building them costs n steps).  The
// orbit is carried in extended precision: at depth 10^6 a binary64 descent
// already drowns in ~3e-7 of accumulated rounding, while 80-bit stays at the
// 1e-11 scale (the reported estimates include the measured envelope).
struct lambda_anchor {
  std::size_t n = 0;
  long double lam_nm1 = 0.0L, lam_n = 0.0L, lam_np1 = 0.0L;

  static lambda_anchor at(std::size_t n) {
    if (n < 2) throw std::invalid_argument("lambda_anchor: n must be >= 2");
    long double lam = 0.0L;
    for (std::size_t l = 1; l < n; ++l) lam = 0.5L * (lam + sqrtl(lam * lam + 4.0L));
    lambda_anchor a;
    a.n = n;
    a.lam_nm1 = lam;
    a.lam_n = 0.5L * (lam + sqrtl(lam * lam + 4.0L));
    a.lam_np1 = 0.5L * (a.lam_n + sqrtl(a.lam_n * a.lam_n + 4.0L));
    return a;
  }
};

namespace detail {

// Descend the psi orbit n steps from w (extended precision).
inline long double psi_descend(long double w, std::size_t n, const char* who) {
  for (std::size_t i = 0; i < n; ++i) {
    if (fabsl(w) < 1e-14L)
      throw pole_error(std::string(who) + ": orbit vanished at step " +
                       std::to_string(i) + " (depth too large for binary64)");
    w -= 1.0L / w;
  }
  return w;
}

// Empirical rounding envelope of the extended-precision descent (measured
// against 60-digit references: ~1e-11 at n=10^6, a few 1e-8 up to 6.4e7).
inline double orbit_noise_floor(std::size_t n) {
  return 1e-14 * static_cast<double>(n);
}

// Proven error bound of the iterate formula plus the rounding envelope.
inline double f_unit_err(double s, const lambda_anchor& a) {
  double nn = static_cast<double>(a.n);
  double lam_n = static_cast<double>(a.lam_n);
  double lam_nm1 = static_cast<double>(a.lam_nm1);
  double bound = s * (nn + 1.0) * (lam_n * lam_n - lam_nm1 * lam_nm1) /
                 (lam_n * lam_nm1 * lam_nm1);
  return bound + orbit_noise_floor(a.n);
}

}  // namespace detail

// Iterate-formula evaluation of the Bernstein transform on (0,1]: descend the
// orbit from lam_n (lam_{n+1}/lam_n)^s.  At s = 1 the descent telescopes to 1
// exactly, so that value is returned directly.
inline eval_result f_unit(double s, const lambda_anchor& a) {
  if (!(s > 0.0) || !(s <= 1.0))
    throw std::invalid_argument("f_unit: s must lie in (0, 1]");
  if (s == 1.0) return {1.0, 0.0, eval_method::iterate_formula};
  long double w = a.lam_n * expl(static_cast<long double>(s) * logl(a.lam_np1 / a.lam_n));
  w = detail::psi_descend(w, a.n, "f_unit");
  return {static_cast<double>(w), detail::f_unit_err(s, a),
          eval_method::iterate_formula};
}

inline eval_result f_unit(double s, std::size_t n) {
  return f_unit(s, lambda_anchor::at(n));
}

// The two-sided bracket from the same descent: lower start uses the forward
// ratio, upper start the backward one.
struct f_unit_interval_t {
  double lower = 0.0, upper = 0.0;
};

inline f_unit_interval_t f_unit_interval(double s, const lambda_anchor& a) {
  if (!(s > 0.0) || !(s <= 1.0))
    throw std::invalid_argument("f_unit_interval: s must lie in (0, 1]");
  long double ls = s;
  long double blo = a.lam_n * expl(ls * logl(a.lam_np1 / a.lam_n));
  long double bhi = a.lam_n * expl(ls * logl(a.lam_n / a.lam_nm1));
  return {static_cast<double>(detail::psi_descend(blo, a.n, "f_unit_interval")),
          static_cast<double>(detail::psi_descend(bhi, a.n, "f_unit_interval"))};
}

namespace detail {

// Depth chosen so the proven bound s/sqrt(2n) meets tol, clamped to
// [1e3, 1e8]; the cap is the honest binary64 limit of the descent.
inline std::size_t f_unit_depth(double s, double tol) {
  double want = s * s / (2.0 * tol * tol);
  if (want < 1e3) return 1000;
  if (want > 1e8) return 100000000;
  return static_cast<std::size_t>(want) + 1;
}

}  // namespace detail

// Evaluation of the fixed point's Bernstein transform on (-1, inf), anchored
// at the fractional part in (0,1]: iterate formula there, then the positive
// preimage recursion forward, or one psi application backward into (-1, 0].
inline eval_result f_real_at(double x, const lambda_anchor& a) {
  if (!(x > -1.0))
    throw std::invalid_argument("f_real: x must exceed -1 (use f_extended)");
  if (x <= 0.0) {
    eval_result base = f_real_at(x + 1.0, a);
    double w = base.value;
    if (std::fabs(w) < 1e-14)
      throw pole_error("f_real: value at x+1 vanishes");
    double err = base.abs_err_est * psi_prime(w);
    return {psi(w), err, eval_method::psi_extension};
  }
  if (x <= 1.0) return f_unit(x, a);
  double ip = std::floor(x);
  double s = x - ip;
  std::size_t steps = static_cast<std::size_t>(ip);
  if (s == 0.0) {
    s = 1.0;
    steps -= 1;
  }
  eval_result base = f_unit(s, a);
  double w = base.value;
  double err = base.abs_err_est;
  for (std::size_t i = 0; i < steps; ++i) {
    double root = std::sqrt(w * w + 4.0);
    err *= 0.5 * (1.0 + std::fabs(w) / root);  // contraction of lambda_step
    w = 0.5 * (w + root);
  }
  return {w, err, eval_method::forward_recursion};
}

inline eval_result f_real(double x, double tol = 1e-3) {
  double s = x - std::floor(x);
  if (s == 0.0) s = 1.0;
  if (x <= 0.0) s = x + 1.0;  // anchor of the one-step pullback
  return f_real_at(x, lambda_anchor::at(detail::f_unit_depth(s, tol)));
}

// Meromorphic extension to x <= -1: pull f_real(x + L) back through L psi
// applications, multiplying the error estimate by |psi'| along the orbit.
// err_cap aborts once the propagated estimate makes the value untrustworthy;
// root-finding callers that exploit the error cancellation between f and f'
// may raise it and account for accuracy themselves.
inline eval_result f_extended_at(double x, const lambda_anchor& a,
                                 double err_cap = 1e-3) {
  if (x > -1.0) return f_real_at(x, a);
  double lsteps = std::ceil(-x);
  eval_result base = f_real_at(x + lsteps, a);
  double w = base.value;
  double err = base.abs_err_est;
  std::size_t nsteps = static_cast<std::size_t>(lsteps);
  for (std::size_t i = 0; i < nsteps; ++i) {
    if (std::fabs(w) < 1e-14)
      throw pole_error("f_extended: pole at intermediate step " + std::to_string(i) +
                       " (x + " + std::to_string(lsteps - static_cast<double>(i)) +
                       ")");
    err *= 1.0 + 1.0 / (w * w);
    w -= 1.0 / w;
  }
  if (err > err_cap)
    throw precision_error("f_extended: propagated error estimate " +
                          std::to_string(err) + " exceeds cap " +
                          std::to_string(err_cap));
  return {w, err, eval_method::psi_extension};
}

namespace detail {

// Depth-selection estimate of the base accuracy at depth n: the asymptotic
// form s/sqrt(2n) of the proof bound plus the rounding envelope.
inline double base_est(double s, std::size_t n) {
  return s / std::sqrt(2.0 * static_cast<double>(n)) + orbit_noise_floor(n);
}

}  // namespace detail

// Adaptive-depth extension: a first pass at the tolerance-chosen depth
// measures the orbit's error amplification; if the propagated estimate misses
// err_cap, the depth is re-chosen so amplification * base accuracy fits.
// The proof bound shrinks like 1/sqrt(n) while the rounding envelope grows
// linearly, so infeasibility (precision_error) is a genuine binary64 limit,
// not an arbitrary cutoff.
inline eval_result f_extended(double x, double err_cap = 1e-3, double tol = 1e-3) {
  if (x > -1.0) return f_real(x, tol);
  double s = x + std::ceil(-x);
  if (s <= 0.0) s = 1.0;
  constexpr double no_cap = std::numeric_limits<double>::infinity();
  std::size_t n1 = detail::f_unit_depth(s, tol);
  eval_result r1 = f_extended_at(x, lambda_anchor::at(n1), no_cap);
  if (r1.abs_err_est <= err_cap) return r1;
  double amp = r1.abs_err_est / detail::base_est(s, n1);
  double target = 0.9 * err_cap / amp;
  std::size_t n2 = 0;
  for (std::size_t n = 1000;; n = std::min<std::size_t>(2 * n, 100000000)) {
    if (detail::base_est(s, n) <= target) {
      n2 = n;
      break;
    }
    if (n >= 100000000) break;
  }
  if (n2 == 0)
    throw precision_error(
        "f_extended: propagated error estimate " + std::to_string(r1.abs_err_est) +
        " exceeds cap " + std::to_string(err_cap) + " at every feasible depth");
  eval_result r2 = f_extended_at(x, lambda_anchor::at(n2), no_cap);
  if (r2.abs_err_est > err_cap)
    throw precision_error("f_extended: propagated error estimate " +
                          std::to_string(r2.abs_err_est) + " exceeds cap " +
                          std::to_string(err_cap));
  return r2;
}

// Mellin transform via the duality f(x+1) F(x) = 1.
inline eval_result F_real(double x, double tol = 1e-3) {
  eval_result base = x + 1.0 > -1.0 ? f_real(x + 1.0, tol) : f_extended(x + 1.0, 1e-3, tol);
  if (base.value == 0.0)
    throw pole_error("F_real: f(x+1) vanishes, x is a pole of F");
  double v = 1.0 / base.value;
  return {v, base.abs_err_est * v * v, base.method};
}

inline eval_result F_real_at(double x, const lambda_anchor& a) {
  eval_result base = x + 1.0 > -1.0 ? f_real_at(x + 1.0, a) : f_extended_at(x + 1.0, a);
  if (base.value == 0.0)
    throw pole_error("F_real: f(x+1) vanishes, x is a pole of F");
  double v = 1.0 / base.value;
  return {v, base.abs_err_est * v * v, base.method};
}

// --- ledger-driven evaluation ------------------------------------------------

struct complex_result {
  std::complex<double> value;
  double abs_err_est = 0.0;
};

// Partial-fraction (digamma closed form) evaluation of the Bernstein
// transform from a ledger.  Real arguments may lie anywhere off the truncated
// representation's poles; complex arguments are restricted to Re z > -1,
// where the dropped tail admits the first-order bound deficit*|z|*(1+|z|/e0).
inline complex_result f_spectral(std::complex<double> z, const spectrum_ledger& led) {
  if (z.imag() != 0.0 && z.real() <= -1.0)
    throw std::invalid_argument("f_spectral: complex evaluation needs Re z > -1");
  std::complex<double> acc =
      led.rho0 * (digamma(z + std::complex<double>(1.0, 0.0)) + euler_gamma);
  for (const auto& shell : led.shells)
    for (const auto& e : shell)
      acc += e.rho * (digamma(z + std::complex<double>(1.0 - e.xi, 0.0)) -
                      digamma(std::complex<double>(1.0 - e.xi, 0.0)));
  double e0 = static_cast<double>(led.p_max) + 1.0;
  double az = std::abs(z);
  double tail = led.tail_deficit * az * (1.0 + az / e0);
  return {acc, tail};
}

inline eval_result f_spectral_real(double x, const spectrum_ledger& led) {
  spectral_measure mu = to_measure(led);
  double v = bernstein_spectral(mu, x);
  double e0 = static_cast<double>(led.p_max) + 1.0;
  double ax = std::fabs(x);
  double tail = led.tail_deficit * ax * (1.0 + ax / e0);
  return {v, tail, eval_method::spectral_partial_fraction};
}

// Power-series coefficients about 0: F(z) = 1 + sum a_n z^n and
// f(z) = sum b_n z^n, truncated at the ledger's depth.  The recorded
// estimates bound every dropped-shell coefficient miss: for a_n the miss
// peaks at deficit/(p_max+2) (n = 1) and decays geometrically; for b_n the
// dropped weights sum to ~deficit*(1-xi), so the n = 1 miss is near the
// deficit itself.
struct power_series {
  std::vector<double> a, b;  // index n, a[0] = 1, b[0] = 0
  double tail_a = 0.0, tail_b = 0.0;
};

inline power_series power_coeffs(std::size_t n_max, const spectrum_ledger& led) {
  if (n_max < 1) throw std::invalid_argument("power_coeffs: n_max must be >= 1");
  power_series out;
  out.a.assign(n_max + 1, 0.0);
  out.b.assign(n_max + 1, 0.0);
  out.a[0] = 1.0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    double sa = led.rho0;
    double sb = led.rho0 * hurwitz_zeta_shifted(static_cast<int>(n) + 1, 0.0);
    for (const auto& shell : led.shells)
      for (const auto& e : shell) {
        sa += e.rho * std::pow(1.0 - e.xi, -(static_cast<double>(n) + 1.0));
        sb += e.rho * hurwitz_zeta_shifted(static_cast<int>(n) + 1, -e.xi);
      }
    double sign = (n % 2 == 0) ? 1.0 : -1.0;
    out.a[n] = sign * sa;
    out.b[n] = -sign * sb;
  }
  double base = static_cast<double>(led.p_max) + 2.0;
  out.tail_a = led.tail_deficit / base;
  out.tail_b = led.tail_deficit * (1.0 + 2.0 / (base - 1.0));
  return out;
}

}  // namespace momfix
