#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "analytic.hpp"
#include "errors.hpp"
#include "ledger.hpp"
#include "psidyn.hpp"
#include "seqcore.hpp"
#include "specfun.hpp"
#include "transform.hpp"

namespace momfix {

namespace detail {

// Richardson extrapolation from values at N/4, N/2, N with the error order
// fitted from the three points.  Falls back to the raw deepest value when the
// fitted order is implausible (non-monotone or out of [0.5, 4]).  The
// reported error is the deepest halving difference either way.
struct rich_result {
  double value = 0.0;
  double err = 0.0;
};

inline rich_result richardson3(double v1, double v2, double v4) {
  double d12 = v2 - v1, d24 = v4 - v2;
  double err = std::max(std::fabs(d24), 1e-10);
  if (d24 == 0.0 || d12 == 0.0) return {v4, err};
  double ratio = d12 / d24;
  if (!(ratio > 0.0)) return {v4, err};
  double q = std::log2(ratio);
  if (q < 0.5 || q > 4.0) return {v4, err};
  return {v4 + d24 / (std::exp2(q) - 1.0), err};
}

// Centered finite-difference derivative with one Richardson halving:
// returns the improved derivative and the halving residual.
struct fd_deriv {
  double value = 0.0;
  double resid = 0.0;
};

template <class Fn>
fd_deriv centered_deriv(Fn&& f, double x, double h) {
  double d_h = (f(x + h) - f(x - h)) / (2.0 * h);
  double d_h2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
  return {(4.0 * d_h2 - d_h) / 3.0, std::fabs(d_h2 - d_h) / 3.0};
}

}  // namespace detail

// Zero/weight ledger by bracketed bisection of the psi-orbit extension.
// Shells are solved shallow to deep: the pole set of shell p is the integer
// -p plus every shallower zero shifted left, giving 2^{p-1} gaps, each
// bracketing exactly one zero (the extension increases from -inf to +inf
// across every gap).  Weights are reciprocal centered-difference derivatives.
inline spectrum_ledger ledger_by_bisection(std::size_t p_max,
                                           std::size_t anchor_n = 1000000) {
  if (p_max < 1 || p_max > 10)
    throw std::invalid_argument(
        "ledger_by_bisection: p_max must lie in [1, 10] (orbit precision cap)");
  const lambda_anchor anchor = lambda_anchor::at(anchor_n);
  constexpr double no_cap = std::numeric_limits<double>::infinity();
  auto ev = [&](double x) { return f_extended_at(x, anchor, no_cap).value; };

  spectrum_ledger led;
  led.p_max = p_max;

  // rho0 = 1/f'(0); the zero at 0 is exact, so only the derivative is needed.
  {
    double h = 1e-3;
    detail::fd_deriv d = detail::centered_deriv(
        [&](double x) { return f_real_at(x, anchor).value; }, 0.0, h);
    f_unit_interval_t mid = f_unit_interval(0.5, anchor);
    double sw_mid =
        std::fabs(mid.upper - mid.lower) + detail::orbit_noise_floor(anchor_n);
    double err_d = d.resid + 2.0 * sw_mid / h;
    led.rho0 = 1.0 / d.value;
    led.rho0_err = err_d / (d.value * d.value);
  }

  std::vector<std::vector<double>> zeros(p_max);
  led.shells.resize(p_max);
  for (std::size_t p = 1; p <= p_max; ++p) {
    std::vector<double> poles;
    poles.push_back(-static_cast<double>(p));
    for (std::size_t l = 1; l < p; ++l)
      for (double z : zeros[p - l - 1]) poles.push_back(z - static_cast<double>(l));
    std::sort(poles.begin(), poles.end());
    std::size_t want = std::size_t{1} << (p - 1);
    if (poles.size() != want)
      throw count_error("ledger_by_bisection: shell " + std::to_string(p) +
                        " has " + std::to_string(poles.size()) +
                        " poles, expected " + std::to_string(want));

    std::vector<ledger_entry> shell(poles.size());
    std::vector<double> lows(poles.size());
    double lo = -static_cast<double>(p) - 1.0;
    for (std::size_t g = 0; g < poles.size(); ++g) {
      lows[g] = lo;
      lo = poles[g];
    }

    detail::parallel_for(poles.size(), [&](std::size_t g) {
      double gap_lo = lows[g], gap_hi = poles[g];
      double gap = gap_hi - gap_lo;
      double inset = std::min(1e-6, 0.125 * gap);
      double a = gap_lo + inset, b = gap_hi - inset;
      if (!(ev(a) < 0.0) || !(ev(b) > 0.0))
        throw bracket_error("ledger_by_bisection: no sign change in gap (" +
                            std::to_string(gap_lo) + ", " + std::to_string(gap_hi) +
                            ") of shell " + std::to_string(p));
      while (b - a > 1e-9) {
        double mid = 0.5 * (a + b);
        if (ev(mid) < 0.0)
          a = mid;
        else
          b = mid;
      }
      double xi = 0.5 * (a + b);

      // Base accuracy at the anchor point in (0,1): the proof's two-sided
      // bracket plus the rounding envelope.  Division by the base slope gives
      // the zero's displacement (the orbit amplification cancels between the
      // value error and the derivative).
      double s_star = xi + std::ceil(-xi);
      double hb = std::min(1e-5, 0.45 * std::min(s_star, 1.0 - s_star));
      double d_base = (f_unit(s_star + hb, anchor).value -
                       f_unit(s_star - hb, anchor).value) /
                      (2.0 * hb);
      f_unit_interval_t iv = f_unit_interval(s_star, anchor);
      double delta_base =
          std::fabs(iv.upper - iv.lower) + detail::orbit_noise_floor(anchor_n);
      double err_xi = 0.5 * (b - a) + delta_base / std::fabs(d_base);

      double h = std::min({1e-3, 0.125 * gap,
                           0.25 * std::min(xi - gap_lo, gap_hi - xi)});
      double f_c = ev(xi);
      double f_p = ev(xi + h), f_m = ev(xi - h);
      double f_p2 = ev(xi + 0.5 * h), f_m2 = ev(xi - 0.5 * h);
      double d_h = (f_p - f_m) / (2.0 * h);
      double d_h2 = (f_p2 - f_m2) / h;
      double d = (4.0 * d_h2 - d_h) / 3.0;
      if (!(d > 0.0))
        throw std::runtime_error(
            "ledger_by_bisection: nonpositive derivative at zero " +
            std::to_string(xi));
      double resid = std::fabs(d_h2 - d_h) / 3.0;
      double fxx = std::fabs(f_p + f_m - 2.0 * f_c) / (h * h);
      double noise_at = delta_base * std::fabs(d / d_base);
      double err_d = resid + noise_at / h;
      double err_rho = err_d / (d * d) + fxx * err_xi / (d * d);

      shell[g] = ledger_entry{g + 1, xi, 1.0 / d, std::max(err_xi, err_rho),
                              ledger_method::bisect_f};
    });

    zeros[p - 1].reserve(shell.size());
    for (const auto& e : shell) zeros[p - 1].push_back(e.xi);
    led.shells[p - 1] = std::move(shell);
  }

  led.tail_deficit = 1.0 - spectral_mass(to_measure(led));
  return led;
}

// Zero/weight ledger from the closed limit formulas: for each shell label
// (p,k) with seed alpha = alpha_{p,k},
//   xi  = lim_N sqrt(2N) (sum_{l<=p} 1/alpha_{l,r(k,l)}
//                         + sum_{l<=N-p} 1/lambda_l(alpha) - lambda_N)
//   rho = lim_N prod_{l<=p} (1+1/alpha^2)^{-1}
//               * sqrt(2N) prod_{l<=N-p} (1+1/lambda_l(alpha)^2)^{-1}
// evaluated at N/4, N/2, N and Richardson-extrapolated; products are carried
// in log space.  rho0 uses the same product seeded at 0 with cutoff N.
inline spectrum_ledger ledger_by_limit(std::size_t p_max, std::size_t big_n) {
  if (p_max < 1) throw std::invalid_argument("ledger_by_limit: p_max must be >= 1");
  if (big_n < 1000)
    throw std::invalid_argument("ledger_by_limit: N must be >= 1000");
  if (big_n / 4 <= p_max + 1)
    throw std::invalid_argument("ledger_by_limit: N/4 must exceed p_max + 1");

  const std::size_t cp[3] = {big_n / 4, big_n / 2, big_n};

  std::vector<std::vector<double>> levels(p_max + 1);
  for (std::size_t l = 1; l <= p_max; ++l) levels[l] = level_set(l);

  // Shared pass: lambda_N at the three checkpoints and the rho0 log-product.
  double lam_at[3];
  double lp0_at[3];
  {
    double lam = 0.0, lp0 = 0.0, comp = 0.0;
    std::size_t idx = 0;
    for (std::size_t l = 1; l <= big_n && idx < 3; ++l) {
      lam = lambda_step(lam);
      double y = std::log1p(1.0 / (lam * lam)) - comp;
      double t = lp0 + y;
      comp = (t - lp0) - y;
      lp0 = t;
      while (idx < 3 && l == cp[idx]) {
        lam_at[idx] = lam;
        lp0_at[idx] = lp0;
        ++idx;
      }
    }
  }

  spectrum_ledger led;
  led.p_max = p_max;
  {
    double v[3];
    for (int j = 0; j < 3; ++j)
      v[j] = std::exp(0.5 * std::log(2.0 * static_cast<double>(cp[j])) - lp0_at[j]);
    detail::rich_result r = detail::richardson3(v[0], v[1], v[2]);
    led.rho0 = r.value;
    led.rho0_err = r.err;
  }

  struct job_t {
    std::size_t p, k;
  };
  std::vector<job_t> jobs;
  led.shells.resize(p_max);
  for (std::size_t p = 1; p <= p_max; ++p) {
    led.shells[p - 1].resize(std::size_t{1} << (p - 1));
    for (std::size_t k = 1; k <= (std::size_t{1} << (p - 1)); ++k)
      jobs.push_back(job_t{p, k});
  }

  detail::parallel_for(jobs.size(), [&](std::size_t j) {
    std::size_t p = jobs[j].p, k = jobs[j].k;
    double alpha = levels[p][k - 1];
    double s1 = 0.0, lporb = 0.0;
    for (std::size_t l = 1; l <= p; ++l) {
      double a = levels[l][residue_index(k, l) - 1];
      s1 += 1.0 / a;
      lporb += std::log1p(1.0 / (a * a));
    }
    double xi_v[3], rho_v[3];
    double lam_s = alpha, s2 = 0.0, c2 = 0.0, lp = 0.0, clp = 0.0;
    std::size_t idx = 0;
    for (std::size_t l = 1; l <= big_n - p && idx < 3; ++l) {
      lam_s = lambda_step(lam_s);
      double y = 1.0 / lam_s - c2;
      double t = s2 + y;
      c2 = (t - s2) - y;
      s2 = t;
      double y2 = std::log1p(1.0 / (lam_s * lam_s)) - clp;
      double t2 = lp + y2;
      clp = (t2 - lp) - y2;
      lp = t2;
      while (idx < 3 && l == cp[idx] - p) {
        double root = std::sqrt(2.0 * static_cast<double>(cp[idx]));
        xi_v[idx] = root * (s1 + s2 - lam_at[idx]);
        rho_v[idx] = std::exp(std::log(root) - lporb - lp);
        ++idx;
      }
    }
    detail::rich_result rx = detail::richardson3(xi_v[0], xi_v[1], xi_v[2]);
    detail::rich_result rr = detail::richardson3(rho_v[0], rho_v[1], rho_v[2]);
    led.shells[p - 1][k - 1] = ledger_entry{k, rx.value, rr.value,
                                            std::max(rx.err, rr.err),
                                            ledger_method::limit_formula};
  });

  led.tail_deficit = 1.0 - spectral_mass(to_measure(led));
  return led;
}

// Residual-bias factors of the tail-modelled iteration, calibrated against
// deep limit-formula references (N = 4e6, all 15 entries with p <= 4, plus
// rho0): the ratio of the observed post-model residual to the raw model
// correction, with margin.  Positions see ratios up to 0.011, weights up to
// 0.22 (their correction shrinks quadratically with the weight while the
// residual shrinks linearly), and rho0 about 5e-5 (mass-calibration makes the
// model nearly exact at the origin).
inline constexpr double iteration_eta_xi = 0.05;
inline constexpr double iteration_eta_rho = 0.75;
inline constexpr double iteration_eta_rho0 = 1e-3;

// Zero/weight ledger by iterating the measure-level transformation from the
// uniform measure with the modelled tail.  err_est combines the per-atom
// movement across the last two iterations (Cauchy residual) with the
// calibrated residual of the tail model.
inline spectrum_ledger ledger_by_iteration(std::size_t p_max, std::size_t steps) {
  if (p_max < 1)
    throw std::invalid_argument("ledger_by_iteration: p_max must be >= 1");
  if (steps < 4 || steps % 2 != 0)
    throw std::invalid_argument(
        "ledger_by_iteration: steps must be even and >= 4 (even iterates "
        "increase monotonically)");
  spectral_measure prev2, prev1, cur = uniform_measure();
  for (std::size_t s = 0; s < steps; ++s) {
    prev2 = std::move(prev1);
    prev1 = std::move(cur);
    cur = that_step(prev1, p_max, tail_policy::model);
  }
  double e0 = static_cast<double>(p_max) + 1.0;
  double c = detail::tail_coeff_for(prev1.tail_deficit, e0);

  auto movement = [](const spectral_measure& now, const spectral_measure& then,
                     std::size_t p, std::size_t slot, bool want_rho) {
    if (p > then.p_max() || then.shells[p - 1].size() != now.shells[p - 1].size())
      return 1.0;
    const spectral_atom& a = now.shells[p - 1][slot];
    const spectral_atom& b = then.shells[p - 1][slot];
    return want_rho ? std::fabs(a.rho - b.rho) : std::fabs(a.xi - b.xi);
  };

  spectrum_ledger led;
  led.p_max = p_max;
  led.rho0 = cur.rho0;
  led.rho0_err = std::max(std::fabs(cur.rho0 - prev1.rho0),
                          std::fabs(prev1.rho0 - prev2.rho0)) +
                 iteration_eta_rho0 * cur.rho0 * cur.rho0 *
                     std::fabs(c * detail::tail_fp(0.0, e0));
  led.tail_deficit = cur.tail_deficit;
  led.shells.resize(p_max);
  for (std::size_t p = 1; p <= p_max; ++p) {
    const auto& shell = cur.shells[p - 1];
    led.shells[p - 1].resize(shell.size());
    for (std::size_t g = 0; g < shell.size(); ++g) {
      double xi = shell[g].xi, rho = shell[g].rho;
      double move_xi = std::max(movement(cur, prev1, p, g, false),
                                movement(prev1, prev2, p, g, false));
      double move_rho = std::max(movement(cur, prev1, p, g, true),
                                 movement(prev1, prev2, p, g, true));
      double model_xi =
          iteration_eta_xi * std::fabs(c * detail::tail_f(xi, e0)) * rho;
      double model_rho = iteration_eta_rho * rho * rho *
                         std::fabs(c * detail::tail_fp(xi, e0));
      led.shells[p - 1][g] =
          ledger_entry{g + 1, xi, rho,
                       std::max(move_xi + model_xi, move_rho + model_rho),
                       ledger_method::that_iteration};
    }
  }
  return led;
}

// Canonical ledger: bisection entries for the shallow shells (highest
// absolute accuracy there) merged with iteration entries beyond, where the
// orbit extension loses precision but the measure iteration does not.
inline spectrum_ledger merged_ledger(std::size_t p_max, std::size_t bisect_depth = 4,
                                     std::size_t steps = 0) {
  if (p_max < 1) throw std::invalid_argument("merged_ledger: p_max must be >= 1");
  std::size_t bd = std::min(bisect_depth, p_max);
  spectrum_ledger bis = ledger_by_bisection(bd);
  if (p_max <= bd) return bis;
  if (steps == 0) steps = (p_max + 2) + (p_max % 2);  // even, >= p_max + 2
  spectrum_ledger it = ledger_by_iteration(p_max, steps);
  spectrum_ledger led;
  led.p_max = p_max;
  led.rho0 = bis.rho0;
  led.rho0_err = bis.rho0_err;
  led.shells.resize(p_max);
  for (std::size_t p = 1; p <= bd; ++p) led.shells[p - 1] = bis.shells[p - 1];
  for (std::size_t p = bd + 1; p <= p_max; ++p) led.shells[p - 1] = it.shells[p - 1];
  led.tail_deficit = 1.0 - spectral_mass(to_measure(led));
  return led;
}

// Density of the fixed-point measure at t, D(t) = rho0 + sum rho t^{-xi},
// truncated at the ledger's depth.  tail_bound is sum_{p>p_max}(p+2)2^{p-1}t^p
// in closed form — finite only for t < 1/2, +inf otherwise (the per-shell
// bound outgrows t^p there).  accurate flags tail_bound <= 1e-6.
struct density_result {
  double value = 0.0;
  double tail_bound = 0.0;
  bool accurate = false;
};

inline density_result density(const spectrum_ledger& led, double t) {
  if (!(t > 0.0) || !(t < 1.0))
    throw std::invalid_argument("density: t must lie in (0, 1)");
  density_result out;
  out.value = led.rho0;
  for (const auto& shell : led.shells)
    for (const auto& e : shell) out.value += e.rho * std::pow(t, -e.xi);
  double x = 2.0 * t;
  if (x >= 1.0) {
    out.tail_bound = std::numeric_limits<double>::infinity();
  } else {
    double m = static_cast<double>(led.p_max) + 1.0;
    double xm = std::pow(x, m);
    double s1 = xm / (1.0 - x);
    double s2 = xm * (m - (m - 1.0) * x) / ((1.0 - x) * (1.0 - x));
    out.tail_bound = 0.5 * (s2 + 2.0 * s1);
  }
  out.accurate = out.tail_bound <= 1e-6;
  return out;
}

// Moment reconstruction from the ledger's partial fractions:
// m_n ~ rho0/(n+1) + sum rho/(n+1-xi), short of the truncated tail.
inline double reconstruct_moment(const spectrum_ledger& led, std::size_t n) {
  double z = static_cast<double>(n);
  double acc = led.rho0 / (z + 1.0);
  for (const auto& shell : led.shells)
    for (const auto& e : shell) acc += e.rho / (z + 1.0 - e.xi);
  return acc;
}

}  // namespace momfix
