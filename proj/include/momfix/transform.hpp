#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "specfun.hpp"

namespace momfix {

// ---------------------------------------------------------------------------
// moment-sequence level
// ---------------------------------------------------------------------------

// b_n = 1/(a_0 + ... + a_n), compensated partial sums.
inline std::vector<double> t_map(const std::vector<double>& a) {
  if (a.empty() || a[0] != 1.0)
    throw std::invalid_argument("t_map: sequence must be normalized (a_0 = 1)");
  std::vector<double> b(a.size());
  double sum = 0.0, comp = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    double y = a[n] - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    b[n] = 1.0 / sum;
  }
  return b;
}

// c_0 = 1, c_n = 1/b_n - 1/b_{n-1}; the algebraic inverse of t_map.
inline std::vector<double> t_inverse(const std::vector<double>& b) {
  if (b.empty()) throw std::invalid_argument("t_inverse: empty sequence");
  std::vector<double> c(b.size());
  c[0] = 1.0;
  for (std::size_t n = 1; n < b.size(); ++n) {
    if (!(b[n] > 0.0) || !(b[n - 1] > 0.0))
      throw std::invalid_argument("t_inverse: sequence must be strictly positive");
    c[n] = 1.0 / b[n] - 1.0 / b[n - 1];
  }
  return c;
}

// Trajectory [T(a), T^2(a), ..., T^steps(a)].
inline std::vector<std::vector<double>> iterate_t(const std::vector<double>& a,
                                                  std::size_t steps) {
  if (steps < 1) throw std::invalid_argument("iterate_t: steps must be >= 1");
  std::vector<std::vector<double>> out;
  out.reserve(steps);
  std::vector<double> cur = a;
  for (std::size_t i = 0; i < steps; ++i) {
    cur = t_map(cur);
    out.push_back(cur);
  }
  return out;
}

// ---------------------------------------------------------------------------
// spectral measures
// ---------------------------------------------------------------------------

struct spectral_atom {
  double xi = 0.0;
  double rho = 0.0;
};

// Measure on (0,1) with density rho0 + sum rho_{p,k} t^{-xi_{p,k}}.
// shells[p-1] holds shell p (xi in (-p-1,-p), increasing).  tail_deficit is
// the mass lost to shells beyond the truncation, recorded by that_step.
struct spectral_measure {
  double rho0 = 1.0;
  std::vector<std::vector<spectral_atom>> shells;
  double tail_deficit = 0.0;

  std::size_t p_max() const { return shells.size(); }
  std::size_t atom_count() const {
    std::size_t c = 0;
    for (const auto& s : shells) c += s.size();
    return c;
  }
};

inline spectral_measure uniform_measure() { return spectral_measure{}; }

// rho0 + sum rho/(1 - xi): the measure's total mass (value of its Mellin
// transform at 0); equals 1 minus the truncated tail.
inline double spectral_mass(const spectral_measure& mu) {
  double m = mu.rho0;
  for (const auto& shell : mu.shells)
    for (const auto& a : shell) m += a.rho / (1.0 - a.xi);
  return m;
}

namespace detail {

// Worker count: MOMFIX_THREADS if set, else hardware concurrency.
inline unsigned worker_count() {
  static unsigned n = [] {
    if (const char* env = std::getenv("MOMFIX_THREADS")) {
      long v = std::strtol(env, nullptr, 10);
      if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1u;
  }();
  return n;
}

// Index-chunked parallel loop; serial when one worker suffices.  The first
// exception thrown by any chunk is rethrown after all threads join.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  unsigned workers = worker_count();
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  unsigned t = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  std::vector<std::thread> pool;
  pool.reserve(t);
  std::exception_ptr first_error;
  std::mutex err_mx;
  for (unsigned w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += t) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mx);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// --- closed forms for the tail model ---------------------------------------
// Shells beyond the truncation are modelled by the weight density
// c * e^{-1/2} de on (e0, inf): the density exponent that reproduces the
// 1/sqrt(2 pi (1-t)) blow-up of the limiting density at t = 1.  The three
// integrals below are the pieces of integral e^{-1/2} (Psi(z+1+e) - Psi(1+e)) de
// after expanding Psi(x) ~ ln x - 1/(2x) - 1/(12 x^2).

// integral_{e0}^inf e^{-1/2}/(t+e) de, valid for t + e0 > 0, |t| < e0.
inline double tail_inv(double t, double e0) {
  if (t > 0.0) return 2.0 / std::sqrt(t) * std::atan(std::sqrt(t / e0));
  if (t < 0.0) {
    double s = -t;
    return 2.0 / std::sqrt(s) * std::atanh(std::sqrt(s / e0));
  }
  return 2.0 / std::sqrt(e0);
}

// integral_{e0}^inf e^{-1/2}/(t+e)^2 de = -d/dt tail_inv.
inline double tail_inv2(double t, double e0) {
  double se = std::sqrt(e0);
  if (t > 0.0) {
    double st = std::sqrt(t);
    return (std::atan(st / se) / st - se / (t + e0)) / t;
  }
  if (t < 0.0) {
    double s = -t, ss = std::sqrt(s);
    return -std::atanh(ss / se) / (s * ss) + se / (s * (e0 - s));
  }
  return 2.0 / (3.0 * e0 * se);
}

// Antiderivative in t of tail_inv(t, e0), zero at t = 0; differences give
// integral e^{-1/2} ln((b+e)/(a+e)) de.
inline double tail_logint(double t, double e0) {
  double se = std::sqrt(e0);
  if (t > 0.0) {
    double st = std::sqrt(t);
    return 4.0 * st * std::atan(st / se) - 2.0 * se * std::log1p(t / e0);
  }
  if (t < 0.0) {
    double s = -t, ss = std::sqrt(s);
    return -4.0 * ss * std::atanh(ss / se) - 2.0 * se * std::log1p(t / e0);
  }
  return 0.0;
}

// integral_{e0}^inf e^{-1/2} (Psi(z+1+e) - Psi(1+e)) de for the model weight.
inline double tail_f(double z, double e0) {
  double b = z + 1.0;
  return (tail_logint(b, e0) - tail_logint(1.0, e0)) -
         0.5 * (tail_inv(b, e0) - tail_inv(1.0, e0)) -
         (1.0 / 12.0) * (tail_inv2(b, e0) - tail_inv2(1.0, e0));
}

// d/dz of tail_f: integral e^{-1/2} Psi'(z+1+e) de to the same order.
inline double tail_fp(double z, double e0) {
  double b = z + 1.0;
  return tail_inv(b, e0) + 0.5 * tail_inv2(b, e0);
}

// Model coefficient calibrated so the modelled mass equals the deficit.
inline double tail_coeff_for(double deficit, double e0) {
  if (!(deficit > 0.0)) return 0.0;
  return deficit / tail_inv(1.0, e0);
}

// --- cached evaluator --------------------------------------------------------
// Flattened atom arrays with the constant digamma offsets precomputed; f and
// fp are the Bernstein transform of the measure and its derivative, with the
// optional e^{-1/2} tail model added when c > 0.
struct spectral_eval {
  double rho0 = 1.0;
  std::vector<double> xi, rho, base;  // base[i] = digamma(1 - xi[i])
  double c = 0.0, e0 = 0.0;

  explicit spectral_eval(const spectral_measure& mu, double tail_c = 0.0,
                         double tail_e0 = 0.0)
      : rho0(mu.rho0), c(tail_c), e0(tail_e0) {
    std::size_t n = mu.atom_count();
    xi.reserve(n);
    rho.reserve(n);
    base.reserve(n);
    for (const auto& shell : mu.shells)
      for (const auto& a : shell) {
        xi.push_back(a.xi);
        rho.push_back(a.rho);
        base.push_back(digamma(1.0 - a.xi));
      }
  }

  double f(double z) const {
    double acc = rho0 * (digamma(z + 1.0) + euler_gamma);
    for (std::size_t i = 0; i < xi.size(); ++i)
      acc += rho[i] * (digamma(z + 1.0 - xi[i]) - base[i]);
    if (c > 0.0) acc += c * tail_f(z, e0);
    return acc;
  }

  double fp(double z) const {
    double acc = rho0 * trigamma(z + 1.0);
    for (std::size_t i = 0; i < xi.size(); ++i)
      acc += rho[i] * trigamma(z + 1.0 - xi[i]);
    if (c > 0.0) acc += c * tail_fp(z, e0);
    return acc;
  }
};

}  // namespace detail

// Bernstein transform of the truncated measure:
// rho0 (Psi(z+1)+gamma) + sum rho (Psi(z+1-xi) - Psi(1-xi)).
inline double bernstein_spectral(const spectral_measure& mu, double z) {
  double acc = mu.rho0 * bernstein_uniform(z);
  for (const auto& shell : mu.shells)
    for (const auto& a : shell)
      acc += a.rho * (digamma(z + 1.0 - a.xi) - digamma(1.0 - a.xi));
  return acc;
}

// Its derivative: rho0 Psi'(z+1) + sum rho Psi'(z+1-xi); positive off poles.
inline double bernstein_spectral_deriv(const spectral_measure& mu, double z) {
  double acc = mu.rho0 * trigamma(z + 1.0);
  for (const auto& shell : mu.shells)
    for (const auto& a : shell) acc += a.rho * trigamma(z + 1.0 - a.xi);
  return acc;
}

// Poles of the truncated Bernstein transform inside (-p-1, -p]: the integer
// -p plus every shallower zero shifted left, xi_{p-l,k} - l.  Sorted
// ascending; the last entry is always -p.
inline std::vector<double> shell_poles(const spectral_measure& mu, std::size_t p) {
  std::vector<double> poles;
  poles.push_back(-static_cast<double>(p));
  for (std::size_t l = 1; l < p; ++l) {
    std::size_t q = p - l;  // source shell
    if (q <= mu.p_max())
      for (const auto& a : mu.shells[q - 1])
        poles.push_back(a.xi - static_cast<double>(l));
  }
  std::sort(poles.begin(), poles.end());
  return poles;
}

// Moments of the truncated measure: rho0/(n+1) + sum rho/(n+1-xi).
inline double moments_of_spectral(const spectral_measure& mu, std::size_t n) {
  double z = static_cast<double>(n);
  double acc = mu.rho0 / (z + 1.0);
  for (const auto& shell : mu.shells)
    for (const auto& a : shell) acc += a.rho / (z + 1.0 - a.xi);
  return acc;
}

// n-th moment of the image measure T^(mu), through the duality
// f_mu(z+1) * F_image(z) = 1; exact (no truncation error beyond mu's own)
// because the image's full atom tree is never needed.
inline double moments_of_image(const spectral_measure& mu, std::size_t n) {
  return 1.0 / bernstein_spectral(mu, static_cast<double>(n) + 1.0);
}

// How the mass lost beyond the truncation shell is treated inside that_step.
enum class tail_policy {
  drop,   // truncate: zeros/weights of the truncated transform, deficit recorded
  model,  // add the calibrated e^{-1/2} tail density while locating zeros
};

// One step of the measure-level transformation: locate the unique zero of the
// Bernstein transform in every gap between consecutive poles of each shell
// p <= p_max, take reciprocal derivatives as the new weights.  Root finding
// is safeguarded Newton within the bracketing gap (identical roots to
// bisection at width 1e-13 followed by a Newton polish, at a fraction of the
// evaluations); when the input measure already has a same-shape shell its
// atoms seed the iteration.  Deep shells carry weights spanning many orders
// of magnitude, and a zero sits only ~rho/|f'| away from a residue-rho pole;
// when that distance falls below the bracket inset the zero is resolved from
// the first-order Laurent expansion around the pole instead, and when two
// poles coincide to rounding the pair is treated as annihilated with the
// pinned zero between them.
inline spectral_measure that_step(const spectral_measure& mu, std::size_t p_max,
                                  tail_policy policy = tail_policy::drop) {
  if (p_max < 1) throw std::invalid_argument("that_step: p_max must be >= 1");

  double c = 0.0, e0 = 0.0;
  if (policy == tail_policy::model && mu.p_max() > 0) {
    e0 = static_cast<double>(mu.p_max()) + 1.0;
    c = detail::tail_coeff_for(1.0 - spectral_mass(mu), e0);
  }
  const detail::spectral_eval ev(mu, c, e0);

  // Flatten the work: one entry per gap, indexed (shell, slot).  Each gap
  // carries the residue magnitudes of its bounding poles (rho0 for integer
  // poles, the source atom's weight for shifted ones).
  struct gap_job {
    std::size_t p, slot;
    double lo, hi, res_lo, res_hi, hint;
    bool has_hint;
  };
  std::vector<gap_job> jobs;
  std::vector<std::size_t> shell_sizes(p_max);
  for (std::size_t p = 1; p <= p_max; ++p) {
    std::vector<std::pair<double, double>> poles;  // (position, residue)
    poles.emplace_back(-static_cast<double>(p), mu.rho0);
    for (std::size_t l = 1; l < p; ++l) {
      std::size_t q = p - l;
      if (q <= mu.p_max())
        for (const auto& a : mu.shells[q - 1])
          poles.emplace_back(a.xi - static_cast<double>(l), a.rho);
    }
    std::sort(poles.begin(), poles.end());
    std::size_t m = poles.size();
    shell_sizes[p - 1] = m;
    const std::vector<spectral_atom>* prior =
        (p <= mu.p_max() && mu.shells[p - 1].size() == m) ? &mu.shells[p - 1]
                                                          : nullptr;
    double lo = -static_cast<double>(p) - 1.0;
    double res_lo = mu.rho0;
    for (std::size_t g = 0; g < m; ++g) {
      gap_job job{p, g, lo, poles[g].first, res_lo, poles[g].second, 0.0, false};
      if (prior) {
        double h = (*prior)[g].xi;
        if (h > job.lo && h < job.hi) {
          job.hint = h;
          job.has_hint = true;
        }
      }
      jobs.push_back(job);
      lo = poles[g].first;
      res_lo = poles[g].second;
    }
  }

  spectral_measure out;
  out.shells.resize(p_max);
  for (std::size_t p = 1; p <= p_max; ++p)
    out.shells[p - 1].resize(shell_sizes[p - 1]);

  detail::parallel_for(jobs.size(), [&](std::size_t j) {
    const gap_job& job = jobs[j];
    double width = job.hi - job.lo;
    double scale = std::max(1.0, std::fabs(job.hi));
    spectral_atom atom{};
    if (width < 1e3 * std::numeric_limits<double>::epsilon() * scale) {
      // Pole pair coincident to rounding: the zero between is pinned and its
      // weight is below any measurable contribution.
      double xi = 0.5 * (job.lo + job.hi);
      double delta = 1e-6;
      double s = std::fabs(ev.f(xi - delta)) + (job.res_lo + job.res_hi) / delta;
      s = std::max(s, 1.0);
      atom = spectral_atom{
          xi, std::max(std::min(job.res_lo, job.res_hi) / (s * s), 1e-300)};
    } else {
      double inset = std::min(1e-9, 0.125 * width);
      double a = job.lo + inset, b = job.hi - inset;
      double fa = ev.f(a), fb = ev.f(b);
      if (fa < 0.0 && fb > 0.0) {
        double x = job.has_hint ? job.hint : 0.5 * (a + b);
        for (int it = 0; it < 80 && b - a > 1e-13; ++it) {
          double fx = ev.f(x);
          if (fx < 0.0)
            a = x;
          else
            b = x;
          double step = fx / ev.fp(x);
          if (std::fabs(step) < 4e-16 * std::max(1.0, std::fabs(x))) break;
          double xn = x - step;
          x = (xn > a && xn < b) ? xn : 0.5 * (a + b);
        }
        x -= ev.f(x) / ev.fp(x);  // final polish
        atom = spectral_atom{x, 1.0 / ev.fp(x)};
      } else if (fa < 0.0 && fb <= 0.0) {
        // Zero hugs the right pole: f(x) ~ res_hi/(hi - x) + s near hi.
        double s = fb - job.res_hi / inset;
        double dist = job.res_hi / -s;
        if (!(s < 0.0) || !(dist < 2.0 * inset))
          throw bracket_error("that_step: unresolvable zero near " +
                              std::to_string(job.hi) + " in shell " +
                              std::to_string(job.p));
        atom = spectral_atom{job.hi - dist, job.res_hi / (s * s)};
      } else if (fa >= 0.0 && fb > 0.0) {
        // Zero hugs the left pole: f(x) ~ -res_lo/(x - lo) + s near lo.
        double s = fa + job.res_lo / inset;
        double dist = job.res_lo / s;
        if (!(s > 0.0) || !(dist < 2.0 * inset))
          throw bracket_error("that_step: unresolvable zero near " +
                              std::to_string(job.lo) + " in shell " +
                              std::to_string(job.p));
        atom = spectral_atom{job.lo + dist, job.res_lo / (s * s)};
      } else {
        throw bracket_error("that_step: no sign change in gap (" +
                            std::to_string(job.lo) + ", " +
                            std::to_string(job.hi) + ") of shell " +
                            std::to_string(job.p));
      }
    }
    if (!(atom.rho > 0.0) ||
        !(atom.rho < static_cast<double>(job.p) + 2.0))
      throw std::runtime_error("that_step: weight " + std::to_string(atom.rho) +
                               " outside (0, p+2) in shell " +
                               std::to_string(job.p));
    out.shells[job.p - 1][job.slot] = atom;
  });

  out.rho0 = 1.0 / ev.fp(0.0);
  out.tail_deficit = 1.0 - spectral_mass(out);
  return out;
}

}  // namespace momfix
