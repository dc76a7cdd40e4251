#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "seqcore.hpp"
#include "transform.hpp"

namespace momfix {

// Truncated certificate of complete monotonicity: the result is "consistent
// with completely monotone up to max_order_checked", never a proof.
struct violation_site {
  std::size_t n = 0;
  std::size_t order = 0;
};

struct monotonicity_report {
  std::size_t max_order_checked = 0;
  double min_signed_difference = 0.0;
  bool pass = false;
  std::optional<violation_site> first_violation;
};

// Pass/fail threshold for the monotonicity checks: 10x the measured noise
// floor of the compensated difference triangle on the fixed-point moment
// sequence (80 terms, order 20).
inline constexpr double cm_calibrated_tol = 1e-8;

namespace detail {

// Double-double value used to carry the difference triangle: the triangle is
// all cancellation, so each subtraction keeps its exact rounding remainder.
struct dd {
  double hi = 0.0;
  double lo = 0.0;
};

inline dd two_diff(double a, double b) {
  double s = a - b;
  double bb = s - a;
  double err = (a - (s - bb)) - (b + bb);
  return {s, err};
}

inline dd dd_sub(const dd& x, const dd& y) {
  dd d = two_diff(x.hi, y.hi);
  double lo = d.lo + (x.lo - y.lo);
  double hi = d.hi + lo;
  return {hi, lo - (hi - d.hi)};
}

}  // namespace detail

// Checks (-1)^j (Delta^j a)_n >= -tol for all j <= max_order and every n the
// sequence length supports, where (Delta a)_n = a_{n+1} - a_n.  The triangle
// is carried in compensated (double-double) arithmetic so the only noise left
// is the rounding already present in the inputs.
inline monotonicity_report completely_monotone_check(const std::vector<double>& a,
                                                     std::size_t max_order,
                                                     double tol) {
  if (a.size() < max_order + 1)
    throw std::invalid_argument(
        "completely_monotone_check: need at least max_order + 1 terms");
  monotonicity_report rep;
  rep.max_order_checked = max_order;
  rep.min_signed_difference = std::numeric_limits<double>::infinity();

  std::vector<detail::dd> row(a.size());
  for (std::size_t n = 0; n < a.size(); ++n) row[n] = {a[n], 0.0};

  for (std::size_t j = 0; j <= max_order; ++j) {
    double sign = (j % 2 == 0) ? 1.0 : -1.0;
    for (std::size_t n = 0; n + j < a.size(); ++n) {
      double signed_diff = sign * (row[n].hi + row[n].lo);
      if (signed_diff < rep.min_signed_difference)
        rep.min_signed_difference = signed_diff;
      if (signed_diff < -tol && !rep.first_violation)
        rep.first_violation = violation_site{n, j};
    }
    if (j == max_order) break;
    for (std::size_t n = 0; n + j + 1 < a.size(); ++n)
      row[n] = detail::dd_sub(row[n + 1], row[n]);
  }
  rep.pass = rep.min_signed_difference >= -tol;
  return rep;
}

// Infinite-divisibility probe: complete monotonicity of the alpha-th power of
// the fixed-point moment sequence.
inline monotonicity_report infdiv_check(double alpha, std::size_t n_len,
                                        std::size_t max_order,
                                        double tol = cm_calibrated_tol) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("infdiv_check: alpha must be positive");
  if (n_len < max_order + 1)
    throw std::invalid_argument("infdiv_check: n_len must exceed max_order");
  std::vector<double> m = fixed_point_moments(n_len - 1);
  for (double& v : m) v = std::pow(v, alpha);
  return completely_monotone_check(m, max_order, tol);
}

// Membership test for the transformation's image: b is in the image iff the
// preimage c_n = 1/b_n - 1/b_{n-1} is itself a moment sequence on [0,1],
// i.e. completely monotone with 0 <= c_n <= 1.  A bound violation is reported
// with order = 0 at the offending index.
inline monotonicity_report in_image_of_t(const std::vector<double>& b,
                                         std::size_t max_order,
                                         double tol = cm_calibrated_tol) {
  for (double v : b)
    if (!(v > 0.0))
      throw std::invalid_argument("in_image_of_t: sequence must be strictly positive");
  std::vector<double> c = t_inverse(b);
  monotonicity_report rep = completely_monotone_check(c, max_order, tol);
  for (std::size_t n = 0; n < c.size(); ++n) {
    double headroom = std::min(c[n], 1.0 - c[n]);
    if (headroom < rep.min_signed_difference) rep.min_signed_difference = headroom;
    if (headroom < -tol && !rep.first_violation)
      rep.first_violation = violation_site{n, 0};
  }
  rep.pass = rep.min_signed_difference >= -tol;
  return rep;
}

// Discrete log-convexity of positive samples on a uniform grid:
// F(x_i)^2 <= F(x_{i-1}) F(x_{i+1}) (1 + tol) for all interior i.
inline bool log_convexity_check(const std::vector<std::pair<double, double>>& fvals,
                                double tol) {
  if (fvals.size() < 3)
    throw std::invalid_argument("log_convexity_check: need at least three samples");
  double step = fvals[1].first - fvals[0].first;
  if (!(step > 0.0))
    throw std::invalid_argument("log_convexity_check: grid must be increasing");
  for (std::size_t i = 0; i + 1 < fvals.size(); ++i) {
    double d = fvals[i + 1].first - fvals[i].first;
    if (!(d > 0.0) || std::fabs(d - step) > 1e-9 * std::fabs(step))
      throw std::invalid_argument(
          "log_convexity_check: grid must be uniform and increasing");
  }
  for (const auto& [x, v] : fvals)
    if (!(v > 0.0))
      throw std::invalid_argument("log_convexity_check: values must be positive");
  for (std::size_t i = 1; i + 1 < fvals.size(); ++i) {
    double lhs = fvals[i].second * fvals[i].second;
    double rhs = fvals[i - 1].second * fvals[i + 1].second * (1.0 + tol);
    if (lhs > rhs) return false;
  }
  return true;
}

}  // namespace momfix
