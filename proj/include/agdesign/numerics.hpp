#pragma once

#include <functional>
#include <span>

#include "agdesign/errors.hpp"

// Special functions, adaptive quadrature, and monotone root finding used by
// the variance and power modules. Everything here is pure and thread-safe.

namespace agdesign::num {

// Standard normal CDF, |error| < 1e-12 on the whole real line.
double norm_cdf(double x);

// Standard normal density.
double norm_pdf(double x);

// Inverse of norm_cdf on (0,1); norm_cdf(norm_quantile(p)) = p to ~1e-15.
double norm_quantile(double p);

// Non-regularized lower incomplete gamma: integral of t^(nu-1) e^(-t) over [0, a].
double inc_gamma_lower(double nu, double a);

// Integral of t^(nu-1) e^(-t) over [b, a], 0 <= b <= a.
double inc_gamma_between(double nu, double a, double b);

struct Quadrature {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_subdivisions = 4000;
};

// Adaptive Gauss-Kronrod (7-15) integration of f over [lo, hi].
// break_points lists interior abscissae where f has kinks (knots, tau_c);
// integration is subdivided there before adapting. Integrable endpoint
// singularities are handled since the rule never samples interval endpoints.
// Throws NumericError (carrying the best estimate) if the requested tolerance
// cannot be met within max_subdivisions.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const Quadrature& q = {}, std::span<const double> break_points = {});

// Solve f(x) = target for nondecreasing f on [lo, hi] by bisection.
// Requires f(lo) <= target <= f(hi); throws NumericError otherwise.
double invert_monotone(const std::function<double(double)>& f, double target,
                       double lo, double hi);

}  // namespace agdesign::num
