#pragma once

#include <vector>

#include "agdesign/errors.hpp"

namespace agdesign {

// Baseline cumulative event-rate model: Weibull (cumulative psi * t^nu) or
// piecewise constant rates over year intervals. Immutable; safe to share
// across threads.
class RateFunction {
 public:
  enum class Family { weibull, piecewise_constant };

  static RateFunction weibull(double psi, double nu);
  // knots are the upper interval endpoints 0 < l_1 < ... < l_d, one rate per
  // interval [l_{k-1}, l_k). Rates are events/year, >= 0, at least one positive.
  static RateFunction piecewise_constant(std::vector<double> knots,
                                         std::vector<double> rates);

  Family family() const { return family_; }
  bool is_weibull() const { return family_ == Family::weibull; }

  // Expected event count by time t. Piecewise evaluation beyond the last knot
  // extrapolates with the final rate.
  double cumulative(double t) const;

  // Instantaneous rate; right-continuous for the piecewise family. The
  // Weibull rate is unbounded at t=0 when nu < 1 (integrable singularity).
  double rate(double t) const;

  // Time t with cumulative(t) = u. A flat (zero-rate) stretch maps to its
  // left endpoint.
  double inverse_cumulative(double u) const;

  // Rate function with cumulative multiplied by c > 0.
  RateFunction scaled(double c) const;

  double psi() const;
  double nu() const;
  const std::vector<double>& knots() const;
  const std::vector<double>& rates() const;

  // Piecewise: equivalent function with t inserted as a knot (appending an
  // extrapolation segment when t lies beyond the last knot). Weibull: no-op.
  RateFunction with_knot(double t) const;

  // Knots strictly inside (lo, hi), as quadrature break points.
  std::vector<double> interior_breaks(double lo, double hi) const;

 private:
  RateFunction() = default;
  Family family_ = Family::weibull;
  double psi_ = 0.0, nu_ = 0.0;
  std::vector<double> knots_, rates_;
  std::vector<double> cum_;  // cumulative at each knot
};

}  // namespace agdesign
