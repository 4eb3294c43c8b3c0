#pragma once

#include "agdesign/scenario.hpp"

namespace agdesign {

enum class VariancePath { general, equal_dropout };

// Asymptotic variance V of the robust Wald estimate of the log rate ratio
// (the estimator's variance is V/n). Both computation paths populate the
// per-arm exposure moments; the general path also reports its integral
// components and, as a diagnostic, the equal-dropout-style approximation
// evaluated with per-arm moments.
struct VarianceReport {
  double v_beta = 0.0;
  VariancePath path = VariancePath::equal_dropout;
  double e0 = 0.0, f0 = 0.0, e1 = 0.0, f1 = 0.0;
  double a0 = 0.0, b0 = 0.0, a1 = 0.0, b1 = 0.0;  // general path only
  double denominator = 0.0;                       // general path only
  double equal_dropout_approx = 0.0;              // general path only
};

// Quadrature evaluation of the general variance (valid for unequal dropout
// and dispersion). Throws NumericError for degenerate scenarios with no
// expected events.
VarianceReport variance_general(const TrialScenario& sc);

// Closed-form variance under equal dropout:
//   [1/(p1 e^beta) + 1/p0] / E0 + [k1/p1 + k0/p0] * 2 F0 / E0^2.
// Precondition: both arms share the dropout rate (use variance_general
// otherwise).
VarianceReport variance_equal_dropout(const TrialScenario& sc);

// Dispatch: equal-dropout closed form when applicable, general quadrature
// otherwise.
VarianceReport variance(const TrialScenario& sc);

// For constant event rates and equal dropout, the variance coincides with the
// negative-binomial-regression size bound driven by the follow-up moments
// E(T), E(T^2). Returns both sides, each computed independently.
struct NbLimitCheck {
  double v_beta = 0.0;    // equal-dropout closed form
  double nb_bound = 0.0;  // follow-up-moment form, E(T) and E(T^2) by quadrature
};
NbLimitCheck nb_limit_check(const TrialScenario& sc);

}  // namespace agdesign
