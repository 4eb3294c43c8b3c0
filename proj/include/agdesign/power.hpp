#pragma once

#include "agdesign/scenario.hpp"
#include "agdesign/variance.hpp"

namespace agdesign {

// Which tail of the rate ratio counts as benefit. Lower-is-better rejects on
// the CI upper bound falling below the margin; higher-is-better is the mirror.
enum class Direction { lower_is_better, higher_is_better };

class Hypothesis {
 public:
  enum class Type { superiority, noninferiority, equivalence };

  // Superiority: margin fixed at a rate ratio of 1.
  static Hypothesis superiority(double alpha = 0.05);
  // Noninferiority margin m0 on the rate-ratio scale (> 1 when lower rates
  // are better, < 1 for the mirrored direction).
  static Hypothesis noninferiority(double m0, double alpha = 0.05);
  // Equivalence margins ml < 1 < mu: claim requires the whole CI for the
  // rate ratio inside (ml, mu).
  static Hypothesis equivalence(double ml, double mu, double alpha = 0.05);

  Type type() const { return type_; }
  double m0() const { return m0_; }
  double ml() const { return ml_; }
  double mu() const { return mu_; }
  double alpha() const { return alpha_; }  // two-sided level; each one-sided test runs at alpha/2

 private:
  Hypothesis() = default;
  Type type_ = Type::superiority;
  double m0_ = 1.0, ml_ = 0.0, mu_ = 0.0, alpha_ = 0.05;
};

struct PowerResult {
  double power = 0.0;
  // Equivalence only: false when the CI is wider than the margin window at
  // this n (the normal approximation cannot hold), in which case power is 0.
  bool margin_feasible = true;
};

struct SizeResult {
  long total_n = 0;
  long n_treatment = 0;
  long n_control = 0;
  double raw_n = 0.0;          // pre-rounding solution
  double nominal_power = 0.0;  // power evaluated at total_n
};

// Benefit direction implied by the margin and the design-stage effect.
Direction test_direction(const TrialScenario& sc, const Hypothesis& hyp);

// Superiority / noninferiority power at total sample size n.
double power_sup_ni(const TrialScenario& sc, const Hypothesis& hyp, double n_total);
SizeResult size_sup_ni(const TrialScenario& sc, const Hypothesis& hyp, double target_power);

// Equivalence power / size; size inverts the power formula numerically except
// in the symmetric-margin case, which has a closed form.
PowerResult power_equiv(const TrialScenario& sc, const Hypothesis& hyp, double n_total);
SizeResult size_equiv(const TrialScenario& sc, const Hypothesis& hyp, double target_power);

// Dispatch on the hypothesis type.
PowerResult power_at(const TrialScenario& sc, const Hypothesis& hyp, double n_total);
SizeResult size_for(const TrialScenario& sc, const Hypothesis& hyp, double target_power);

}  // namespace agdesign
