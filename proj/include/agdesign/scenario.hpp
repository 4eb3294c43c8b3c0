#pragma once

#include <cstdint>

#include "agdesign/design.hpp"
#include "agdesign/rate_model.hpp"

namespace agdesign {

// One treatment group: dispersion kappa (between-subject heterogeneity of the
// mixed Poisson process; 0 recovers an ordinary Poisson process), dropout and
// mean event function.
struct ArmModel {
  double kappa = 0.0;
  DropoutModel dropout;
  RateFunction rate;
};

// Full design-stage parameterization. The treatment mean function is the
// control mean function scaled by the constant rate ratio exp(beta)
// (proportional rates assumption). The ratio is stored as given so that
// configurations round-trip exactly; the log ratio is derived.
class TrialScenario {
 public:
  TrialScenario(StudyDesign design, RateFunction control_rate, double rate_ratio,
                double p1, double kappa0, double kappa1, DropoutModel dropout0,
                DropoutModel dropout1);

  const StudyDesign& design() const { return design_; }
  const RateFunction& control_rate() const { return control_rate_; }
  RateFunction treatment_rate() const { return control_rate_.scaled(rate_ratio_); }
  double log_ratio() const { return log_ratio_; }
  double rate_ratio() const { return rate_ratio_; }
  double p1() const { return p1_; }
  double p0() const { return 1.0 - p1_; }
  double kappa(int arm) const { return arm == 0 ? kappa0_ : kappa1_; }
  const DropoutModel& dropout(int arm) const { return arm == 0 ? dropout0_ : dropout1_; }
  bool equal_dropout() const { return dropout0_.delta() == dropout1_.delta(); }
  ArmModel arm(int g) const;

 private:
  StudyDesign design_;
  RateFunction control_rate_;
  double rate_ratio_;
  double log_ratio_;
  double p1_;
  double kappa0_, kappa1_;
  DropoutModel dropout0_, dropout1_;
};

// Stable 64-bit fingerprint of the scenario parameters (seed provenance for
// simulated data).
std::uint64_t scenario_fingerprint(const TrialScenario& sc);

}  // namespace agdesign
