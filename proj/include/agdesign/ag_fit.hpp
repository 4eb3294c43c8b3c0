#pragma once

#include <span>

#include "agdesign/power.hpp"
#include "agdesign/simulate.hpp"

namespace agdesign {

// Andersen-Gill fit for a single binary covariate: partial-likelihood MLE by
// Newton iteration, Breslow baseline, and the Lin-Wei-Yang-Ying sandwich
// variance built from per-subject score residuals.
struct AgFit {
  double beta_hat = 0.0;     // log rate ratio estimate
  double model_info = 0.0;   // I: model-based information (per subject)
  double robust_meat = 0.0;  // Sigma: mean squared score residual
  double robust_var = 0.0;   // V = Sigma / I^2; Var(beta_hat) ~ V / n
  double ci_lower = 0.0;     // two-sided CI for the log rate ratio
  double ci_upper = 0.0;
  double alpha = 0.05;
  int iterations = 0;
  bool converged = false;
  // An arm had zero events or the estimate diverged (capped at |beta| = 20).
  bool degenerate = false;
  long n_subjects = 0;
  long n_events = 0;
  long events_treatment = 0;
  long events_control = 0;
  std::vector<double> score_residuals;  // U_i, one per subject; sums to the score
  std::vector<double> baseline_times;   // distinct event times
  std::vector<double> baseline_cum;     // Breslow cumulative baseline at those times
};

// Fit from simulated or file-loaded trial data. Throws NumericError when the
// pooled data contain no events at all.
AgFit ag_fit(const TrialData& data, double alpha = 0.05);

// Core fit on counting-process arrays; event_times[i] are subject i's event
// times in (0, follow_up[i]]. Risk sets use study time (time since entry).
AgFit ag_fit_counting(std::span<const int> arm, std::span<const double> follow_up,
                      const std::vector<std::vector<double>>& event_times,
                      double alpha = 0.05);

// Test decision from a fitted CI. Degenerate fits never reject.
// Superiority/NI: CI upper bound below log(m0) (mirrored when higher rates
// are better). Equivalence: CI strictly inside (log ml, log mu).
bool ag_decide(const AgFit& fit, const Hypothesis& hyp,
               Direction direction = Direction::lower_is_better);

}  // namespace agdesign
