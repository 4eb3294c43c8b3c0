#pragma once

#include <string>
#include <vector>

#include "agdesign/rng.hpp"
#include "agdesign/scenario.hpp"

namespace agdesign {

struct SubjectRecord {
  int arm = 0;                      // 1 = treatment, 0 = control
  double entry = 0.0;               // calendar entry time (0 in design 1)
  double follow_up = 0.0;           // T_i, years on study
  double frailty = 1.0;             // subject-level rate multiplier
  std::vector<double> event_times;  // strictly increasing, all <= follow_up
};

struct TrialData {
  std::vector<SubjectRecord> subjects;
  std::uint64_t master_seed = 0;
  std::uint64_t replicate = 0;
  std::uint64_t scenario_fingerprint = 0;
};

// One subject from the mixed Poisson process:
//   frailty ~ Gamma(1/kappa, kappa) (1 exactly when kappa = 0),
//   entry from the design-2 entry distribution (0 in design 1),
//   censoring C ~ Exponential(delta), follow-up T = min(C, admin limit),
//   event count ~ Poisson(frailty * Lambda(T)) with event times placed by
//   inversion of the cumulative rate (order statistics of scaled uniforms).
// Draws come from `stream` in that fixed order.
SubjectRecord simulate_subject(const StudyDesign& design, const RateFunction& rate,
                               double kappa, const DropoutModel& dropout,
                               num::RngStream& stream);

// Full trial: round(n_total * p1) treatment subjects first, then controls.
// Subject i draws from the substream of (master_seed, replicate) at index i,
// so results are reproducible at any thread count.
TrialData simulate_trial(const TrialScenario& sc, long n_total,
                         std::uint64_t master_seed, std::uint64_t replicate);

// Counting-process CSV: one row per event plus a terminal censoring row per
// subject (empty event_time field). Columns:
//   subject_id,arm,entry,follow_up,event_time
std::string trial_to_csv(const TrialData& data);
TrialData trial_from_csv(const std::string& csv);

}  // namespace agdesign
