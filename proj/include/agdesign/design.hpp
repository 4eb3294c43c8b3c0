#pragma once

#include "agdesign/rate_model.hpp"

namespace agdesign {

// Exponential loss to follow-up with rate delta (1/years); delta = 0 means no
// random dropout. The annual dropout fraction is 1 - exp(-delta).
class DropoutModel {
 public:
  DropoutModel() = default;
  explicit DropoutModel(double delta) : delta_(delta) {
    if (!(delta >= 0.0)) throw DomainError("DropoutModel: delta must be >= 0");
  }
  double delta() const { return delta_; }

 private:
  double delta_ = 0.0;
};

// Follow-up structure.
//   design 1: every subject is treated for tau_c years.
//   design 2: accrual over tau_a years (entry density truncated exponential
//             with shape eta, uniform at eta = 0), administrative censoring
//             at calendar time tau = tau_a + tau_c.
class StudyDesign {
 public:
  static StudyDesign design1(double tau_c);
  static StudyDesign design2(double tau_a, double tau_c, double eta);

  bool staggered_entry() const { return staggered_; }
  double tau_c() const { return tau_c_; }
  double tau_a() const { return tau_a_; }
  double eta() const { return eta_; }
  double horizon() const { return tau_a_ + tau_c_; }  // tau

 private:
  StudyDesign() = default;
  bool staggered_ = false;
  double tau_a_ = 0.0, tau_c_ = 0.0, eta_ = 0.0;
};

// P(subject still in the trial at study time t), 0 <= t <= horizon.
double retention_prob(const StudyDesign& design, const DropoutModel& dropout, double t);

// Entry-time density f(e) on [0, tau_a]; design 2 only.
double entry_density(const StudyDesign& design, double e);

// Entry-time CDF on [0, tau_a]; design 2 only (used for inversion sampling).
double entry_cdf(const StudyDesign& design, double e);

enum class MomentMethod { closed_form, quadrature };

// E = integral of pi dLambda, F = integral of pi * Lambda dLambda over the
// design horizon. F <= Lambda(tau) * E always holds.
struct ExposureMoments {
  double e_moment = 0.0;
  double f_moment = 0.0;
  MomentMethod method = MomentMethod::closed_form;
};

// Closed forms for: design 1 (both rate families) and design 2 with eta = 0.
// Design 2 with eta != 0 evaluates the tail integrals over [tau_c, tau] by
// adaptive quadrature; `method` reports which path ran.
ExposureMoments exposure_moments(const StudyDesign& design, const DropoutModel& dropout,
                                 const RateFunction& rate);

}  // namespace agdesign
