#include "agdesign/power.hpp"

#include <cmath>

#include "agdesign/numerics.hpp"

namespace agdesign {

Hypothesis Hypothesis::superiority(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("Hypothesis: alpha must lie strictly inside (0,1)");
  Hypothesis h;
  h.type_ = Type::superiority;
  h.m0_ = 1.0;
  h.alpha_ = alpha;
  return h;
}

Hypothesis Hypothesis::noninferiority(double m0, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("Hypothesis: alpha must lie strictly inside (0,1)");
  if (!(m0 > 0.0)) throw DomainError("Hypothesis: margin m0 must be positive");
  Hypothesis h;
  h.type_ = Type::noninferiority;
  h.m0_ = m0;
  h.alpha_ = alpha;
  return h;
}

Hypothesis Hypothesis::equivalence(double ml, double mu, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("Hypothesis: alpha must lie strictly inside (0,1)");
  if (!(ml > 0.0 && ml < 1.0) || !(mu > 1.0))
    throw DomainError("Hypothesis: equivalence margins require 0 < ml < 1 < mu");
  Hypothesis h;
  h.type_ = Type::equivalence;
  h.ml_ = ml;
  h.mu_ = mu;
  h.alpha_ = alpha;
  return h;
}

Direction test_direction(const TrialScenario& sc, const Hypothesis& hyp) {
  if (hyp.type() == Hypothesis::Type::equivalence)
    return Direction::lower_is_better;  // two-sided claim, direction immaterial
  if (hyp.m0() > 1.0) return Direction::lower_is_better;
  if (hyp.m0() < 1.0) return Direction::higher_is_better;
  // Superiority (m0 = 1): direction follows the design-stage effect.
  return sc.log_ratio() > 0.0 ? Direction::higher_is_better : Direction::lower_is_better;
}

namespace {

// |log m0 - beta| after checking the effect sits on the alternative side.
double effect_distance(const TrialScenario& sc, const Hypothesis& hyp) {
  const double gap = std::log(hyp.m0()) - sc.log_ratio();
  const Direction dir = test_direction(sc, hyp);
  if (dir == Direction::lower_is_better && gap < 0.0)
    throw DomainError(
        "power/size: rate ratio is on the null side of the margin "
        "(exp(beta) >= m0 in a lower-is-better test)");
  if (dir == Direction::higher_is_better && gap > 0.0)
    throw DomainError(
        "power/size: rate ratio is on the null side of the margin "
        "(exp(beta) <= m0 in a higher-is-better test)");
  return std::fabs(gap);
}

long round_treatment_arm(long total, double p1) {
  return std::lround(static_cast<double>(total) * p1);
}

double power_sup_ni_v(double v_beta, double effect, double alpha, double n) {
  const double z = num::norm_quantile(1.0 - alpha / 2.0);
  return num::norm_cdf(std::sqrt(n) * effect / std::sqrt(v_beta) - z);
}

struct EquivParts {
  double upper_gap;  // log mu - beta  (> 0 on the alternative)
  double lower_gap;  // log ml - beta  (< 0 on the alternative)
};

EquivParts equiv_parts(const TrialScenario& sc, const Hypothesis& hyp) {
  const double beta = sc.log_ratio();
  const double lu = std::log(hyp.mu());
  const double ll = std::log(hyp.ml());
  if (!(beta > ll && beta < lu))
    throw DomainError("power/size: equivalence requires ml < exp(beta) < mu");
  return {lu - beta, ll - beta};
}

PowerResult power_equiv_v(double v_beta, const EquivParts& parts, double log_width,
                          double alpha, double n) {
  const double z = num::norm_quantile(1.0 - alpha / 2.0);
  const double se = std::sqrt(v_beta / n);
  if (2.0 * z * se >= log_width) return {0.0, false};  // CI wider than the margins
  const double sn = std::sqrt(n / v_beta);
  double p = num::norm_cdf(sn * parts.upper_gap - z) - num::norm_cdf(sn * parts.lower_gap + z);
  p = std::min(1.0, std::max(0.0, p));
  return {p, true};
}

}  // namespace

double power_sup_ni(const TrialScenario& sc, const Hypothesis& hyp, double n_total) {
  if (hyp.type() == Hypothesis::Type::equivalence)
    throw DomainError("power_sup_ni: equivalence hypothesis supplied");
  if (!(n_total > 0.0)) throw DomainError("power_sup_ni: n must be positive");
  const double effect = effect_distance(sc, hyp);
  return power_sup_ni_v(variance(sc).v_beta, effect, hyp.alpha(), n_total);
}

SizeResult size_sup_ni(const TrialScenario& sc, const Hypothesis& hyp,
                       double target_power) {
  if (hyp.type() == Hypothesis::Type::equivalence)
    throw DomainError("size_sup_ni: equivalence hypothesis supplied");
  if (!(target_power > 0.0 && target_power < 1.0))
    throw DomainError("size: target power must lie strictly inside (0,1)");
  const double effect = effect_distance(sc, hyp);
  if (effect == 0.0)
    throw DomainError("size: rate ratio equals the margin; no finite sample size");
  const double v_beta = variance(sc).v_beta;
  const double z_a = num::norm_quantile(1.0 - hyp.alpha() / 2.0);
  const double z_p = num::norm_quantile(target_power);
  SizeResult out;
  out.raw_n = (z_a + z_p) * (z_a + z_p) * v_beta / (effect * effect);
  out.total_n = static_cast<long>(std::ceil(out.raw_n));
  out.n_treatment = round_treatment_arm(out.total_n, sc.p1());
  out.n_control = out.total_n - out.n_treatment;
  out.nominal_power =
      power_sup_ni_v(v_beta, effect, hyp.alpha(), static_cast<double>(out.total_n));
  return out;
}

PowerResult power_equiv(const TrialScenario& sc, const Hypothesis& hyp, double n_total) {
  if (hyp.type() != Hypothesis::Type::equivalence)
    throw DomainError("power_equiv: equivalence hypothesis required");
  if (!(n_total > 0.0)) throw DomainError("power_equiv: n must be positive");
  const EquivParts parts = equiv_parts(sc, hyp);
  const double log_width = std::log(hyp.mu() / hyp.ml());
  return power_equiv_v(variance(sc).v_beta, parts, log_width, hyp.alpha(), n_total);
}

SizeResult size_equiv(const TrialScenario& sc, const Hypothesis& hyp,
                      double target_power) {
  if (hyp.type() != Hypothesis::Type::equivalence)
    throw DomainError("size_equiv: equivalence hypothesis required");
  if (!(target_power > 0.0 && target_power < 1.0))
    throw DomainError("size: target power must lie strictly inside (0,1)");
  const EquivParts parts = equiv_parts(sc, hyp);
  const double log_width = std::log(hyp.mu() / hyp.ml());
  const double v_beta = variance(sc).v_beta;
  const double alpha = hyp.alpha();

  SizeResult out;
  const double asym = std::fabs(parts.upper_gap - (-parts.lower_gap));
  if (asym <= 1e-12 * log_width) {
    // Symmetric margins: closed form with the half-width Delta.
    const double delta = 0.5 * log_width;
    const double z_a = num::norm_quantile(1.0 - alpha / 2.0);
    const double z_p = num::norm_quantile(0.5 * (1.0 + target_power));
    out.raw_n = (z_a + z_p) * (z_a + z_p) * v_beta / (delta * delta);
  } else {
    const auto power_fn = [&](double n) {
      return power_equiv_v(v_beta, parts, log_width, alpha, n).power;
    };
    out.raw_n = num::invert_monotone(power_fn, target_power, 4.0, 1e7);
  }
  out.total_n = static_cast<long>(std::ceil(out.raw_n));
  out.n_treatment = round_treatment_arm(out.total_n, sc.p1());
  out.n_control = out.total_n - out.n_treatment;
  out.nominal_power =
      power_equiv_v(v_beta, parts, log_width, alpha, static_cast<double>(out.total_n))
          .power;
  return out;
}

PowerResult power_at(const TrialScenario& sc, const Hypothesis& hyp, double n_total) {
  if (hyp.type() == Hypothesis::Type::equivalence) return power_equiv(sc, hyp, n_total);
  return {power_sup_ni(sc, hyp, n_total), true};
}

SizeResult size_for(const TrialScenario& sc, const Hypothesis& hyp, double target_power) {
  if (hyp.type() == Hypothesis::Type::equivalence)
    return size_equiv(sc, hyp, target_power);
  return size_sup_ni(sc, hyp, target_power);
}

}  // namespace agdesign
