#include "agdesign/design.hpp"

#include <cmath>

#include "agdesign/numerics.hpp"

namespace agdesign {

StudyDesign StudyDesign::design1(double tau_c) {
  if (!(tau_c > 0.0)) throw DomainError("StudyDesign: tau_c must be positive");
  StudyDesign d;
  d.tau_c_ = tau_c;
  return d;
}

StudyDesign StudyDesign::design2(double tau_a, double tau_c, double eta) {
  if (!(tau_c > 0.0)) throw DomainError("StudyDesign: tau_c must be positive");
  if (!(tau_a > 0.0)) throw DomainError("StudyDesign: design 2 requires tau_a > 0");
  if (!std::isfinite(eta)) throw DomainError("StudyDesign: eta must be finite");
  StudyDesign d;
  d.staggered_ = true;
  d.tau_a_ = tau_a;
  d.tau_c_ = tau_c;
  d.eta_ = eta;
  return d;
}

double retention_prob(const StudyDesign& design, const DropoutModel& dropout, double t) {
  const double tau = design.horizon();
  if (!(t >= 0.0) || !(t <= tau))
    throw DomainError("retention_prob: t outside [0, horizon]");
  const double surv = std::exp(-dropout.delta() * t);
  if (!design.staggered_entry() || t <= design.tau_c()) return surv;
  // P(entry <= tau - t): probability the administrative limit has not passed
  const double eta = design.eta();
  if (eta == 0.0) return surv * (tau - t) / design.tau_a();
  return surv * std::expm1(-eta * (tau - t)) / std::expm1(-eta * design.tau_a());
}

double entry_density(const StudyDesign& design, double e) {
  if (!design.staggered_entry())
    throw DomainError("entry_density: defined for design 2 only");
  if (!(e >= 0.0) || !(e <= design.tau_a()))
    throw DomainError("entry_density: e outside [0, tau_a]");
  const double eta = design.eta();
  if (eta == 0.0) return 1.0 / design.tau_a();
  return -eta * std::exp(-eta * e) / std::expm1(-eta * design.tau_a());
}

double entry_cdf(const StudyDesign& design, double e) {
  if (!design.staggered_entry())
    throw DomainError("entry_cdf: defined for design 2 only");
  if (!(e >= 0.0) || !(e <= design.tau_a()))
    throw DomainError("entry_cdf: e outside [0, tau_a]");
  const double eta = design.eta();
  if (eta == 0.0) return e / design.tau_a();
  return std::expm1(-eta * e) / std::expm1(-eta * design.tau_a());
}

namespace {

// G_m(delta, D) = integral of exp(-delta t) t^m over [0, D], m = 0, 1, 2.
// The closed forms cancel catastrophically for small delta*D, so the series
// sum_j (-z)^j / (j! (m+j+1)) * D^(m+1) takes over below z = 0.5.
double g_func(int m, double delta, double d) {
  const double z = delta * d;
  if (z < 0.5) {
    double term = 1.0 / (m + 1);
    double sum = term;
    for (int j = 1; j <= 14; ++j) {
      term *= -z / j;
      sum += term * (m + 1) / (m + j + 1);
    }
    return sum * std::pow(d, m + 1);
  }
  const double ez = std::exp(-z);
  switch (m) {
    case 0: return (1.0 - ez) / delta;
    case 1: return (1.0 - (1.0 + z) * ez) / (delta * delta);
    default: return (2.0 - (z * z + 2.0 * z + 2.0) * ez) / (delta * delta * delta);
  }
}

struct EfPair {
  double e, f;
};

EfPair design1_weibull(double psi, double nu, double delta, double tau_c) {
  if (delta == 0.0)
    return {psi * std::pow(tau_c, nu), psi * psi * std::pow(tau_c, 2.0 * nu) / 2.0};
  const double e = psi * nu / std::pow(delta, nu) *
                   num::inc_gamma_lower(nu, delta * tau_c);
  const double f = psi * psi * nu / std::pow(delta, 2.0 * nu) *
                   num::inc_gamma_lower(2.0 * nu, delta * tau_c);
  return {e, f};
}

// Tail integrals over [tau_c, tau] for design 2 with uniform entry (eta = 0).
EfPair design2_tail_weibull(double psi, double nu, double delta, double tau_a,
                            double tau_c) {
  const double tau = tau_a + tau_c;
  if (delta == 0.0) {
    const double e = tau * psi / tau_a * (std::pow(tau, nu) - std::pow(tau_c, nu)) -
                     psi * nu / (tau_a * (nu + 1.0)) *
                         (std::pow(tau, nu + 1.0) - std::pow(tau_c, nu + 1.0));
    const double f =
        tau * psi * psi / (2.0 * tau_a) *
            (std::pow(tau, 2.0 * nu) - std::pow(tau_c, 2.0 * nu)) -
        psi * psi * nu / (tau_a * (2.0 * nu + 1.0)) *
            (std::pow(tau, 2.0 * nu + 1.0) - std::pow(tau_c, 2.0 * nu + 1.0));
    return {e, f};
  }
  const double e =
      tau * psi * nu / (tau_a * std::pow(delta, nu)) *
          num::inc_gamma_between(nu, delta * tau, delta * tau_c) -
      psi * nu / (tau_a * std::pow(delta, nu + 1.0)) *
          num::inc_gamma_between(nu + 1.0, delta * tau, delta * tau_c);
  const double f =
      tau * psi * psi * nu / (tau_a * std::pow(delta, 2.0 * nu)) *
          num::inc_gamma_between(2.0 * nu, delta * tau, delta * tau_c) -
      psi * psi * nu / (tau_a * std::pow(delta, 2.0 * nu + 1.0)) *
          num::inc_gamma_between(2.0 * nu + 1.0, delta * tau, delta * tau_c);
  return {e, f};
}

EfPair design1_piecewise(const RateFunction& rate, double delta, double tau_c) {
  const RateFunction rf = rate.with_knot(tau_c);
  const auto& knots = rf.knots();
  const auto& rates = rf.rates();
  double lo = 0.0, lam_cum = 0.0, e = 0.0, f = 0.0;
  for (std::size_t k = 0; k < knots.size() && lo < tau_c; ++k) {
    const double width = knots[k] - lo;
    const double lam = rates[k];
    const double decay = std::exp(-delta * lo);
    const double g0 = g_func(0, delta, width);
    const double g1 = g_func(1, delta, width);
    e += lam * decay * g0;
    f += lam * decay * (lam_cum * g0 + lam * g1);
    lam_cum += lam * width;
    lo = knots[k];
  }
  return {e, f};
}

EfPair design2_tail_piecewise(const RateFunction& rate, double delta, double tau_a,
                              double tau_c) {
  const double tau = tau_a + tau_c;
  const RateFunction rf = rate.with_knot(tau_c).with_knot(tau);
  const auto& knots = rf.knots();
  const auto& rates = rf.rates();
  double lo = 0.0, lam_cum = 0.0, e = 0.0, f = 0.0;
  for (std::size_t k = 0; k < knots.size() && lo < tau; ++k) {
    const double width = knots[k] - lo;
    const double lam = rates[k];
    if (lo >= tau_c) {
      const double decay = std::exp(-delta * lo);
      const double g0 = g_func(0, delta, width);
      const double g1 = g_func(1, delta, width);
      const double g2 = g_func(2, delta, width);
      const double span = tau - lo;
      e += lam / tau_a * decay * (span * g0 - g1);
      f += lam / tau_a * decay *
           (lam_cum * (span * g0 - g1) + lam * (span * g1 - g2));
    }
    lam_cum += lam * width;
    lo = knots[k];
  }
  return {e, f};
}

EfPair design2_tail_quadrature(const StudyDesign& design, const DropoutModel& dropout,
                               const RateFunction& rate) {
  const double tau_c = design.tau_c();
  const double tau = design.horizon();
  const auto breaks = rate.interior_breaks(tau_c, tau);
  const auto pi = [&](double t) { return retention_prob(design, dropout, t); };
  const double e = num::integrate(
      [&](double t) { return pi(t) * rate.rate(t); }, tau_c, tau, {}, breaks);
  const double f = num::integrate(
      [&](double t) { return pi(t) * rate.cumulative(t) * rate.rate(t); }, tau_c, tau,
      {}, breaks);
  return {e, f};
}

}  // namespace

ExposureMoments exposure_moments(const StudyDesign& design, const DropoutModel& dropout,
                                 const RateFunction& rate) {
  const double delta = dropout.delta();
  const double tau_c = design.tau_c();

  EfPair head = rate.is_weibull()
                    ? design1_weibull(rate.psi(), rate.nu(), delta, tau_c)
                    : design1_piecewise(rate, delta, tau_c);
  if (!design.staggered_entry())
    return {head.e, head.f, MomentMethod::closed_form};

  if (design.eta() == 0.0) {
    const EfPair tail =
        rate.is_weibull()
            ? design2_tail_weibull(rate.psi(), rate.nu(), delta, design.tau_a(), tau_c)
            : design2_tail_piecewise(rate, delta, design.tau_a(), tau_c);
    return {head.e + tail.e, head.f + tail.f, MomentMethod::closed_form};
  }
  const EfPair tail = design2_tail_quadrature(design, dropout, rate);
  return {head.e + tail.e, head.f + tail.f, MomentMethod::quadrature};
}

}  // namespace agdesign
