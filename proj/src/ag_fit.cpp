#include "agdesign/ag_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "agdesign/numerics.hpp"

namespace agdesign {

namespace {

constexpr double kBetaCap = 20.0;
constexpr int kMaxIterations = 50;
constexpr double kScoreTol = 1e-8;
constexpr double kStepTol = 1e-10;

// Distinct event times with per-time event counts and at-risk counts by arm.
struct RiskTable {
  std::vector<double> time;    // distinct event times, ascending
  std::vector<double> d_all;   // events at time (Breslow: ties pooled)
  std::vector<double> d_treat; // treated events at time
  std::vector<double> r0, r1;  // subjects at risk (T_j >= t) per arm
};

RiskTable build_risk_table(std::span<const int> arm, std::span<const double> follow_up,
                           const std::vector<std::vector<double>>& event_times) {
  struct Event {
    double t;
    int x;
  };
  std::vector<Event> events;
  for (std::size_t i = 0; i < arm.size(); ++i)
    for (double t : event_times[i]) {
      if (!(t > 0.0) || t > follow_up[i])
        throw DomainError("ag_fit: event time outside (0, follow_up]");
      events.push_back({t, arm[i]});
    }
  std::sort(events.begin(), events.end(),
            [](const Event& a, const Event& b) { return a.t < b.t; });

  std::vector<double> t0, t1;  // follow-up times per arm, ascending
  for (std::size_t i = 0; i < arm.size(); ++i)
    (arm[i] == 1 ? t1 : t0).push_back(follow_up[i]);
  std::sort(t0.begin(), t0.end());
  std::sort(t1.begin(), t1.end());

  RiskTable table;
  std::size_t i0 = 0, i1 = 0;  // subjects already off study (T < t)
  for (std::size_t e = 0; e < events.size();) {
    const double t = events[e].t;
    double d = 0.0, d1 = 0.0;
    while (e < events.size() && events[e].t == t) {
      d += 1.0;
      d1 += events[e].x;
      ++e;
    }
    while (i0 < t0.size() && t0[i0] < t) ++i0;
    while (i1 < t1.size() && t1[i1] < t) ++i1;
    table.time.push_back(t);
    table.d_all.push_back(d);
    table.d_treat.push_back(d1);
    table.r0.push_back(static_cast<double>(t0.size() - i0));
    table.r1.push_back(static_cast<double>(t1.size() - i1));
  }
  return table;
}

// Score and (n times) the model information at beta.
void score_info(const RiskTable& tab, double beta, double& score, double& info_n) {
  const double eb = std::exp(beta);
  score = 0.0;
  info_n = 0.0;
  for (std::size_t k = 0; k < tab.time.size(); ++k) {
    const double w = tab.r1[k] * eb;
    const double xbar = w / (tab.r0[k] + w);
    score += tab.d_treat[k] - tab.d_all[k] * xbar;
    info_n += tab.d_all[k] * xbar * (1.0 - xbar);
  }
}

}  // namespace

AgFit ag_fit_counting(std::span<const int> arm, std::span<const double> follow_up,
                      const std::vector<std::vector<double>>& event_times,
                      double alpha) {
  if (arm.size() != follow_up.size() || arm.size() != event_times.size())
    throw DomainError("ag_fit: input arrays must have equal length");
  if (arm.empty()) throw DomainError("ag_fit: no subjects");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("ag_fit: alpha must lie strictly inside (0,1)");

  AgFit fit;
  fit.alpha = alpha;
  fit.n_subjects = static_cast<long>(arm.size());

  const RiskTable tab = build_risk_table(arm, follow_up, event_times);
  for (std::size_t k = 0; k < tab.time.size(); ++k) {
    fit.n_events += static_cast<long>(tab.d_all[k]);
    fit.events_treatment += static_cast<long>(tab.d_treat[k]);
  }
  fit.events_control = fit.n_events - fit.events_treatment;
  if (fit.n_events == 0)
    throw NumericError("ag_fit: no events in the pooled data");

  if (fit.events_treatment == 0 || fit.events_control == 0) {
    // one-arm trials push the MLE to +-infinity; cap and flag
    fit.beta_hat = fit.events_treatment == 0 ? -kBetaCap : kBetaCap;
    fit.degenerate = true;
  } else {
    // Newton with step halving, started at 0
    double beta = 0.0, score, info_n;
    score_info(tab, beta, score, info_n);
    for (fit.iterations = 0; fit.iterations < kMaxIterations; ++fit.iterations) {
      if (std::fabs(score) < kScoreTol) {
        fit.converged = true;
        break;
      }
      if (!(info_n > 0.0)) {
        fit.degenerate = true;
        break;
      }
      double step = score / info_n;
      double new_beta = beta + step;
      double new_score, new_info;
      score_info(tab, new_beta, new_score, new_info);
      for (int h = 0; h < 30 && std::fabs(new_score) > std::fabs(score); ++h) {
        step *= 0.5;
        new_beta = beta + step;
        score_info(tab, new_beta, new_score, new_info);
      }
      beta = new_beta;
      score = new_score;
      info_n = new_info;
      if (std::fabs(beta) > kBetaCap) {
        beta = std::copysign(kBetaCap, beta);
        fit.degenerate = true;
        break;
      }
      if (std::fabs(step) < kStepTol) {
        fit.converged =
            std::fabs(score) < kScoreTol * std::max(1.0, static_cast<double>(fit.n_events));
        break;
      }
    }
    if (!fit.converged && !fit.degenerate && std::fabs(score) < kScoreTol)
      fit.converged = true;
    fit.beta_hat = beta;
  }

  // Sandwich pieces at beta_hat. With one binary covariate everything reduces
  // to prefix sums over the distinct event times:
  //   pa(t) = int_0^t xbar dLambda0_hat,  pb(t) = Lambda0_hat(t).
  const double n = static_cast<double>(fit.n_subjects);
  const double eb = std::exp(fit.beta_hat);
  const std::size_t m = tab.time.size();
  std::vector<double> xbar(m), pa(m), pb(m);
  double info_n = 0.0, acc_a = 0.0, acc_b = 0.0;
  fit.baseline_times = tab.time;
  fit.baseline_cum.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double w = tab.r1[k] * eb;
    xbar[k] = w / (tab.r0[k] + w);
    info_n += tab.d_all[k] * xbar[k] * (1.0 - xbar[k]);
    const double dlam = tab.d_all[k] / (tab.r0[k] + w);  // Breslow increment
    acc_a += xbar[k] * dlam;
    acc_b += dlam;
    pa[k] = acc_a;
    pb[k] = acc_b;
    fit.baseline_cum[k] = acc_b;
  }
  fit.model_info = info_n / n;

  // Per-subject score residuals U_i = own-event part minus compensator part.
  fit.score_residuals.resize(arm.size());
  double meat = 0.0;
  for (std::size_t i = 0; i < arm.size(); ++i) {
    double own = 0.0;
    for (double t : event_times[i]) {
      const auto it = std::lower_bound(tab.time.begin(), tab.time.end(), t);
      const std::size_t k = static_cast<std::size_t>(it - tab.time.begin());
      own += arm[i] - xbar[k];
    }
    const auto it = std::upper_bound(tab.time.begin(), tab.time.end(), follow_up[i]);
    double pa_t = 0.0, pb_t = 0.0;
    if (it != tab.time.begin()) {
      const std::size_t k = static_cast<std::size_t>(it - tab.time.begin()) - 1;
      pa_t = pa[k];
      pb_t = pb[k];
    }
    const double compensator = arm[i] == 1 ? eb * (pb_t - pa_t) : -pa_t;
    const double u = own - compensator;
    fit.score_residuals[i] = u;
    meat += u * u;
  }
  fit.robust_meat = meat / n;

  if (fit.model_info > 0.0 && std::isfinite(fit.robust_meat)) {
    fit.robust_var = fit.robust_meat / (fit.model_info * fit.model_info);
    const double se = std::sqrt(fit.robust_var / n);
    const double z = num::norm_quantile(1.0 - alpha / 2.0);
    fit.ci_lower = fit.beta_hat - z * se;
    fit.ci_upper = fit.beta_hat + z * se;
  } else {
    fit.degenerate = true;
    fit.robust_var = std::numeric_limits<double>::infinity();
    fit.ci_lower = -std::numeric_limits<double>::infinity();
    fit.ci_upper = std::numeric_limits<double>::infinity();
  }
  return fit;
}

AgFit ag_fit(const TrialData& data, double alpha) {
  std::vector<int> arm;
  std::vector<double> follow_up;
  std::vector<std::vector<double>> events;
  arm.reserve(data.subjects.size());
  follow_up.reserve(data.subjects.size());
  events.reserve(data.subjects.size());
  for (const auto& s : data.subjects) {
    arm.push_back(s.arm);
    follow_up.push_back(s.follow_up);
    events.push_back(s.event_times);
  }
  return ag_fit_counting(arm, follow_up, events, alpha);
}

bool ag_decide(const AgFit& fit, const Hypothesis& hyp, Direction direction) {
  if (fit.degenerate) return false;
  if (hyp.type() == Hypothesis::Type::equivalence)
    return std::log(hyp.ml()) < fit.ci_lower && fit.ci_upper < std::log(hyp.mu());
  const double lm0 = std::log(hyp.m0());
  return direction == Direction::lower_is_better ? fit.ci_upper < lm0
                                                 : fit.ci_lower > lm0;
}

}  // namespace agdesign
