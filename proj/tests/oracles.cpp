#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace oracles {

double norm_cdf_series(double x) {
  const double ax = std::fabs(x);
  // sum_{k>=0} ax^(2k+1) / (1*3*5*...*(2k+1)); all terms positive
  double term = ax;
  double sum = ax;
  for (int k = 1; k < 500; ++k) {
    term *= ax * ax / (2.0 * k + 1.0);
    sum += term;
    if (term < sum * 1e-18) break;
  }
  const double pdf = std::exp(-0.5 * ax * ax) * 0.3989422804014326779;
  const double upper_half = 0.5 + pdf * sum;
  return x >= 0.0 ? upper_half : 1.0 - upper_half;
}

namespace {

double simpson_rule(const std::function<double(double)>& f, double a, double fa,
                    double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_rec(const std::function<double(double)>& f, double a, double fa,
                   double b, double fb, double fm, double whole, double tol,
                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson_rule(f, a, fa, m, fm, flm);
  const double right = simpson_rule(f, m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double simpson(const std::function<double(double)>& f, double a, double b,
               double abs_tol) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = simpson_rule(f, a, fa, b, fb, fm);
  return simpson_rec(f, a, fa, b, fb, fm, whole, abs_tol, 60);
}

NaiveAgResult naive_ag(const std::vector<int>& arm,
                       const std::vector<double>& follow_up,
                       const std::vector<std::vector<double>>& events, double beta) {
  const std::size_t n = arm.size();
  const double eb = std::exp(beta);

  std::set<double> distinct;
  for (const auto& ev : events)
    for (double t : ev) distinct.insert(t);

  NaiveAgResult out;
  out.u.assign(n, 0.0);
  out.baseline_times.assign(distinct.begin(), distinct.end());

  std::vector<double> xbar(out.baseline_times.size());
  std::vector<double> dlambda(out.baseline_times.size());
  double cum = 0.0;
  for (std::size_t k = 0; k < out.baseline_times.size(); ++k) {
    const double t = out.baseline_times[k];
    double s0 = 0.0, s1 = 0.0;  // risk-set sums, recomputed from scratch
    for (std::size_t i = 0; i < n; ++i) {
      if (follow_up[i] >= t) {
        const double w = arm[i] == 1 ? eb : 1.0;
        s0 += w;
        s1 += arm[i] * w;
      }
    }
    double d = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (double te : events[i])
        if (te == t) {
          d += 1.0;
          d1 += arm[i];
        }
    xbar[k] = s1 / s0;
    dlambda[k] = d / s0;
    cum += dlambda[k];
    out.baseline_cum.push_back(cum);
    out.logpl += beta * d1 - d * std::log(s0);
    out.score += d1 - d * xbar[k];
    out.info_n += d * (xbar[k] - xbar[k] * xbar[k]);
    // same information through the other integral form:
    //   sum_i (x_i - xbar)^2 Y_i exp(beta x_i) dLambda0
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (follow_up[i] >= t) {
        const double w = arm[i] == 1 ? eb : 1.0;
        quad += (arm[i] - xbar[k]) * (arm[i] - xbar[k]) * w;
      }
    out.info_dlambda_n += quad * dlambda[k];
  }

  for (std::size_t i = 0; i < n; ++i) {
    double u = 0.0;
    for (double te : events[i]) {
      const auto it =
          std::lower_bound(out.baseline_times.begin(), out.baseline_times.end(), te);
      u += arm[i] - xbar[static_cast<std::size_t>(it - out.baseline_times.begin())];
    }
    for (std::size_t k = 0; k < out.baseline_times.size(); ++k) {
      if (out.baseline_times[k] > follow_up[i]) break;
      const double w = arm[i] == 1 ? eb : 1.0;
      u -= (arm[i] - xbar[k]) * w * dlambda[k];
    }
    out.u[i] = u;
    out.sigma += u * u;
  }
  out.sigma /= static_cast<double>(n);
  return out;
}

}  // namespace oracles
