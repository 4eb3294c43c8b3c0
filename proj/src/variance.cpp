#include "agdesign/variance.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "agdesign/numerics.hpp"

namespace agdesign {

namespace {

// Monotone cubic (PCHIP, Fritsch-Butland tangents) interpolant of a
// nondecreasing function sampled on a grid. Used to cache the inner integral
// of the B component so the outer quadrature stays one-dimensional.
class MonotoneCubic {
 public:
  MonotoneCubic(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    m_.assign(n, 0.0);
    if (n < 2) return;
    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      h[k] = x_[k + 1] - x_[k];
      d[k] = (y_[k + 1] - y_[k]) / h[k];
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
      if (d[k - 1] * d[k] <= 0.0) {
        m_[k] = 0.0;
      } else {
        const double w1 = 2.0 * h[k] + h[k - 1];
        const double w2 = h[k] + 2.0 * h[k - 1];
        m_[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
      }
    }
    m_[0] = edge_tangent(h[0], h.size() > 1 ? h[1] : h[0], d[0],
                         d.size() > 1 ? d[1] : d[0]);
    m_[n - 1] = edge_tangent(h[n - 2], n > 2 ? h[n - 3] : h[n - 2], d[n - 2],
                             n > 2 ? d[n - 3] : d[n - 2]);
  }

  double operator()(double t) const {
    if (t <= x_.front()) return y_.front();
    if (t >= x_.back()) return y_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double h = x_[k + 1] - x_[k];
    const double s = (t - x_[k]) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    return h00 * y_[k] + h * h10 * m_[k] + h01 * y_[k + 1] + h * h11 * m_[k + 1];
  }

 private:
  static double edge_tangent(double h0, double h1, double d0, double d1) {
    double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (m * d0 <= 0.0) return 0.0;
    if (d0 * d1 <= 0.0 && std::fabs(m) > 3.0 * std::fabs(d0)) return 3.0 * d0;
    return m;
  }

  std::vector<double> x_, y_, m_;
};

// Grid over [0, tau] split at the segment edges; the first segment is graded
// toward 0 (cubically) when the rate has a power-law singularity or unbounded
// curvature there.
std::vector<double> build_grid(const std::vector<double>& edges, bool grade_first,
                               int panels_per_segment) {
  std::vector<double> grid;
  grid.push_back(edges.front());
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const double a = edges[s], b = edges[s + 1];
    for (int j = 1; j <= panels_per_segment; ++j) {
      const double frac = static_cast<double>(j) / panels_per_segment;
      const double w = (s == 0 && grade_first) ? frac * frac * frac : frac;
      const double t = a + (b - a) * w;
      if (t > grid.back()) grid.push_back(t);
    }
    if (grid.back() < b) grid.push_back(b);
  }
  return grid;
}

// Cumulative integral of f on the grid (panel-by-panel adaptive quadrature),
// wrapped in a monotone interpolant.
MonotoneCubic cumulative_on_grid(const std::function<double(double)>& f,
                                 const std::vector<double>& grid) {
  std::vector<double> values(grid.size(), 0.0);
  const num::Quadrature panel_q{1e-13, 1e-11, 64};
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    acc += num::integrate(f, grid[i], grid[i + 1], panel_q);
    values[i + 1] = acc;
  }
  return MonotoneCubic(grid, std::move(values));
}

VarianceReport arm_moments_report(const TrialScenario& sc) {
  VarianceReport rep;
  const auto m0 = exposure_moments(sc.design(), sc.dropout(0), sc.control_rate());
  const auto m1 = exposure_moments(sc.design(), sc.dropout(1), sc.treatment_rate());
  rep.e0 = m0.e_moment;
  rep.f0 = m0.f_moment;
  rep.e1 = m1.e_moment;
  rep.f1 = m1.f_moment;
  return rep;
}

}  // namespace

VarianceReport variance_equal_dropout(const TrialScenario& sc) {
  if (!sc.equal_dropout())
    throw DomainError(
        "variance_equal_dropout: arms have different dropout rates; "
        "use variance_general");
  VarianceReport rep = arm_moments_report(sc);
  rep.path = VariancePath::equal_dropout;
  if (!(rep.e0 > 0.0))
    throw NumericError("variance: degenerate scenario with no expected events");
  const double eb = sc.rate_ratio();
  const double p1 = sc.p1(), p0 = sc.p0();
  rep.v_beta = (1.0 / (p1 * eb) + 1.0 / p0) / rep.e0 +
               (sc.kappa(1) / p1 + sc.kappa(0) / p0) * 2.0 * rep.f0 / (rep.e0 * rep.e0);
  return rep;
}

VarianceReport variance_general(const TrialScenario& sc) {
  const StudyDesign& design = sc.design();
  const double tau = design.horizon();
  const double eb = sc.rate_ratio();
  const double p1 = sc.p1(), p0 = sc.p0();

  const RateFunction r0 = sc.control_rate().is_weibull()
                              ? sc.control_rate()
                              : sc.control_rate().with_knot(design.tau_c()).with_knot(tau);

  const auto pi0 = [&](double t) { return retention_prob(design, sc.dropout(0), t); };
  const auto pi1 = [&](double t) { return retention_prob(design, sc.dropout(1), t); };
  const auto lam0 = [&](double t) { return r0.rate(t); };
  // omega_0 = p1 pi1 e^b / (p1 pi1 e^b + p0 pi0); omega_1 = 1 - omega_0
  const auto omega0 = [&](double t) {
    const double a = p1 * pi1(t) * eb;
    const double b = p0 * pi0(t);
    return a / (a + b);
  };
  const auto omega1 = [&](double t) { return 1.0 - omega0(t); };

  std::vector<double> edges;
  edges.push_back(0.0);
  for (double b : r0.interior_breaks(0.0, tau)) edges.push_back(b);
  if (design.staggered_entry()) edges.push_back(design.tau_c());
  edges.push_back(tau);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  const std::vector<double> breaks(edges.begin() + 1, edges.end() - 1);

  const num::Quadrature q{1e-12, 1e-11, 4000};
  VarianceReport rep = arm_moments_report(sc);
  rep.path = VariancePath::general;

  rep.a0 = num::integrate(
      [&](double t) { const double w = omega0(t); return w * w * pi0(t) * lam0(t); },
      0.0, tau, q, breaks);
  rep.a1 = num::integrate(
      [&](double t) { const double w = omega1(t); return w * w * pi1(t) * eb * lam0(t); },
      0.0, tau, q, breaks);

  // Inner integrals H_g(t) = int_0^t omega_g dLambda_g, cached on a fine grid.
  const bool grade = r0.is_weibull() && r0.nu() != 1.0;
  const auto grid = build_grid(edges, grade, 1024);
  const MonotoneCubic h0 = cumulative_on_grid(
      [&](double t) { return omega0(t) * lam0(t); }, grid);
  const MonotoneCubic h1 = cumulative_on_grid(
      [&](double t) { return omega1(t) * eb * lam0(t); }, grid);

  rep.b0 = 2.0 * num::integrate(
      [&](double t) { return h0(t) * pi0(t) * omega0(t) * lam0(t); }, 0.0, tau, q, breaks);
  rep.b1 = 2.0 * num::integrate(
      [&](double t) { return h1(t) * pi1(t) * omega1(t) * eb * lam0(t); }, 0.0, tau, q, breaks);

  // Denominator integrand in factored form: stable as the retentions shrink.
  rep.denominator = num::integrate(
      [&](double t) {
        const double a = p0 * pi0(t);
        const double b = p1 * pi1(t) * eb;
        return a * b / (a + b) * lam0(t);
      },
      0.0, tau, q, breaks);
  if (!(rep.denominator > 0.0))
    throw NumericError("variance: degenerate scenario with no expected events");

  rep.v_beta = (p1 * (rep.a1 + sc.kappa(1) * rep.b1) + p0 * (rep.a0 + sc.kappa(0) * rep.b0)) /
               (rep.denominator * rep.denominator);

  // Diagnostic: the equal-dropout-style expression evaluated with per-arm moments.
  if (rep.e0 > 0.0 && rep.e1 > 0.0) {
    rep.equal_dropout_approx =
        1.0 / (p1 * rep.e1) + 1.0 / (p0 * rep.e0) +
        2.0 * (sc.kappa(1) / p1 * rep.f1 / (rep.e1 * rep.e1) +
               sc.kappa(0) / p0 * rep.f0 / (rep.e0 * rep.e0));
  }
  return rep;
}

VarianceReport variance(const TrialScenario& sc) {
  return sc.equal_dropout() ? variance_equal_dropout(sc) : variance_general(sc);
}

NbLimitCheck nb_limit_check(const TrialScenario& sc) {
  const RateFunction& rate = sc.control_rate();
  double lambda0;
  if (rate.is_weibull()) {
    if (rate.nu() != 1.0)
      throw DomainError("nb_limit_check: requires a constant event rate (nu = 1)");
    lambda0 = rate.psi();
  } else {
    const auto& rs = rate.rates();
    for (double r : rs)
      if (r != rs.front())
        throw DomainError("nb_limit_check: requires a constant event rate");
    lambda0 = rs.front();
  }
  if (!sc.equal_dropout())
    throw DomainError("nb_limit_check: requires equal dropout");

  const StudyDesign& design = sc.design();
  const double tau = design.horizon();
  std::vector<double> breaks;
  if (design.staggered_entry()) breaks.push_back(design.tau_c());
  const auto pi = [&](double t) { return retention_prob(design, sc.dropout(0), t); };
  const double expect_t = num::integrate(pi, 0.0, tau, {}, breaks);
  const double expect_t2 =
      2.0 * num::integrate([&](double t) { return t * pi(t); }, 0.0, tau, {}, breaks);

  NbLimitCheck out;
  out.v_beta = variance_equal_dropout(sc).v_beta;
  const double eb = sc.rate_ratio();
  out.nb_bound = (1.0 / (sc.p1() * eb) + 1.0 / sc.p0()) / (lambda0 * expect_t) +
                 (sc.kappa(1) / sc.p1() + sc.kappa(0) / sc.p0()) * expect_t2 /
                     (expect_t * expect_t);
  return out;
}

}  // namespace agdesign
