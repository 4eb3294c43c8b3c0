#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>

#include "agdesign/design.hpp"
#include "agdesign/numerics.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace agdesign;

namespace {

RateFunction table3_rate() {
  return RateFunction::piecewise_constant({0.4, 0.8, 1.0}, {1.0, 1.25, 1.5});
}

// independent oracle: E and F through adaptive Simpson on pi dLambda
struct QuadMoments {
  double e, f;
};
QuadMoments moments_by_quadrature(const StudyDesign& design, const DropoutModel& dropout,
                                  const RateFunction& rate) {
  const double tau = design.horizon();
  const RateFunction rf =
      rate.is_weibull() ? rate : rate.with_knot(design.tau_c()).with_knot(tau);
  std::vector<double> edges{0.0};
  for (double b : rf.interior_breaks(0.0, tau)) edges.push_back(b);
  if (design.staggered_entry()) edges.push_back(design.tau_c());
  edges.push_back(tau);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  double e = 0.0, f = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    e += oracles::simpson(
        [&](double t) { return retention_prob(design, dropout, t) * rf.rate(t); },
        edges[i], edges[i + 1], 1e-12);
    f += oracles::simpson(
        [&](double t) {
          return retention_prob(design, dropout, t) * rf.cumulative(t) * rf.rate(t);
        },
        edges[i], edges[i + 1], 1e-12);
  }
  return {e, f};
}

}  // namespace

TEST_CASE("design construction") {
  CHECK_THROWS_AS(StudyDesign::design1(0.0), DomainError);
  CHECK_THROWS_AS(StudyDesign::design2(0.0, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(StudyDesign::design2(0.5, -1.0, 0.0), DomainError);
  CHECK_THROWS_AS(DropoutModel(-0.1), DomainError);
  CHECK(StudyDesign::design2(0.5, 1.0, 0.0).horizon() == 1.5);
  CHECK(StudyDesign::design1(1.0).horizon() == 1.0);
}

TEST_CASE("retention probability") {
  const DropoutModel quarter(0.25);
  const StudyDesign d1 = StudyDesign::design1(1.0);
  // exponential retention; 1 - exp(-0.25) = 22.1% annual dropout
  CHECK(retention_prob(d1, quarter, 1.0) ==
        doctest::Approx(std::exp(-0.25)).epsilon(1e-14));
  CHECK(retention_prob(d1, quarter, 1.0) == doctest::Approx(0.779).epsilon(1e-3));
  CHECK(retention_prob(d1, quarter, 0.0) == 1.0);
  CHECK(retention_prob(d1, DropoutModel(0.0), 0.7) == 1.0);

  const StudyDesign d2 = StudyDesign::design2(0.5, 1.0, 0.0);
  CHECK(retention_prob(d2, quarter, 1.5) == 0.0);  // nobody has follow-up tau
  CHECK(retention_prob(d2, quarter, 1.2) ==
        doctest::Approx(std::exp(-0.3) * (1.5 - 1.2) / 0.5).epsilon(1e-12));
  CHECK(retention_prob(d2, quarter, 1.2) == doctest::Approx(0.4445).epsilon(1e-4));
  CHECK(retention_prob(d2, quarter, 0.8) ==
        doctest::Approx(std::exp(-0.2)).epsilon(1e-14));
  // nonincreasing
  double prev = 1.0;
  for (double t = 0.0; t <= 1.5; t += 0.05) {
    const double pi = retention_prob(d2, quarter, t);
    CHECK(pi <= prev + 1e-14);
    prev = pi;
  }
  CHECK_THROWS_AS(retention_prob(d1, quarter, -0.1), DomainError);
  CHECK_THROWS_AS(retention_prob(d1, quarter, 1.1), DomainError);

  // eta != 0 branch agrees with its eta -> 0 limit
  const StudyDesign d2_eta = StudyDesign::design2(0.5, 1.0, 1e-12);
  CHECK(retention_prob(d2_eta, quarter, 1.2) ==
        doctest::Approx(retention_prob(d2, quarter, 1.2)).epsilon(1e-9));
}

TEST_CASE("entry density") {
  const StudyDesign uniform = StudyDesign::design2(0.5, 1.0, 0.0);
  CHECK(entry_density(uniform, 0.1) == 2.0);
  CHECK(entry_cdf(uniform, 0.25) == doctest::Approx(0.5).epsilon(1e-14));

  const StudyDesign convex = StudyDesign::design2(0.5, 1.0, 1.0);
  CHECK(entry_density(convex, 0.0) ==
        doctest::Approx(1.0 / (1.0 - std::exp(-0.5))).epsilon(1e-12));
  CHECK(entry_density(convex, 0.0) == doctest::Approx(2.5415).epsilon(1e-4));

  for (double eta : {-2.0, 0.0, 3.0}) {
    const StudyDesign d = StudyDesign::design2(0.5, 1.0, eta);
    const double mass = num::integrate([&](double e) { return entry_density(d, e); },
                                       0.0, 0.5);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(entry_cdf(d, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(entry_cdf(d, 0.0) == 0.0);
  }
  CHECK_THROWS_AS(entry_density(StudyDesign::design1(1.0), 0.1), DomainError);
  CHECK_THROWS_AS(entry_density(uniform, 0.6), DomainError);
  CHECK_THROWS_AS(entry_density(uniform, -0.1), DomainError);
}

TEST_CASE("exposure moments: no-dropout closed forms") {
  const StudyDesign d1 = StudyDesign::design1(1.0);
  const DropoutModel none(0.0);
  const auto weibull = exposure_moments(d1, none, RateFunction::weibull(1.1, 1.2));
  CHECK(weibull.e_moment == doctest::Approx(1.1).epsilon(1e-14));   // psi tau_c^nu
  CHECK(weibull.f_moment == doctest::Approx(0.605).epsilon(1e-14)); // psi^2 tau_c^2nu / 2
  CHECK(weibull.method == MomentMethod::closed_form);

  const auto pw = exposure_moments(d1, none, table3_rate());
  CHECK(pw.e_moment == doctest::Approx(1.2).epsilon(1e-14));   // Lambda(tau_c)
  CHECK(pw.f_moment == doctest::Approx(0.72).epsilon(1e-14));  // Lambda^2(tau_c)/2
}

TEST_CASE("exposure moments: frozen reference values") {
  const DropoutModel quarter(0.25);
  const auto d1 = exposure_moments(StudyDesign::design1(1.0), quarter,
                                   RateFunction::weibull(1.1, 1.2));
  CHECK(d1.e_moment == doctest::Approx(0.9621118163828962).epsilon(1e-12));
  CHECK(d1.f_moment == doctest::Approx(0.5078829488880635).epsilon(1e-12));

  const auto d2 = exposure_moments(StudyDesign::design2(0.5, 1.0, 0.0), quarter,
                                   RateFunction::weibull(1.1, 1.2));
  CHECK(d2.e_moment == doctest::Approx(1.2161057663916806).epsilon(1e-12));
  CHECK(d2.f_moment == doctest::Approx(0.8440586364069688).epsilon(1e-12));

  const auto t3 = exposure_moments(StudyDesign::design1(1.0), quarter, table3_rate());
  CHECK(t3.e_moment == doctest::Approx(1.0507634726855126).epsilon(1e-12));
  CHECK(t3.f_moment == doctest::Approx(0.6041738624813099).epsilon(1e-12));
}

TEST_CASE("closed forms match quadrature across the delta grid") {
  const RateFunction rates[] = {RateFunction::weibull(1.1, 1.2),
                                RateFunction::weibull(1.5, 0.9), table3_rate()};
  const StudyDesign designs[] = {StudyDesign::design1(1.0),
                                 StudyDesign::design2(0.5, 1.0, 0.0)};
  for (const auto& design : designs)
    for (const auto& rate : rates)
      for (double delta : {0.0, 0.15, 0.25, 0.35}) {
        const DropoutModel dropout(delta);
        const auto closed = exposure_moments(design, dropout, rate);
        CHECK(closed.method == MomentMethod::closed_form);
        const auto quad = moments_by_quadrature(design, dropout, rate);
        CHECK(std::fabs(closed.e_moment - quad.e) <= 1e-8 * quad.e);
        CHECK(std::fabs(closed.f_moment - quad.f) <= 1e-8 * quad.f);
        CHECK(closed.f_moment <=
              rate.cumulative(design.horizon()) * closed.e_moment + 1e-12);
      }
}

TEST_CASE("design 2 with nonzero eta runs the quadrature path") {
  const StudyDesign d = StudyDesign::design2(0.5, 1.0, 1.5);
  const DropoutModel quarter(0.25);
  for (const RateFunction& rate : {RateFunction::weibull(1.1, 1.2), table3_rate()}) {
    const auto m = exposure_moments(d, quarter, rate);
    CHECK(m.method == MomentMethod::quadrature);
    const auto quad = moments_by_quadrature(d, quarter, rate);
    CHECK(std::fabs(m.e_moment - quad.e) <= 1e-8 * quad.e);
    CHECK(std::fabs(m.f_moment - quad.f) <= 1e-8 * quad.f);
  }
}

TEST_CASE("design 1 is the vanishing-accrual limit of design 2") {
  const DropoutModel quarter(0.25);
  for (const RateFunction& rate : {RateFunction::weibull(1.1, 1.2), table3_rate()}) {
    const auto lim = exposure_moments(StudyDesign::design2(1e-8, 1.0, 0.0), quarter, rate);
    const auto d1 = exposure_moments(StudyDesign::design1(1.0), quarter, rate);
    CHECK(std::fabs(lim.e_moment - d1.e_moment) <= 1e-6 * d1.e_moment);
    CHECK(std::fabs(lim.f_moment - d1.f_moment) <= 1e-6 * d1.f_moment);
  }
}

TEST_CASE("G functions: the tiny-delta branch meets the delta=0 branch") {
  // exercised through the piecewise moments, which are linear in G_{k0..2}
  const RateFunction rate = table3_rate();
  for (const auto& design :
       {StudyDesign::design1(1.0), StudyDesign::design2(0.5, 1.0, 0.0)}) {
    const auto at_zero = exposure_moments(design, DropoutModel(0.0), rate);
    const auto tiny = exposure_moments(design, DropoutModel(1e-10), rate);
    CHECK(std::fabs(tiny.e_moment - at_zero.e_moment) <= 1e-6 * at_zero.e_moment);
    CHECK(std::fabs(tiny.f_moment - at_zero.f_moment) <= 1e-6 * at_zero.f_moment);
  }
}

TEST_CASE("moments decrease as dropout grows") {
  const RateFunction rate = RateFunction::weibull(1.1, 1.2);
  for (const auto& design :
       {StudyDesign::design1(1.0), StudyDesign::design2(0.5, 1.0, 0.0)}) {
    double prev_e = 1e300, prev_f = 1e300;
    for (double delta : {0.0, 0.1, 0.2, 0.3, 0.5}) {
      const auto m = exposure_moments(design, DropoutModel(delta), rate);
      CHECK(m.e_moment < prev_e);
      CHECK(m.f_moment < prev_f);
      prev_e = m.e_moment;
      prev_f = m.f_moment;
    }
  }
}
