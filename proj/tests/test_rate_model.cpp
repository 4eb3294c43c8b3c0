#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "agdesign/numerics.hpp"
#include "agdesign/rate_model.hpp"
#include "doctest.h"

using namespace agdesign;

namespace {
RateFunction table3_rate() {
  return RateFunction::piecewise_constant({0.4, 0.8, 1.0}, {1.0, 1.25, 1.5});
}
}  // namespace

TEST_CASE("construction validation") {
  CHECK_THROWS_AS(RateFunction::weibull(0.0, 1.2), DomainError);
  CHECK_THROWS_AS(RateFunction::weibull(1.1, -1.0), DomainError);
  CHECK_THROWS_AS(RateFunction::piecewise_constant({0.4, 0.4}, {1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(RateFunction::piecewise_constant({0.4, 0.8}, {1.0}), DomainError);
  CHECK_THROWS_AS(RateFunction::piecewise_constant({0.4}, {-1.0}), DomainError);
  CHECK_THROWS_AS(RateFunction::piecewise_constant({0.4, 0.8}, {0.0, 0.0}), DomainError);
}

TEST_CASE("cumulative") {
  const RateFunction w = RateFunction::weibull(1.1, 1.2);
  CHECK(w.cumulative(1.0) == doctest::Approx(1.1).epsilon(1e-14));
  CHECK(w.cumulative(0.0) == 0.0);
  const RateFunction p = table3_rate();
  CHECK(p.cumulative(1.0) == doctest::Approx(1.2).epsilon(1e-14));  // 0.4 + 0.5 + 0.3
  CHECK(p.cumulative(0.0) == 0.0);
  CHECK(p.cumulative(0.4) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(p.cumulative(0.6) == doctest::Approx(0.65).epsilon(1e-14));
  // beyond the last knot: extrapolates with the final rate
  CHECK(p.cumulative(1.5) == doctest::Approx(1.2 + 1.5 * 0.5).epsilon(1e-14));
  CHECK_THROWS_AS(p.cumulative(-0.1), DomainError);
}

TEST_CASE("rate") {
  const RateFunction exp_like = RateFunction::weibull(0.7, 1.0);
  for (double t : {0.0, 0.3, 1.0, 2.0})
    CHECK(exp_like.rate(t) == doctest::Approx(0.7).epsilon(1e-14));
  const RateFunction w = RateFunction::weibull(1.1, 1.2);
  CHECK(w.rate(1.0) == doctest::Approx(1.32).epsilon(1e-14));
  const RateFunction p = table3_rate();
  CHECK(p.rate(0.5) == 1.25);
  CHECK(p.rate(0.4) == 1.25);   // right-continuous
  CHECK(p.rate(0.39999) == 1.0);
  CHECK(p.rate(1.0) == 1.5);
  CHECK(p.rate(2.0) == 1.5);    // extrapolation
  CHECK_THROWS_AS(p.rate(-1e-9), DomainError);
}

TEST_CASE("inverse_cumulative") {
  const RateFunction w = RateFunction::weibull(1.1, 1.2);
  CHECK(w.inverse_cumulative(0.0) == 0.0);
  CHECK(w.inverse_cumulative(1.1) == doctest::Approx(1.0).epsilon(1e-14));
  const RateFunction p = table3_rate();
  CHECK(p.inverse_cumulative(0.6) == doctest::Approx(0.56).epsilon(1e-14));
  CHECK_THROWS_AS(p.inverse_cumulative(-0.5), DomainError);

  // flat stretch maps to its left endpoint
  const RateFunction flat =
      RateFunction::piecewise_constant({0.5, 1.0, 1.5}, {2.0, 0.0, 1.0});
  CHECK(flat.inverse_cumulative(1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(flat.inverse_cumulative(1.2) == doctest::Approx(1.2).epsilon(1e-13));
  // zero final rate cannot extrapolate
  const RateFunction capped = RateFunction::piecewise_constant({0.5, 1.0}, {2.0, 0.0});
  CHECK_THROWS_AS(capped.inverse_cumulative(1.5), DomainError);
}

TEST_CASE("roundtrip inverse-of-cumulative") {
  const RateFunction fns[] = {RateFunction::weibull(1.1, 1.2),
                              RateFunction::weibull(1.5, 0.9), table3_rate()};
  for (const auto& rf : fns)
    for (double t = 0.02; t <= 1.0; t += 0.037)
      CHECK(std::fabs(rf.inverse_cumulative(rf.cumulative(t)) - t) < 1e-10);
}

TEST_CASE("cumulative equals the integrated rate") {
  const RateFunction fns[] = {RateFunction::weibull(1.1, 1.2),
                              RateFunction::weibull(1.5, 0.9),
                              RateFunction::weibull(0.8, 2.3), table3_rate()};
  for (const auto& rf : fns)
    for (double t : {0.3, 0.7, 1.0}) {
      const auto breaks = rf.interior_breaks(0.0, t);
      const double got =
          num::integrate([&](double s) { return rf.rate(s); }, 0.0, t, {}, breaks);
      CHECK(std::fabs(got - rf.cumulative(t)) < 1e-8);
    }
}

TEST_CASE("scale") {
  const RateFunction w = RateFunction::weibull(1.1, 1.2);
  const RateFunction same = w.scaled(1.0);
  for (double t : {0.2, 0.9}) CHECK(same.cumulative(t) == w.cumulative(t));

  const RateFunction scaled = w.scaled(0.6);
  CHECK(scaled.psi() == doctest::Approx(0.66).epsilon(1e-14));
  CHECK(scaled.nu() == 1.2);

  const RateFunction p = table3_rate().scaled(0.6);
  CHECK(p.cumulative(1.0) == doctest::Approx(0.72).epsilon(1e-14));
  CHECK(p.knots() == table3_rate().knots());
  for (double t : {0.1, 0.5, 0.95})
    CHECK(p.cumulative(t) / table3_rate().cumulative(t) ==
          doctest::Approx(0.6).epsilon(1e-14));
  CHECK_THROWS_AS(w.scaled(0.0), DomainError);
  CHECK_THROWS_AS(w.scaled(-2.0), DomainError);
}

TEST_CASE("with_knot preserves the function") {
  const RateFunction p = table3_rate();
  const RateFunction q = p.with_knot(0.6).with_knot(1.3);
  CHECK(q.knots().size() == 5);  // 0.4, 0.6, 0.8, 1.0, 1.3
  for (double t = 0.0; t <= 1.6; t += 0.07)
    CHECK(q.cumulative(t) == doctest::Approx(p.cumulative(t)).epsilon(1e-14));
  CHECK(p.with_knot(0.8).knots().size() == 3);  // existing knot: unchanged
  const RateFunction w = RateFunction::weibull(1.0, 1.0);
  CHECK(w.with_knot(0.5).is_weibull());
}

TEST_CASE("interior breaks") {
  const auto breaks = table3_rate().interior_breaks(0.0, 1.0);
  REQUIRE(breaks.size() == 2);
  CHECK(breaks[0] == 0.4);
  CHECK(breaks[1] == 0.8);
  CHECK(RateFunction::weibull(1.0, 2.0).interior_breaks(0.0, 1.0).empty());
}
