#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>

#include "agdesign/numerics.hpp"
#include "agdesign/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace agdesign;

TEST_CASE("norm_cdf basic values") {
  CHECK(num::norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::fabs(num::norm_cdf(40.0) - 1.0) < 1e-15);
  CHECK(num::norm_cdf(1.959964) == doctest::Approx(0.975).epsilon(1e-6));
  CHECK_THROWS_AS(num::norm_cdf(std::numeric_limits<double>::quiet_NaN()), DomainError);
  CHECK_THROWS_AS(num::norm_cdf(std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("norm_cdf against the series oracle") {
  for (double x = -8.0; x <= 8.0; x += 0.173)
    CHECK(std::fabs(num::norm_cdf(x) - oracles::norm_cdf_series(x)) < 1e-12);
  CHECK(num::norm_cdf(1.0) > num::norm_cdf(0.999));  // monotone spot check
}

TEST_CASE("norm_quantile values and symmetry") {
  CHECK(num::norm_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(num::norm_quantile(0.975) == doctest::Approx(1.95996398).epsilon(1e-7));
  for (double p : {0.01, 0.1, 0.2, 0.37, 0.45})
    CHECK(std::fabs(num::norm_quantile(p) + num::norm_quantile(1.0 - p)) < 1e-12);
  CHECK_THROWS_AS(num::norm_quantile(0.0), DomainError);
  CHECK_THROWS_AS(num::norm_quantile(1.0), DomainError);
  CHECK_THROWS_AS(num::norm_quantile(-0.2), DomainError);
}

TEST_CASE("norm_cdf and norm_quantile are inverses") {
  for (double p : {1e-8, 1e-6, 1e-4, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.9999,
                   1.0 - 1e-6, 1.0 - 1e-8})
    CHECK(std::fabs(num::norm_cdf(num::norm_quantile(p)) - p) < 1e-10);
}

TEST_CASE("inc_gamma_lower") {
  for (double a : {0.1, 0.5, 1.0, 3.0})
    CHECK(num::inc_gamma_lower(1.0, a) == doctest::Approx(1.0 - std::exp(-a)).epsilon(1e-13));
  CHECK(num::inc_gamma_lower(2.7, 0.0) == 0.0);
  const double quad = oracles::simpson(
      [](double t) { return std::pow(t, 0.2) * std::exp(-t); }, 0.0, 0.25, 1e-14);
  CHECK(std::fabs(num::inc_gamma_lower(1.2, 0.25) - quad) < 1e-10);
  // bounded by the complete gamma and nondecreasing in a
  CHECK(num::inc_gamma_lower(2.4, 50.0) == doctest::Approx(std::tgamma(2.4)).epsilon(1e-12));
  CHECK(num::inc_gamma_lower(2.4, 0.5) < num::inc_gamma_lower(2.4, 0.6));
  CHECK_THROWS_AS(num::inc_gamma_lower(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(num::inc_gamma_lower(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(num::inc_gamma_lower(1.0, -0.5), DomainError);
}

TEST_CASE("inc_gamma_between") {
  CHECK(num::inc_gamma_between(2.4, 0.375, 0.375) == 0.0);
  CHECK(num::inc_gamma_between(1.7, 0.8, 0.0) ==
        doctest::Approx(num::inc_gamma_lower(1.7, 0.8)).epsilon(1e-14));
  const double quad = oracles::simpson(
      [](double t) { return std::pow(t, 1.4) * std::exp(-t); }, 0.25, 0.375, 1e-14);
  CHECK(std::fabs(num::inc_gamma_between(2.4, 0.375, 0.25) - quad) < 1e-10);
  CHECK_THROWS_AS(num::inc_gamma_between(1.0, 0.25, 0.375), DomainError);
}

TEST_CASE("inc_gamma_between additivity") {
  for (double nu : {0.9, 1.2, 2.4, 3.4})
    for (double c : {0.0, 0.1, 0.3}) {
      const double b = c + 0.17, a = b + 0.21;
      const double lhs = num::inc_gamma_between(nu, a, b) + num::inc_gamma_between(nu, b, c);
      const double rhs = num::inc_gamma_between(nu, a, c);
      CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::fabs(rhs));
    }
}

TEST_CASE("integrate: polynomials and constants") {
  CHECK(num::integrate([](double) { return 3.25; }, 0.0, 1.0) ==
        doctest::Approx(3.25).epsilon(1e-14));
  CHECK(std::fabs(num::integrate([](double t) { return 2.0 * t; }, 0.0, 1.0) - 1.0) <
        1e-12);
  // exact for polynomial degree up to the embedded Gauss rule's 13
  const double got =
      num::integrate([](double t) { return std::pow(t, 13.0); }, 0.0, 2.0);
  CHECK(std::fabs(got - std::pow(2.0, 14.0) / 14.0) <= 1e-13 * std::pow(2.0, 14.0) / 14.0);
  CHECK(num::integrate([](double t) { return t; }, 0.5, 0.5) == 0.0);
}

TEST_CASE("integrate matches the incomplete-gamma closed form") {
  // exp(-0.25 t) * 1.32 * t^0.2 over [0,1] = (psi nu / delta^nu) IG(nu, delta tau_c)
  const double closed = 1.1 * 1.2 / std::pow(0.25, 1.2) * num::inc_gamma_lower(1.2, 0.25);
  const double got = num::integrate(
      [](double t) { return std::exp(-0.25 * t) * 1.32 * std::pow(t, 0.2); }, 0.0, 1.0);
  CHECK(std::fabs(got - closed) < 1e-9);
  CHECK(closed == doctest::Approx(0.9621118163828962).epsilon(1e-12));
}

TEST_CASE("integrate: break points and kinks") {
  const auto f = [](double t) { return std::fabs(t - 0.5); };
  const double breaks[] = {0.5};
  CHECK(std::fabs(num::integrate(f, 0.0, 1.0, {}, breaks) - 0.25) < 1e-13);
}

TEST_CASE("integrate: endpoint singularity") {
  // t^(-0.1) is integrable; the rule never samples the endpoint
  const double got = num::integrate([](double t) { return std::pow(t, -0.1); }, 0.0, 1.0);
  CHECK(std::fabs(got - 1.0 / 0.9) < 1e-9);
}

TEST_CASE("integrate: non-convergence carries the best estimate") {
  const num::Quadrature q{1e-16, 1e-16, 1};
  try {
    num::integrate([](double t) { return std::exp(t); }, 0.0, 10.0, q);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::fabs(e.best_estimate() - (std::exp(10.0) - 1.0)) <
          1e-4 * std::exp(10.0));
  }
  CHECK_THROWS_AS(num::integrate([](double) { return 1.0; }, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(
      num::integrate([](double) { return 1.0; }, 0.0, 1.0, num::Quadrature{0.0, 1e-10, 5}),
      DomainError);
}

TEST_CASE("invert_monotone") {
  const auto identity = [](double x) { return x; };
  CHECK(num::invert_monotone(identity, 0.3, 0.0, 1.0) == doctest::Approx(0.3).epsilon(1e-12));
  const double z = num::invert_monotone([](double x) { return num::norm_cdf(x); }, 0.975,
                                        -10.0, 10.0);
  CHECK(std::fabs(z - 1.959963985) < 1e-6);
  const auto f = [](double x) { return x * x; };
  CHECK(num::invert_monotone(f, 4.0, 2.0, 5.0) == 2.0);  // target at the bracket edge
  CHECK_THROWS_AS(num::invert_monotone(identity, 2.0, 0.0, 1.0), NumericError);
}

TEST_CASE("rng: bitwise reproducibility and stream separation") {
  num::RngStream a(42, 7), b(42, 7), c(42, 8);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u64();
    all_equal = all_equal && (x == b.next_u64());
    any_diff = any_diff || (x != c.next_u64());
  }
  CHECK(all_equal);
  CHECK(any_diff);

  num::RngStream parent(42, 7);
  num::RngStream s1 = parent.substream(3), s2 = num::RngStream(42, 7).substream(3);
  CHECK(s1.next_u64() == s2.next_u64());
  CHECK(num::derive_seed(1, 2) != num::derive_seed(2, 1));
}

TEST_CASE("rng: uniform stays strictly inside (0,1)") {
  num::RngStream s(123, 0);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double u = s.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(lo < 1e-4);  // actually explores the range
  CHECK(hi > 1.0 - 1e-4);
}

TEST_CASE("rng: exponential moments") {
  num::RngStream s(2024, 1);
  const int n = 1000000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += s.exponential(0.25);
  const double mean = sum / n;
  CHECK(std::fabs(mean - 4.0) < 3.0 * 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK_THROWS_AS(s.exponential(0.0), DomainError);
}

TEST_CASE("rng: gamma frailty moments (mean 1, variance kappa)") {
  num::RngStream s(2024, 2);
  const int n = 1000000;
  const double kappa = 0.8;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = s.gamma(1.0 / kappa, kappa);
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  // sd(mean) = sqrt(kappa/n); sd(var) from the gamma's fourth moment
  CHECK(std::fabs(mean - 1.0) < 3.0 * std::sqrt(kappa / n));
  CHECK(std::fabs(var - kappa) < 4.0 * 0.0021);
  CHECK_THROWS_AS(s.gamma(0.0, 1.0), DomainError);
}

TEST_CASE("rng: gamma with shape below one") {
  num::RngStream s(2024, 5);
  const int n = 500000;
  const double shape = 0.5, scale = 2.0;
  double sum = 0.0, sum2 = 0.0;
  bool all_positive = true;
  for (int i = 0; i < n; ++i) {
    const double x = s.gamma(shape, scale);
    all_positive = all_positive && x > 0.0;
    sum += x;
    sum2 += x * x;
  }
  CHECK(all_positive);
  const double mean = sum / n;
  CHECK(std::fabs(mean - shape * scale) < 4.0 * std::sqrt(shape) * scale / std::sqrt(n));
  CHECK(std::fabs(sum2 / n - mean * mean - shape * scale * scale) < 0.05);
}

TEST_CASE("rng: poisson") {
  num::RngStream s(2024, 3);
  for (int i = 0; i < 1000; ++i) CHECK(s.poisson(0.0) == 0);

  // small-mean sampler
  const int n = 1000000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(s.poisson(4.0));
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::fabs(sum / n - 4.0) < 3.0 * 2.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::fabs(sum2 / n - sum / n * sum / n - 4.0) < 0.05);

  // large-mean sampler (transformed rejection)
  sum = sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(s.poisson(50.0));
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::fabs(sum / n - 50.0) < 3.0 * std::sqrt(50.0 / n));
  // sd of the sample variance: sqrt((mu4 - sigma^4)/n) with mu4 = lam + 3 lam^2
  CHECK(std::fabs(sum2 / n - sum / n * sum / n - 50.0) < 4.0 * 0.0711);
  CHECK_THROWS_AS(s.poisson(-1.0), DomainError);
}

TEST_CASE("rng: normal moments") {
  num::RngStream s(2024, 4);
  const int n = 1000000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = s.normal();
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::fabs(sum / n) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::fabs(sum2 / n - 1.0) < 3.0 * std::sqrt(2.0 / n));
}
