#include "agdesign/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace agdesign {

TrialScenario::TrialScenario(StudyDesign design, RateFunction control_rate,
                             double rate_ratio, double p1, double kappa0, double kappa1,
                             DropoutModel dropout0, DropoutModel dropout1)
    : design_(design),
      control_rate_(std::move(control_rate)),
      rate_ratio_(rate_ratio),
      log_ratio_(std::log(rate_ratio)),
      p1_(p1),
      kappa0_(kappa0),
      kappa1_(kappa1),
      dropout0_(dropout0),
      dropout1_(dropout1) {
  if (!(rate_ratio > 0.0) || !std::isfinite(rate_ratio))
    throw DomainError("TrialScenario: rate_ratio must be positive and finite");
  if (!(p1 > 0.0 && p1 < 1.0))
    throw DomainError("TrialScenario: allocation p1 must lie strictly inside (0,1)");
  if (!(kappa0 >= 0.0) || !(kappa1 >= 0.0))
    throw DomainError("TrialScenario: dispersion parameters must be >= 0");
}

ArmModel TrialScenario::arm(int g) const {
  if (g == 0) return {kappa0_, dropout0_, control_rate_};
  return {kappa1_, dropout1_, treatment_rate()};
}

std::uint64_t scenario_fingerprint(const TrialScenario& sc) {
  std::string text;
  char buf[40];
  const auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g;", v);
    text += buf;
  };
  const auto& d = sc.design();
  text += d.staggered_entry() ? "design2;" : "design1;";
  put(d.tau_a());
  put(d.tau_c());
  put(d.eta());
  const auto& r = sc.control_rate();
  if (r.is_weibull()) {
    text += "weibull;";
    put(r.psi());
    put(r.nu());
  } else {
    text += "piecewise;";
    for (std::size_t i = 0; i < r.knots().size(); ++i) {
      put(r.knots()[i]);
      put(r.rates()[i]);
    }
  }
  put(sc.rate_ratio());
  put(sc.p1());
  put(sc.kappa(0));
  put(sc.kappa(1));
  put(sc.dropout(0).delta());
  put(sc.dropout(1).delta());

  // FNV-1a
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace agdesign
