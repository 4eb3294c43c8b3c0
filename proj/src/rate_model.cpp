#include "agdesign/rate_model.hpp"

#include <algorithm>
#include <cmath>

namespace agdesign {

RateFunction RateFunction::weibull(double psi, double nu) {
  if (!(psi > 0.0) || !(nu > 0.0))
    throw DomainError("RateFunction: weibull requires psi > 0 and nu > 0");
  RateFunction rf;
  rf.family_ = Family::weibull;
  rf.psi_ = psi;
  rf.nu_ = nu;
  return rf;
}

RateFunction RateFunction::piecewise_constant(std::vector<double> knots,
                                              std::vector<double> rates) {
  if (knots.empty() || knots.size() != rates.size())
    throw DomainError("RateFunction: knots and rates must be nonempty and equal length");
  double prev = 0.0;
  bool any_positive = false;
  for (std::size_t k = 0; k < knots.size(); ++k) {
    if (!(knots[k] > prev))
      throw DomainError("RateFunction: knots must be strictly increasing and positive");
    if (!(rates[k] >= 0.0))
      throw DomainError("RateFunction: rates must be >= 0");
    any_positive = any_positive || rates[k] > 0.0;
    prev = knots[k];
  }
  if (!any_positive) throw DomainError("RateFunction: at least one rate must be positive");
  RateFunction rf;
  rf.family_ = Family::piecewise_constant;
  rf.knots_ = std::move(knots);
  rf.rates_ = std::move(rates);
  rf.cum_.resize(rf.knots_.size());
  double lo = 0.0, acc = 0.0;
  for (std::size_t k = 0; k < rf.knots_.size(); ++k) {
    acc += rf.rates_[k] * (rf.knots_[k] - lo);
    rf.cum_[k] = acc;
    lo = rf.knots_[k];
  }
  return rf;
}

double RateFunction::psi() const {
  if (!is_weibull()) throw DomainError("RateFunction: psi() on piecewise function");
  return psi_;
}

double RateFunction::nu() const {
  if (!is_weibull()) throw DomainError("RateFunction: nu() on piecewise function");
  return nu_;
}

const std::vector<double>& RateFunction::knots() const {
  if (is_weibull()) throw DomainError("RateFunction: knots() on weibull function");
  return knots_;
}

const std::vector<double>& RateFunction::rates() const {
  if (is_weibull()) throw DomainError("RateFunction: rates() on weibull function");
  return rates_;
}

double RateFunction::cumulative(double t) const {
  if (!(t >= 0.0)) throw DomainError("RateFunction: cumulative requires t >= 0");
  if (t == 0.0) return 0.0;
  if (is_weibull()) return psi_ * std::pow(t, nu_);
  const auto it = std::lower_bound(knots_.begin(), knots_.end(), t);
  if (it == knots_.end())  // beyond last knot: extrapolate with final rate
    return cum_.back() + rates_.back() * (t - knots_.back());
  const std::size_t k = static_cast<std::size_t>(it - knots_.begin());
  const double left = k == 0 ? 0.0 : knots_[k - 1];
  const double base = k == 0 ? 0.0 : cum_[k - 1];
  return base + rates_[k] * (t - left);
}

double RateFunction::rate(double t) const {
  if (!(t >= 0.0)) throw DomainError("RateFunction: rate requires t >= 0");
  if (is_weibull()) return psi_ * nu_ * std::pow(t, nu_ - 1.0);
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  if (it == knots_.end()) return rates_.back();
  return rates_[static_cast<std::size_t>(it - knots_.begin())];
}

double RateFunction::inverse_cumulative(double u) const {
  if (!(u >= 0.0)) throw DomainError("RateFunction: inverse_cumulative requires u >= 0");
  if (u == 0.0) return 0.0;
  if (is_weibull()) return std::pow(u / psi_, 1.0 / nu_);
  const auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
  if (it == cum_.end()) {
    if (rates_.back() > 0.0)
      return knots_.back() + (u - cum_.back()) / rates_.back();
    throw DomainError("RateFunction: u beyond the supported cumulative range");
  }
  const std::size_t k = static_cast<std::size_t>(it - cum_.begin());
  const double base = k == 0 ? 0.0 : cum_[k - 1];
  const double left = k == 0 ? 0.0 : knots_[k - 1];
  if (rates_[k] > 0.0) return left + (u - base) / rates_[k];
  return left;  // flat stretch: deterministic left endpoint
}

RateFunction RateFunction::scaled(double c) const {
  if (!(c > 0.0)) throw DomainError("RateFunction: scale factor must be positive");
  if (is_weibull()) return weibull(c * psi_, nu_);
  std::vector<double> r = rates_;
  for (double& x : r) x *= c;
  return piecewise_constant(knots_, std::move(r));
}

RateFunction RateFunction::with_knot(double t) const {
  if (is_weibull()) return *this;
  if (!(t > 0.0)) throw DomainError("RateFunction: knot must be positive");
  std::vector<double> k = knots_, r = rates_;
  const auto it = std::lower_bound(k.begin(), k.end(), t);
  if (it != k.end() && *it == t) return *this;
  if (it == k.end()) {  // explicit extrapolation segment
    k.push_back(t);
    r.push_back(r.back());
  } else {
    const std::size_t pos = static_cast<std::size_t>(it - k.begin());
    k.insert(k.begin() + static_cast<std::ptrdiff_t>(pos), t);
    r.insert(r.begin() + static_cast<std::ptrdiff_t>(pos), r[pos]);
  }
  return piecewise_constant(std::move(k), std::move(r));
}

std::vector<double> RateFunction::interior_breaks(double lo, double hi) const {
  std::vector<double> out;
  if (is_weibull()) return out;
  for (double k : knots_)
    if (k > lo && k < hi) out.push_back(k);
  return out;
}

}  // namespace agdesign
