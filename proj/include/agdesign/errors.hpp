#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace agdesign {

// Invalid argument, configuration, or precondition violation.
// Maps to AGD_STATUS_VALIDATION at the C boundary.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failure: non-convergence, bracket failure, degenerate scenario.
// Carries the best estimate obtained so far when one exists.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg,
                        double best_estimate = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(msg), best_estimate_(best_estimate) {}
  double best_estimate() const { return best_estimate_; }

 private:
  double best_estimate_;
};

}  // namespace agdesign
