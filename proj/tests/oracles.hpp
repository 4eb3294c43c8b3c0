#pragma once

// Test-only reference implementations, deliberately independent of the paths
// they check: a series-based normal CDF, adaptive Simpson quadrature, and a
// naive O(n * events) evaluation of the Andersen-Gill partial-likelihood
// quantities with risk sets recomputed from scratch at every event time.

#include <functional>
#include <vector>

namespace oracles {

// Phi via the everywhere-positive series 0.5 + pdf(x) * sum x^(2k+1)/(2k+1)!!
// for x >= 0, complement below 0. Absolute error well under 1e-13.
double norm_cdf_series(double x);

// Recursive adaptive Simpson with absolute tolerance.
double simpson(const std::function<double(double)>& f, double a, double b,
               double abs_tol);

struct NaiveAgResult {
  double logpl = 0.0;
  double score = 0.0;
  double info_n = 0.0;  // n * model information
  double sigma = 0.0;   // mean squared score residual
  double info_dlambda_n = 0.0;  // info evaluated through the baseline-increment form
  std::vector<double> u;  // per-subject score residuals
  std::vector<double> baseline_times;
  std::vector<double> baseline_cum;
};

NaiveAgResult naive_ag(const std::vector<int>& arm,
                       const std::vector<double>& follow_up,
                       const std::vector<std::vector<double>>& events, double beta);

}  // namespace oracles
