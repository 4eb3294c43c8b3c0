#pragma once

#include <string>
#include <vector>

#include "agdesign/ag_fit.hpp"

namespace agdesign {

struct SimulationResult {
  long replicates = 0;
  long rejections = 0;
  double empirical_power = 0.0;  // rejections / replicates
  double mc_stderr = 0.0;        // sqrt(p(1-p)/replicates)
  long degenerate_count = 0;
  double wall_seconds = 0.0;
};

// Monte Carlo rejection rate of the robust Wald test: simulate, fit, decide,
// once per replicate. Replicate r draws from stream (master_seed, r), so the
// result is identical for any thread count. threads <= 0 selects the hardware
// concurrency. Degenerate fits are counted and never rejected.
SimulationResult empirical_power(const TrialScenario& sc, const Hypothesis& hyp,
                                 long n_total, long replicates,
                                 std::uint64_t master_seed, int threads = 0);

// One row of a reference design table.
struct TableRow {
  int table_id = 0;
  std::string block;  // balanced / unbalanced / unequal_dispersion / unequal_dropout / ni / equivalence
  int design = 1;
  std::string rate_family;  // weibull or piecewise
  double psi = 0.0, nu = 0.0;
  double kappa0 = 0.0, kappa1 = 0.0;
  double dropout0 = 0.0, dropout1 = 0.0;
  double rate_ratio = 0.0;
  double p1 = 0.5;
  double target_power = 0.0;
  long total_n = 0;
  double raw_n = 0.0;
  double nominal_power = 0.0;
  double simulated_power = -1.0;  // < 0 when simulation skipped
  double sim_stderr = -1.0;
  long sim_replicates = 0;
};

// Recomputes every row of the built-in design tables:
//   1 - superiority grid (Weibull rates, both designs, 1:1 and 2:1),
//   2 - unequal dispersion / unequal dropout grids,
//   3 - noninferiority and equivalence grids (piecewise rates).
// replicates > 0 adds a simulated-power column (seeded per row from `seed`).
std::vector<TableRow> reproduce_table(int table_id, long replicates,
                                      std::uint64_t seed, int threads = 0);

// Rebuild the scenario/hypothesis a table row describes (to rerun or inspect).
TrialScenario table_row_scenario(const TableRow& row);
Hypothesis table_row_hypothesis(const TableRow& row);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Deterministic internal consistency suite: closed forms against quadrature,
// variance-path reductions, design limits, inverse roundtrips, simulator
// determinism, fitter identities. Runs in a few seconds.
std::vector<CheckResult> run_self_checks();

}  // namespace agdesign
