#include "agdesign/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <thread>

#include "agdesign/numerics.hpp"

namespace agdesign {

SimulationResult empirical_power(const TrialScenario& sc, const Hypothesis& hyp,
                                 long n_total, long replicates,
                                 std::uint64_t master_seed, int threads) {
  if (replicates < 1) throw DomainError("empirical_power: replicates must be >= 1");
  if (n_total < 2) throw DomainError("empirical_power: n_total must be >= 2");
  const Direction direction = test_direction(sc, hyp);

  unsigned n_workers = threads > 0 ? static_cast<unsigned>(threads)
                                   : std::max(1u, std::thread::hardware_concurrency());
  n_workers = static_cast<unsigned>(
      std::min<long>(replicates, static_cast<long>(n_workers)));

  std::vector<std::uint8_t> rejected(static_cast<std::size_t>(replicates), 0);
  std::vector<std::uint8_t> degenerate(static_cast<std::size_t>(replicates), 0);
  std::exception_ptr failure;
  std::atomic<bool> failed{false};

  const auto started = std::chrono::steady_clock::now();
  const auto worker = [&](unsigned w) {
    try {
      for (long r = static_cast<long>(w); r < replicates;
           r += static_cast<long>(n_workers)) {
        if (failed.load(std::memory_order_relaxed)) return;
        const TrialData data = simulate_trial(sc, n_total, master_seed,
                                              static_cast<std::uint64_t>(r));
        try {
          const AgFit fit = ag_fit(data, hyp.alpha());
          if (fit.degenerate) degenerate[static_cast<std::size_t>(r)] = 1;
          rejected[static_cast<std::size_t>(r)] =
              ag_decide(fit, hyp, direction) ? 1 : 0;
        } catch (const NumericError&) {  // e.g. zero pooled events
          degenerate[static_cast<std::size_t>(r)] = 1;
        }
      }
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };

  if (n_workers == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  SimulationResult out;
  out.replicates = replicates;
  for (long r = 0; r < replicates; ++r) {  // integer reduce: order-independent
    out.rejections += rejected[static_cast<std::size_t>(r)];
    out.degenerate_count += degenerate[static_cast<std::size_t>(r)];
  }
  out.empirical_power =
      static_cast<double>(out.rejections) / static_cast<double>(out.replicates);
  out.mc_stderr = std::sqrt(out.empirical_power * (1.0 - out.empirical_power) /
                            static_cast<double>(out.replicates));
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

TrialScenario table_row_scenario(const TableRow& row) {
  const StudyDesign design = row.design == 2 ? StudyDesign::design2(0.5, 1.0, 0.0)
                                             : StudyDesign::design1(1.0);
  const RateFunction rate =
      row.rate_family == "weibull"
          ? RateFunction::weibull(row.psi, row.nu)
          : RateFunction::piecewise_constant({0.4, 0.8, 1.0}, {1.0, 1.25, 1.5});
  return TrialScenario(design, rate, row.rate_ratio, row.p1, row.kappa0,
                       row.kappa1, DropoutModel(row.dropout0), DropoutModel(row.dropout1));
}

Hypothesis table_row_hypothesis(const TableRow& row) {
  if (row.block == "ni") return Hypothesis::noninferiority(1.25);
  if (row.block == "equivalence") return Hypothesis::equivalence(0.75, 1.25);
  return Hypothesis::superiority();
}

namespace {

void finish_row(TableRow& row, long replicates, std::uint64_t seed,
                std::uint64_t row_index, int threads) {
  const TrialScenario sc = table_row_scenario(row);
  const Hypothesis hyp = table_row_hypothesis(row);
  const SizeResult size = size_for(sc, hyp, row.target_power);
  row.total_n = size.total_n;
  row.raw_n = size.raw_n;
  row.nominal_power = size.nominal_power;
  if (replicates > 0) {
    const SimulationResult sim =
        empirical_power(sc, hyp, size.total_n, replicates,
                        num::derive_seed(seed, row_index), threads);
    row.simulated_power = sim.empirical_power;
    row.sim_stderr = sim.mc_stderr;
    row.sim_replicates = sim.replicates;
  }
}

std::vector<TableRow> table1(long replicates, std::uint64_t seed, int threads) {
  const double kappas[] = {0.4, 0.8, 1.2};
  const double psis[] = {1.1, 1.5};
  const double nus[] = {0.9, 1.2};
  std::vector<TableRow> rows;
  std::uint64_t idx = 0;
  for (double kappa : kappas)
    for (double psi : psis)
      for (double nu : nus)
        for (int design : {1, 2})
          for (double p1 : {0.5, 2.0 / 3.0}) {
            TableRow row;
            row.table_id = 1;
            row.block = p1 == 0.5 ? "balanced" : "unbalanced";
            row.design = design;
            row.rate_family = "weibull";
            row.psi = psi;
            row.nu = nu;
            row.kappa0 = row.kappa1 = kappa;
            row.dropout0 = row.dropout1 = 0.25;
            row.rate_ratio = 0.6;
            row.p1 = p1;
            row.target_power = 0.9;
            finish_row(row, replicates, seed, idx++, threads);
            rows.push_back(std::move(row));
          }
  return rows;
}

std::vector<TableRow> table2(long replicates, std::uint64_t seed, int threads) {
  const std::pair<double, double> shapes[] = {{1.1, 0.9}, {1.1, 1.2}, {1.5, 0.9}, {1.5, 1.2}};
  const std::pair<double, double> dispersion_pairs[] = {{0.4, 0.8}, {0.4, 1.2}, {0.8, 1.2}};
  const double dropout_kappas[] = {0.4, 0.8, 1.2};
  std::vector<TableRow> rows;
  std::uint64_t idx = 0;
  for (auto [psi, nu] : shapes)
    for (auto [k0, k1] : dispersion_pairs)
      for (int design : {1, 2}) {
        TableRow row;
        row.table_id = 2;
        row.block = "unequal_dispersion";
        row.design = design;
        row.rate_family = "weibull";
        row.psi = psi;
        row.nu = nu;
        row.kappa0 = k0;
        row.kappa1 = k1;
        row.dropout0 = row.dropout1 = 0.25;
        row.rate_ratio = 0.6;
        row.p1 = 0.5;
        row.target_power = 0.9;
        finish_row(row, replicates, seed, idx++, threads);
        rows.push_back(std::move(row));
      }
  for (auto [psi, nu] : shapes)
    for (double kappa : dropout_kappas)
      for (int design : {1, 2}) {
        TableRow row;
        row.table_id = 2;
        row.block = "unequal_dropout";
        row.design = design;
        row.rate_family = "weibull";
        row.psi = psi;
        row.nu = nu;
        row.kappa0 = row.kappa1 = kappa;
        row.dropout0 = 0.35;  // control drops out faster
        row.dropout1 = 0.15;
        row.rate_ratio = 0.6;
        row.p1 = 0.5;
        row.target_power = 0.9;
        finish_row(row, replicates, seed, idx++, threads);
        rows.push_back(std::move(row));
      }
  return rows;
}

std::vector<TableRow> table3(long replicates, std::uint64_t seed, int threads) {
  std::vector<TableRow> rows;
  std::uint64_t idx = 0;
  for (const char* block : {"ni", "equivalence"})
    for (double kappa : {0.8, 1.2})
      for (double ratio : {0.9, 1.0}) {
        TableRow row;
        row.table_id = 3;
        row.block = block;
        row.design = 1;
        row.rate_family = "piecewise";
        row.kappa0 = row.kappa1 = kappa;
        row.dropout0 = row.dropout1 = 0.25;
        row.rate_ratio = ratio;
        row.p1 = 0.5;
        row.target_power = 0.8;
        finish_row(row, replicates, seed, idx++, threads);
        rows.push_back(std::move(row));
      }
  return rows;
}

}  // namespace

std::vector<TableRow> reproduce_table(int table_id, long replicates, std::uint64_t seed,
                                      int threads) {
  switch (table_id) {
    case 1: return table1(replicates, seed, threads);
    case 2: return table2(replicates, seed, threads);
    case 3: return table3(replicates, seed, threads);
    default: throw DomainError("reproduce_table: table_id must be 1, 2 or 3");
  }
}

// ---------------------------------------------------------------------------
// self checks

namespace {

std::string format_detail(double observed, double bound) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "observed %.3e (bound %.3e)", observed, bound);
  return buf;
}

void check_bound(std::vector<CheckResult>& out, const std::string& name, double observed,
                 double bound) {
  out.push_back({name, observed <= bound, format_detail(observed, bound)});
}

double rel_err(double got, double want) {
  return std::fabs(got - want) / std::max(1e-300, std::fabs(want));
}

TrialScenario grid_scenario(int design, bool weibull, double delta0, double delta1) {
  const StudyDesign d =
      design == 2 ? StudyDesign::design2(0.5, 1.0, 0.0) : StudyDesign::design1(1.0);
  const RateFunction r =
      weibull ? RateFunction::weibull(1.1, 1.2)
              : RateFunction::piecewise_constant({0.4, 0.8, 1.0}, {1.0, 1.25, 1.5});
  return TrialScenario(d, r, 0.6, 0.5, 0.8, 0.8, DropoutModel(delta0),
                       DropoutModel(delta1));
}

}  // namespace

std::vector<CheckResult> run_self_checks() {
  std::vector<CheckResult> out;

  {  // normal CDF / quantile inverse roundtrip
    double worst = 0.0;
    for (double p : {1e-8, 1e-5, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.975, 0.99999,
                     1.0 - 1e-8})
      worst = std::max(worst, std::fabs(num::norm_cdf(num::norm_quantile(p)) - p));
    check_bound(out, "normal quantile roundtrip", worst, 1e-10);
  }
  {  // incomplete gamma additivity
    double worst = 0.0;
    for (double nu : {0.9, 1.2, 2.4})
      for (double c : {0.0, 0.125, 0.25}) {
        const double b = c + 0.125, a = b + 0.25;
        const double lhs =
            num::inc_gamma_between(nu, a, b) + num::inc_gamma_between(nu, b, c);
        worst = std::max(worst, rel_err(lhs, num::inc_gamma_between(nu, a, c)));
      }
    check_bound(out, "incomplete gamma additivity", worst, 1e-12);
  }
  {  // quadrature against a closed form with an interior kink
    const RateFunction rf = RateFunction::piecewise_constant({0.4, 0.8, 1.0}, {1.0, 1.25, 1.5});
    const auto breaks = rf.interior_breaks(0.0, 1.0);
    const double got = num::integrate([&](double t) { return rf.rate(t); }, 0.0, 1.0,
                                      {}, breaks);
    check_bound(out, "quadrature vs piecewise closed form", rel_err(got, 1.2), 1e-12);
  }
  {  // rate-function roundtrip
    const RateFunction w = RateFunction::weibull(1.1, 1.2);
    const RateFunction p = RateFunction::piecewise_constant({0.4, 0.8, 1.0}, {1.0, 1.25, 1.5});
    double worst = 0.0;
    for (double t : {0.05, 0.3, 0.56, 0.85, 1.0}) {
      worst = std::max(worst, std::fabs(w.inverse_cumulative(w.cumulative(t)) - t));
      worst = std::max(worst, std::fabs(p.inverse_cumulative(p.cumulative(t)) - t));
    }
    check_bound(out, "cumulative rate roundtrip", worst, 1e-10);
  }
  {  // entry density normalization
    double worst = 0.0;
    for (double eta : {-2.0, 0.0, 3.0}) {
      const StudyDesign d = StudyDesign::design2(0.5, 1.0, eta);
      const double mass =
          num::integrate([&](double e) { return entry_density(d, e); }, 0.0, 0.5);
      worst = std::max(worst, std::fabs(mass - 1.0));
    }
    check_bound(out, "entry density normalizes", worst, 1e-10);
  }
  {  // closed-form exposure moments against direct quadrature
    double worst = 0.0;
    for (int design : {1, 2})
      for (bool weibull : {true, false})
        for (double delta : {0.0, 0.15, 0.25, 0.35}) {
          const TrialScenario sc = grid_scenario(design, weibull, delta, delta);
          const auto m = exposure_moments(sc.design(), sc.dropout(0), sc.control_rate());
          const double tau = sc.design().horizon();
          const RateFunction rf = sc.control_rate().is_weibull()
                                      ? sc.control_rate()
                                      : sc.control_rate().with_knot(sc.design().tau_c()).with_knot(tau);
          std::vector<double> breaks = rf.interior_breaks(0.0, tau);
          if (sc.design().staggered_entry()) breaks.push_back(sc.design().tau_c());
          const auto pi = [&](double t) {
            return retention_prob(sc.design(), sc.dropout(0), t);
          };
          const double e_quad = num::integrate(
              [&](double t) { return pi(t) * rf.rate(t); }, 0.0, tau, {}, breaks);
          const double f_quad = num::integrate(
              [&](double t) { return pi(t) * rf.cumulative(t) * rf.rate(t); }, 0.0, tau,
              {}, breaks);
          worst = std::max(worst, rel_err(m.e_moment, e_quad));
          worst = std::max(worst, rel_err(m.f_moment, f_quad));
        }
    check_bound(out, "exposure moments closed form vs quadrature", worst, 1e-8);
  }
  {  // general variance reduces to the equal-dropout closed form
    double worst = 0.0;
    for (int design : {1, 2})
      for (bool weibull : {true, false})
        for (double delta : {0.0, 0.15, 0.25, 0.35}) {
          const TrialScenario sc = grid_scenario(design, weibull, delta, delta);
          worst = std::max(worst, rel_err(variance_general(sc).v_beta,
                                          variance_equal_dropout(sc).v_beta));
        }
    check_bound(out, "general variance reduction", worst, 1e-8);
  }
  {  // design 2 with a vanishing accrual window approaches design 1
    const TrialScenario d1 = grid_scenario(1, true, 0.25, 0.25);
    const TrialScenario d2(StudyDesign::design2(1e-8, 1.0, 0.0), RateFunction::weibull(1.1, 1.2),
                           0.6, 0.5, 0.8, 0.8, DropoutModel(0.25), DropoutModel(0.25));
    const auto m1 = exposure_moments(d1.design(), d1.dropout(0), d1.control_rate());
    const auto m2 = exposure_moments(d2.design(), d2.dropout(0), d2.control_rate());
    const double worst = std::max(rel_err(m2.e_moment, m1.e_moment),
                                  rel_err(m2.f_moment, m1.f_moment));
    check_bound(out, "design 1 as the accrual-free limit of design 2", worst, 1e-6);
  }
  {  // constant-rate variance equals the follow-up-moment bound
    const TrialScenario sc(StudyDesign::design1(1.0), RateFunction::weibull(1.0, 1.0),
                           0.6, 0.5, 0.8, 0.8, DropoutModel(0.0), DropoutModel(0.0));
    const auto check = nb_limit_check(sc);
    check_bound(out, "constant-rate follow-up-moment equality",
                rel_err(check.v_beta, check.nb_bound), 1e-10);
  }
  {  // equivalence power with a huge upper margin reduces to the one-sided test
    const TrialScenario sc = grid_scenario(1, false, 0.25, 0.25);
    const TrialScenario sc_null(sc.design(), sc.control_rate(), 1.0, 0.5, 0.8, 0.8,
                                DropoutModel(0.25), DropoutModel(0.25));
    const Hypothesis wide = Hypothesis::equivalence(0.75, 1e8);
    const double v = variance(sc_null).v_beta;
    const double n = 800.0;
    const double z = num::norm_quantile(0.975);
    const double one_sided =
        num::norm_cdf(std::sqrt(n) * (0.0 - std::log(0.75)) / std::sqrt(v) - z);
    const double got = power_equiv(sc_null, wide, n).power;
    check_bound(out, "equivalence reduces to one-sided test", std::fabs(got - one_sided),
                1e-10);
  }
  {  // mirrored direction leaves power unchanged
    const StudyDesign d = StudyDesign::design1(1.0);
    const RateFunction r = RateFunction::weibull(1.1, 1.2);
    const TrialScenario low(d, r, 0.9, 0.5, 0.8, 0.8, DropoutModel(0.25),
                            DropoutModel(0.25));
    const TrialScenario high(d, r, 1.0 / 0.9, 0.5, 0.8, 0.8, DropoutModel(0.25),
                             DropoutModel(0.25));
    const double p_low = power_sup_ni(low, Hypothesis::noninferiority(1.25), 547);
    const double p_high = power_sup_ni(high, Hypothesis::noninferiority(1.0 / 1.25), 547);
    check_bound(out, "direction mirror", std::fabs(p_low - p_high), 1e-12);
  }
  {  // simulator determinism across thread counts
    const TrialScenario sc = grid_scenario(1, true, 0.25, 0.25);
    const Hypothesis hyp = Hypothesis::superiority();
    const SimulationResult a = empirical_power(sc, hyp, 80, 40, 991, 1);
    const SimulationResult b = empirical_power(sc, hyp, 80, 40, 991, 3);
    out.push_back({"simulation determinism across threads",
                   a.rejections == b.rejections && a.degenerate_count == b.degenerate_count,
                   "rejections " + std::to_string(a.rejections) + " vs " +
                       std::to_string(b.rejections)});
  }
  {  // fitter closed form under a common follow-up
    std::vector<int> arm;
    std::vector<double> fu;
    std::vector<std::vector<double>> ev;
    for (int i = 0; i < 10; ++i) {
      arm.push_back(i < 5 ? 1 : 0);
      fu.push_back(1.0);
      // 2 events per treated subject, 4 per control
      std::vector<double> e;
      const int count = i < 5 ? 2 : 4;
      for (int j = 0; j < count; ++j)
        e.push_back(0.05 + 0.09 * i + 0.013 * j);
      ev.push_back(std::move(e));
    }
    const AgFit fit = ag_fit_counting(arm, fu, ev);
    check_bound(out, "fitter closed form (common follow-up)",
                std::fabs(fit.beta_hat - std::log(0.5)), 1e-10);
  }
  return out;
}

}  // namespace agdesign
